import csv
import io
import json
import math
from decimal import Decimal
from itertools import combinations

import numpy as np
import pytest

from pottsclust.annealer import AnnealConfig
from pottsclust.benchmark import (
    CSV_COLUMNS,
    all_focal_sets,
    csv_row,
    csv_text,
    expected_random_conflict,
    generate_instance,
    pair_counts,
    per_cluster,
    per_evidence,
    run_log_lines,
    run_suite,
    timing_profile,
    zero_conflict_partition,
)
from pottsclust.evidence import members, metaconflict
from pottsclust.oracle import enumerate_min

# Potts spin, Hopfield-Tank and iterative-optimization columns (median, mean) by K
REF_MCF = {3: [0, 0, 0.005, 0.016, 0, 0], 4: [0, 0, 0.013, 0.059, 0, 0.001],
          5: [0, 0, 0.042, 0.076, 0, 0.003], 6: [0, 0.115, 0.447, 0.398, 0, 0.097],
          7: [0, 0.116, 0.904, 0.856], 8: [0, 0.114], 9: [0.069, 0.122],
          10: [0.711, 0.610], 11: [0.998, 0.814]}
REF_PER_CLUSTER = {3: [0, 0, 0.002, 0.005, 0, 0], 4: [0, 0, 0.003, 0.015, 0, 0.0003],
          5: [0, 0, 0.009, 0.016, 0, 0.0005], 6: [0, 0.020, 0.094, 0.081, 0, 0.017],
          7: [0, 0.017, 0.284, 0.242], 8: [0, 0.015], 9: [0.008, 0.014],
          10: [0.117, 0.090], 11: [0.441, 0.142]}
REF_PER_EVIDENCE = {3: [0, 0, 0.0007, 0.002, 0, 0], 4: [0, 0, 0.0009, 0.004, 0, 0.00009],
          5: [0, 0, 0.001, 0.003, 0, 0.00008], 6: [0, 0.002, 0.009, 0.008, 0, 0.002],
          7: [0, 0.001, 0.016, 0.013], 8: [0, 0.0005], 9: [0.0001, 0.0003],
          10: [0.0011, 0.0009], 11: [0.0024, 0.0008]}
REF_ENTRIES = [(k, i) for k in REF_MCF for i in range(len(REF_MCF[k]))]


class TestGenerator:
    def test_k3_focal_sets(self):
        inst = generate_instance(3, 0)
        assert [members(e.focal) for e in inst.evidence] == [[1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]]

    @pytest.mark.parametrize("k", [2, 5, 8])
    def test_every_subset_once(self, k):
        inst = generate_instance(k, 3)
        assert sorted(e.focal for e in inst.evidence) == list(range(1, 2 ** k))
        assert all(0.0 < e.support < 1.0 for e in inst.evidence)

    def test_deterministic(self):
        assert generate_instance(4, 7) == generate_instance(4, 7)
        assert generate_instance(4, 7) != generate_instance(4, 8)
        assert generate_instance(4, 7, 1) != generate_instance(4, 7, 0)

    @pytest.mark.parametrize("k", range(2, 9))
    def test_zero_conflict_witness(self, k):
        inst = generate_instance(k, k)
        assert metaconflict(inst.evidence, zero_conflict_partition(inst)) == 0.0

    def test_oracle_minimum_k3(self):
        assert enumerate_min(generate_instance(3, 11).evidence, 3).min_metaconflict == 0.0

    def test_bounds(self):
        with pytest.raises(ValueError):
            generate_instance(1, 0)
        assert len(all_focal_sets(4)) == 15


class TestExpectedConflict:
    def test_q11(self):
        p, c = expected_random_conflict(11)
        assert p == pytest.approx(0.0413, abs=1e-4)
        assert c == pytest.approx(0.0103, abs=1e-4)
        assert c == 0.25 * p

    def test_q2(self):
        assert expected_random_conflict(2)[0] == pytest.approx(1 / 3, abs=1e-15)

    @pytest.mark.parametrize("q", range(2, 7))
    def test_exhaustive_pairs(self, q):
        subsets = range(1, 2 ** q)
        pairs = list(combinations(subsets, 2))
        disjoint = sum(1 for a, b in pairs if a & b == 0)
        assert pair_counts(q) == (len(pairs), disjoint)
        assert expected_random_conflict(q)[0] == disjoint / len(pairs)

    @pytest.mark.parametrize("q", range(2, 12))
    def test_closed_form(self, q):
        # pairs of distinct nonempty disjoint subsets: 3^q - 2 * 2^q + 1 ordered pairs
        m = 2 ** q - 1
        assert expected_random_conflict(q)[0] == pytest.approx((3 ** q - 2 * 2 ** q + 1) / (m * m - m), rel=1e-12)

    def test_monte_carlo_q5(self):
        q, draws = 5, 10 ** 6
        rng = np.random.default_rng(5)
        a = rng.integers(1, 2 ** q, size=draws)
        b = rng.integers(1, 2 ** q, size=draws)
        keep = a != b
        rate = float(np.mean((a[keep] & b[keep]) == 0))
        p = expected_random_conflict(q)[0]
        se = math.sqrt(p * (1 - p) / keep.sum())
        assert abs(rate - p) <= 3 * se

    def test_q_range(self):
        with pytest.raises(ValueError):
            expected_random_conflict(1)


class TestDerivedMetrics:
    def test_zero(self):
        assert per_cluster(0.0, 5) == 0.0 and per_evidence(0.0, 5, 31) == 0.0

    def test_identical_clusters(self):
        # q clusters each with conflict c give Mcf = 1 - (1 - c)^q
        c, q = 0.07, 6
        assert per_cluster(1 - (1 - c) ** q, q) == pytest.approx(c)
        assert per_evidence(1 - (1 - c) ** q, q, 63) == pytest.approx(c * q / 63)

    @pytest.mark.parametrize("k,i", [e for e in REF_ENTRIES if e != (11, 0)])
    def test_reference_metrics_from_mcf(self, k, i):
        mcf, n = REF_MCF[k][i], 2 ** k - 1
        assert per_cluster(mcf, k) == pytest.approx(REF_PER_CLUSTER[k][i], abs=1e-3)
        assert per_evidence(mcf, k, n) == pytest.approx(REF_PER_EVIDENCE[k][i], abs=1e-3)

    @pytest.mark.parametrize("k,i", REF_ENTRIES)
    def test_reference_metrics_consistent_with_rounding(self, k, i):
        # reference Mcf values carry three decimals, so the true value lies within 5e-4
        mcf, n = REF_MCF[k][i], 2 ** k - 1
        lo, hi = max(0.0, mcf - 5e-4), min(1.0, mcf + 5e-4)
        for f, printed in ((lambda m: per_cluster(m, k), REF_PER_CLUSTER[k][i]),
                           (lambda m: per_evidence(m, k, n), REF_PER_EVIDENCE[k][i])):
            exp = Decimal(str(printed)).as_tuple().exponent if printed else -3
            h = 0.5 * 10.0 ** exp
            assert f(lo) <= printed + h and f(hi) >= printed - h

    def test_k11_median_rounding(self):
        # the reference 0.441 needs Mcf near 0.99834, which rounds to 0.998
        assert per_cluster(0.998, 11) == pytest.approx(0.4316, abs=1e-4)
        assert per_cluster(0.99834, 11) == pytest.approx(0.441, abs=1e-3)


class TestSuite:
    def test_single_run_summary(self):
        metrics, summary = run_suite(3, 1)
        m = metrics[0]
        assert summary["median_metaconflict"] == summary["mean_metaconflict"] == m.metaconflict
        assert summary["median_wall_time"] == summary["mean_wall_time"] == m.wall_time
        assert summary["global_opt_pct"] == (100.0 if m.hit_global else 0.0)

    def test_runs_use_fresh_instances(self):
        metrics, _ = run_suite(3, 3)
        assert [m.run for m in metrics] == [0, 1, 2]
        insts = {generate_instance(3, 0, r) for r in range(3)}
        assert len(insts) == 3

    def test_metric_relations(self):
        metrics, summary = run_suite(4, 3, AnnealConfig(q=4, seed=2))
        for m in metrics:
            assert m.per_cluster == pytest.approx(per_cluster(m.metaconflict, 4))
            assert m.per_evidence == pytest.approx(m.per_cluster / (15 / 4))
            assert m.hit_global == (m.metaconflict <= 1e-9)
            assert m.time_per_n2k2 == pytest.approx(m.wall_time / (15 ** 2 * 16))
        assert summary["K"] == 4 and summary["N"] == 15

    def test_q_follows_k(self):
        metrics, _ = run_suite(3, 1, AnnealConfig(q=5, seed=0))
        assert max(metrics[0].partition) <= 3

    def test_csv_and_log(self):
        metrics, summary = run_suite(3, 2)
        text = csv_text([csv_row(summary)])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert rows[0]["N"] == "7"
        lines = run_log_lines(metrics, include_timing=False)
        assert all("wall_time" not in json.loads(line) for line in lines)

    def test_timing_profile_shape(self):
        table = timing_profile([3], 2)
        assert table[0]["K"] == 3 and table[0]["N"] == 7
        assert table[0]["time_per_N2K2"] == pytest.approx(table[0]["mean_time_s"] / (49 * 9))

    def test_parallel_matches_serial(self):
        a, _ = run_suite(3, 3, jobs=1)
        b, _ = run_suite(3, 3, jobs=2)
        assert [m.partition for m in a] == [m.partition for m in b]
