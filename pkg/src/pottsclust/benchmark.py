"""Benchmark family: all nonempty subsets of a K-element frame, clustered into K groups."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .annealer import AnnealConfig, anneal_interactions, build_interactions, critical_temperature
from .evidence import FrameOfDiscernment, Partition, SimpleSupport, metaconflict
from .rng import CounterStream, derive_key

HIT_TOL = 1e-9

CSV_COLUMNS = (
    "K", "N", "median_mcf", "mean_mcf", "median_per_cluster", "mean_per_cluster",
    "median_per_evidence", "mean_per_evidence", "global_opt_pct", "mean_time_s",
    "time_per_N2K2", "time_per_N2log2N",
)


@dataclass(frozen=True)
class BenchmarkInstance:
    frame: FrameOfDiscernment
    evidence: tuple[SimpleSupport, ...]
    seed: int

    @property
    def n(self) -> int:
        return len(self.evidence)


def all_focal_sets(k: int) -> list[int]:
    """Every nonempty subset of 1..k, ordered by size then lexicographically."""
    out = []
    for size in range(1, k + 1):
        for combo in combinations(range(k), size):
            out.append(sum(1 << e for e in combo))
    return out


def generate_instance(k: int, seed: int, run_index: int = 0) -> BenchmarkInstance:
    if not 2 <= k <= 20:
        raise ValueError("k must lie in 2..20")
    frame = FrameOfDiscernment(k)
    focal = all_focal_sets(k)
    supports = CounterStream(derive_key(seed, k, run_index)).uniform(len(focal))
    ev = tuple(SimpleSupport(frame, a, float(s)) for a, s in zip(focal, supports))
    return BenchmarkInstance(frame, ev, int(seed))


def zero_conflict_partition(instance: BenchmarkInstance) -> Partition:
    """Assign each piece to the cluster named by the lowest element of its focal set."""
    labels = [(e.focal & -e.focal).bit_length() for e in instance.evidence]
    return Partition(tuple(labels), instance.frame.size)


def per_cluster(mcf: float, q: int) -> float:
    return 1.0 - (1.0 - mcf) ** (1.0 / q)


def per_evidence(mcf: float, q: int, n: int) -> float:
    return per_cluster(mcf, q) / (n / q)


@dataclass(frozen=True)
class RunMetrics:
    k: int
    n: int
    run: int
    metaconflict: float
    per_cluster: float
    per_evidence: float
    wall_time: float
    tc_time: float
    sweeps_total: int
    temps_total: int
    time_per_n2k2: float
    time_per_n2log2n: float
    hit_global: bool
    frozen: bool
    partition: tuple[int, ...]


def _run_one(args) -> RunMetrics:
    k, r, cfg = args
    inst = generate_instance(k, cfg.seed, r)
    j = build_interactions(inst.evidence, cfg.lam)
    t0 = time.perf_counter()
    t_c = critical_temperature(j, cfg.alpha, cfg.gamma, cfg.q)
    t1 = time.perf_counter()
    res = anneal_interactions(j, cfg, r, t_start=t_c)
    dt = time.perf_counter() - t1
    n = inst.n
    mcf = metaconflict(inst.evidence, res.partition)
    return RunMetrics(
        k=k, n=n, run=r, metaconflict=mcf,
        per_cluster=per_cluster(mcf, cfg.q), per_evidence=per_evidence(mcf, cfg.q, n),
        wall_time=dt, tc_time=t1 - t0, sweeps_total=res.sweeps, temps_total=res.temps,
        time_per_n2k2=dt / (n * n * k * k), time_per_n2log2n=dt / (n * n * math.log(n) ** 2),
        hit_global=mcf <= HIT_TOL, frozen=res.frozen, partition=res.partition.assignment,
    )


def _config_for(k: int, cfg: AnnealConfig | None) -> AnnealConfig:
    if cfg is None:
        return AnnealConfig(q=k)
    if cfg.q != k:
        # q always equals the frame size in this family
        return AnnealConfig.from_mapping({**cfg.to_mapping(), "q": k, "alpha": None})
    return cfg


def run_suite(k: int, runs: int, cfg: AnnealConfig | None = None, jobs: int = 1) -> tuple[list[RunMetrics], dict]:
    if runs < 1:
        raise ValueError("runs must be at least 1")
    cfg = _config_for(k, cfg)
    tasks = [(k, r, cfg) for r in range(runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            metrics = list(ex.map(_run_one, tasks))
    else:
        metrics = [_run_one(t) for t in tasks]
    return metrics, summarize(metrics)


def summarize(metrics: Sequence[RunMetrics]) -> dict:
    out = {"K": metrics[0].k, "N": metrics[0].n, "runs": len(metrics)}
    for name in ("metaconflict", "per_cluster", "per_evidence", "wall_time", "tc_time",
                 "sweeps_total", "time_per_n2k2", "time_per_n2log2n"):
        vals = [getattr(m, name) for m in metrics]
        out[f"median_{name}"] = float(statistics.median(vals))
        out[f"mean_{name}"] = float(math.fsum(vals) / len(vals))
    out["global_opt_pct"] = 100.0 * sum(m.hit_global for m in metrics) / len(metrics)
    return out


def csv_row(summary: dict) -> dict:
    return {
        "K": summary["K"], "N": summary["N"],
        "median_mcf": summary["median_metaconflict"], "mean_mcf": summary["mean_metaconflict"],
        "median_per_cluster": summary["median_per_cluster"], "mean_per_cluster": summary["mean_per_cluster"],
        "median_per_evidence": summary["median_per_evidence"], "mean_per_evidence": summary["mean_per_evidence"],
        "global_opt_pct": summary["global_opt_pct"], "mean_time_s": summary["mean_wall_time"],
        "time_per_N2K2": summary["mean_time_per_n2k2"], "time_per_N2log2N": summary["mean_time_per_n2log2n"],
    }


def write_csv(rows: Iterable[dict], fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in row.items()})


def run_log_lines(metrics: Iterable[RunMetrics], include_timing: bool = True) -> list[str]:
    lines = []
    for m in metrics:
        d = asdict(m)
        d["partition"] = list(m.partition)
        if not include_timing:
            for key in ("wall_time", "tc_time", "time_per_n2k2", "time_per_n2log2n"):
                d.pop(key)
        lines.append(json.dumps(d, sort_keys=True))
    return lines


def timing_profile(k_range: Iterable[int], runs: int, cfg: AnnealConfig | None = None) -> list[dict]:
    """Mean anneal wall time per K with both complexity normalizations. Runs sequentially."""
    table = []
    for k in k_range:
        metrics, summary = run_suite(k, runs, cfg, jobs=1)
        n = summary["N"]
        t = summary["mean_wall_time"]
        table.append({
            "K": k, "N": n, "mean_time_s": t,
            "time_per_N2K2": t / (n * n * k * k),
            "time_per_N2log2N": t / (n * n * math.log(n) ** 2),
        })
    return table


def warm_up() -> None:
    """Trigger kernel compilation so the first timed run is not skewed."""
    inst = generate_instance(2, 0)
    anneal_interactions(build_interactions(inst.evidence), AnnealConfig(q=2))


def expected_random_conflict(q: int) -> tuple[float, float]:
    """Chance two distinct random nonempty subsets of a q-frame are disjoint, and the
    resulting expected conflict for supports uniform on (0, 1)."""
    if q < 2:
        raise ValueError("q must be at least 2")
    m = 2 ** q - 1
    conflicting = sum(comb(q, j) * sum(comb(q - j, k) for k in range(1, q - j + 1))
                      for j in range(1, q))
    p = conflicting / (m * m - m)
    return p, 0.25 * p


def pair_counts(q: int) -> tuple[int, int]:
    """(unordered pairs, disjoint unordered pairs) among the nonempty subsets of a q-frame."""
    m = 2 ** q - 1
    total = (m * m - m) // 2
    disjoint = sum(comb(q, j) * sum(comb(q - j, k) for k in range(1, q - j + 1))
                   for j in range(1, q)) // 2
    return total, disjoint


def benchmark_rows(k_min: int, k_max: int, runs: int, cfg: AnnealConfig | None = None,
                   jobs: int = 1) -> tuple[list[dict], list[RunMetrics]]:
    rows, all_runs = [], []
    for k in range(k_min, k_max + 1):
        metrics, summary = run_suite(k, runs, cfg, jobs)
        rows.append(csv_row(summary))
        all_runs.extend(metrics)
    return rows, all_runs


def csv_text(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()

