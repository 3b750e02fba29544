"""Exhaustive ground truth for small clustering instances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .evidence import EvidenceError, Partition, SimpleSupport, cluster_conflict, pairwise_conflict

MAX_ASSIGNMENTS = 10**7
AGREE_TOL = 1e-9


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best_partition: Partition
    min_metaconflict: float
    min_linearized: float
    linearized_argmin: Partition
    partitions_scanned: int
    objective: str = "exact"

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "best_partition": list(self.best_partition.assignment),
            "min_metaconflict": self.min_metaconflict,
            "min_linearized": self.min_linearized,
            "linearized_argmin": list(self.linearized_argmin.assignment),
            "partitions_scanned": self.partitions_scanned,
            "q": self.best_partition.cluster_count,
        }


def check_size(n: int, q: int, limit: int = MAX_ASSIGNMENTS) -> None:
    if n < 1:
        raise EvidenceError("need at least one piece of evidence")
    if q < 1:
        raise EvidenceError("q must be positive")
    if q ** n > limit:
        raise TooLarge(f"{q}^{n} assignments exceed the limit of {limit}")


class _Objectives:
    """Exact and linearized objectives with per-subset caching of cluster conflicts."""

    def __init__(self, evidence: Sequence[SimpleSupport]):
        self.evidence = list(evidence)
        n = len(evidence)
        self.w = [[pairwise_conflict(evidence[i], evidence[k]) if i != k else 0.0
                   for k in range(n)] for i in range(n)]
        self._cache: dict[int, float] = {}

    def cluster(self, mask: int) -> float:
        c = self._cache.get(mask)
        if c is None:
            idx = [i for i in range(len(self.evidence)) if mask >> i & 1]
            c = cluster_conflict([self.evidence[i] for i in idx]) if len(idx) > 1 else 0.0
            self._cache[mask] = c
        return c

    @staticmethod
    def masks(labels: Sequence[int], q: int) -> list[int]:
        out = [0] * q
        for i, a in enumerate(labels):
            out[a] |= 1 << i
        return out

    def exact(self, masks: Sequence[int]) -> float:
        keep = 1.0
        for m in masks:
            if m:
                keep *= 1.0 - self.cluster(m)
        return min(1.0, max(0.0, 1.0 - keep))

    def weight_of_conflict(self, masks: Sequence[int]) -> float:
        """Sum over clusters of -log(1 - c_i)."""
        total = 0.0
        for m in masks:
            c = self.cluster(m) if m else 0.0
            total += math.inf if c >= 1.0 else -math.log1p(-c)
        return total

    def linearized(self, labels: Sequence[int]) -> float:
        n = len(labels)
        w = self.w
        total = 0.0
        for i in range(n):
            wi = w[i]
            li = labels[i]
            for k in range(i + 1, n):
                if labels[k] == li:
                    total += wi[k]
        return total


def assignments(n: int, q: int, canonical: bool = True):
    """Zero-based label vectors in lexicographic order; with ``canonical`` the
    first piece of evidence is pinned to cluster 0."""
    if canonical:
        for rest in product(range(q), repeat=n - 1):
            yield (0,) + rest
    else:
        yield from product(range(q), repeat=n)


def enumerate_min(evidence: Sequence[SimpleSupport], q: int, objective: str = "exact",
                  canonical: bool = True) -> OracleResult:
    if objective not in ("exact", "linearized"):
        raise ValueError("objective must be 'exact' or 'linearized'")
    n = len(evidence)
    check_size(n, q)
    obj = _Objectives(evidence)
    best_exact, arg_exact = math.inf, None
    best_lin, arg_lin = math.inf, None
    scanned = 0
    for labels in assignments(n, q, canonical):
        scanned += 1
        e = obj.exact(obj.masks(labels, q))
        if e < best_exact:
            best_exact, arg_exact = e, labels
        l = obj.linearized(labels)
        if l < best_lin:
            best_lin, arg_lin = l, labels
    p_exact = Partition.from_zero_based(arg_exact, q)
    p_lin = Partition.from_zero_based(arg_lin, q)
    return OracleResult(
        best_partition=p_exact if objective == "exact" else p_lin,
        min_metaconflict=best_exact,
        min_linearized=best_lin,
        linearized_argmin=p_lin,
        partitions_scanned=scanned,
        objective=objective,
    )


def linearization_gap(evidence: Sequence[SimpleSupport], q: int) -> tuple[float, bool]:
    """Excess exact metaconflict paid by minimizing the linearized objective instead."""
    res = enumerate_min(evidence, q, "exact")
    obj = _Objectives(evidence)
    at_lin = obj.exact(obj.masks([a - 1 for a in res.linearized_argmin.assignment], q))
    gap = max(0.0, at_lin - res.min_metaconflict)
    return gap, gap <= AGREE_TOL


def overestimation_violations(evidence: Sequence[SimpleSupport], q: int, tol: float = 1e-9) -> int:
    """Count partitions whose linearized objective falls below the exact weight of conflict."""
    n = len(evidence)
    check_size(n, q)
    obj = _Objectives(evidence)
    bad = 0
    for labels in assignments(n, q):
        if obj.linearized(labels) < obj.weight_of_conflict(obj.masks(labels, q)) - tol:
            bad += 1
    return bad


def conflict_by_expansion(cluster: Sequence[SimpleSupport]) -> float:
    """Conflict of combining simple supports, by expanding the unnormalized product.

    Every member contributes either its focal set (mass ``s``) or the whole
    frame (mass ``1 - s``); the conflict is the total mass of choices whose
    intersection is empty. Independent of :func:`evidence.combine`.
    """
    theta = cluster[0].frame.theta
    total = 0.0
    for choice in product((True, False), repeat=len(cluster)):
        inter = theta
        mass = 1.0
        for take, s in zip(choice, cluster):
            if take:
                inter &= s.focal
                mass *= s.support
            else:
                mass *= 1.0 - s.support
        if inter == 0:
            total += mass
    return total
