"""Dempster-Shafer primitives over small frames of discernment.

Focal sets are plain Python ints used as bit sets: element ``k`` of the
frame (1-based) is bit ``k - 1``. A frame of size ``K`` therefore has the
full set ``(1 << K) - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

MASS_TOL = 1e-9
_DROP_TOL = 1e-15


class EvidenceError(ValueError):
    pass


class TotalConflict(EvidenceError):
    """Combination is undefined: every product of focal sets is empty."""


class FrameMismatch(EvidenceError):
    pass


@dataclass(frozen=True)
class FrameOfDiscernment:
    size: int

    def __post_init__(self):
        if not 1 <= self.size <= 64:
            raise EvidenceError(f"frame size must be in 1..64, got {self.size}")

    @property
    def theta(self) -> int:
        return (1 << self.size) - 1

    def subset(self, members: Iterable[int]) -> int:
        mask = 0
        for k in members:
            if not 1 <= k <= self.size:
                raise EvidenceError(f"element {k} outside frame 1..{self.size}")
            mask |= 1 << (k - 1)
        return mask

    def contains(self, focal: int) -> bool:
        return 0 <= focal and focal & ~self.theta == 0


def members(focal: int) -> list[int]:
    """Frame elements (1-based) of a bit-set focal set, ascending."""
    out = []
    k = 1
    while focal:
        if focal & 1:
            out.append(k)
        focal >>= 1
        k += 1
    return out


@dataclass(frozen=True)
class SimpleSupport:
    """Evidence committing ``support`` to ``focal`` and the rest to the frame."""

    frame: FrameOfDiscernment
    focal: int
    support: float

    def __post_init__(self):
        if self.focal == 0:
            raise EvidenceError("focal set of a simple support must be nonempty")
        if not self.frame.contains(self.focal):
            raise EvidenceError("focal set not contained in frame")
        if not 0.0 <= self.support <= 1.0:
            raise EvidenceError(f"support must lie in [0, 1], got {self.support}")

    @classmethod
    def of(cls, frame: FrameOfDiscernment, elements: Iterable[int], support: float):
        return cls(frame, frame.subset(elements), float(support))

    def mass_function(self) -> "MassFunction":
        if self.focal == self.frame.theta or self.support == 0.0:
            return MassFunction(self.frame, {self.frame.theta: 1.0})
        if self.support == 1.0:
            return MassFunction(self.frame, {self.focal: 1.0})
        return MassFunction(
            self.frame, {self.focal: self.support, self.frame.theta: 1.0 - self.support}
        )


@dataclass(frozen=True)
class MassFunction:
    frame: FrameOfDiscernment
    masses: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        total = 0.0
        for a, m in self.masses.items():
            if a == 0:
                raise EvidenceError("mass function may not assign mass to the empty set")
            if not self.frame.contains(a):
                raise EvidenceError("focal set not contained in frame")
            if not 0.0 < m <= 1.0 + MASS_TOL:
                raise EvidenceError(f"mass {m} outside (0, 1]")
            total += m
        if abs(total - 1.0) > MASS_TOL:
            raise EvidenceError(f"masses sum to {total}, expected 1")

    def __getitem__(self, a: int) -> float:
        return self.masses.get(a, 0.0)

    def isclose(self, other: "MassFunction", tol: float = MASS_TOL) -> bool:
        if self.frame != other.frame:
            return False
        keys = set(self.masses) | set(other.masses)
        return all(abs(self[a] - other[a]) <= tol for a in keys)


def _check_frame(f1: FrameOfDiscernment, f2: FrameOfDiscernment) -> None:
    if f1 != f2:
        raise FrameMismatch(f"frames differ: {f1.size} vs {f2.size}")


def combine(m1: MassFunction, m2: MassFunction) -> tuple[MassFunction, float]:
    """Dempster's rule. Returns the normalized combination and the conflict mass."""
    _check_frame(m1.frame, m2.frame)
    acc: dict[int, float] = {}
    kappa = 0.0
    for a, x in m1.masses.items():
        for b, y in m2.masses.items():
            c = a & b
            if c:
                acc[c] = acc.get(c, 0.0) + x * y
            else:
                kappa += x * y
    agree = sum(acc.values())
    if agree <= 0.0:
        raise TotalConflict("no nonempty intersections between focal sets")
    out = {a: v / agree for a, v in acc.items()}
    if any(v < _DROP_TOL for v in out.values()):
        out = {a: v for a, v in out.items() if v >= _DROP_TOL}
        z = sum(out.values())
        out = {a: v / z for a, v in out.items()}
    return MassFunction(m1.frame, out), min(1.0, kappa)


def belief(m: MassFunction, a: int, frame: FrameOfDiscernment | None = None) -> float:
    if frame is not None:
        _check_frame(m.frame, frame)
    if not m.frame.contains(a):
        raise FrameMismatch("query set not contained in the mass function's frame")
    return min(1.0, sum(v for b, v in m.masses.items() if b & ~a == 0))


def plausibility(m: MassFunction, a: int, frame: FrameOfDiscernment | None = None) -> float:
    if frame is not None:
        _check_frame(m.frame, frame)
    if not m.frame.contains(a):
        raise FrameMismatch("query set not contained in the mass function's frame")
    return min(1.0, sum(v for b, v in m.masses.items() if b & a))


def pairwise_conflict(s1: SimpleSupport, s2: SimpleSupport) -> float:
    """Weight of conflict between two simple supports; ``inf`` when both are certain."""
    _check_frame(s1.frame, s2.frame)
    if s1.focal & s2.focal:
        return 0.0
    prod = s1.support * s2.support
    if prod >= 1.0:
        return math.inf
    return -math.log1p(-prod)


def cluster_conflict(cluster: Sequence[SimpleSupport]) -> float:
    """Conflict mass of combining every member of ``cluster`` in input order."""
    if not cluster:
        raise EvidenceError("cluster must be nonempty")
    frame = cluster[0].frame
    current = cluster[0].mass_function()
    agree = 1.0
    for s in cluster[1:]:
        _check_frame(frame, s.frame)
        try:
            current, kappa = combine(current, s.mass_function())
        except TotalConflict:
            return 1.0
        agree *= 1.0 - kappa
    return min(1.0, max(0.0, 1.0 - agree))


@dataclass(frozen=True)
class Partition:
    """Cluster label (1..q) of each piece of evidence."""

    assignment: tuple[int, ...]
    cluster_count: int

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        if self.cluster_count < 1:
            raise EvidenceError("cluster_count must be positive")
        for a in self.assignment:
            if not 1 <= a <= self.cluster_count:
                raise EvidenceError(f"label {a} outside 1..{self.cluster_count}")

    @classmethod
    def from_zero_based(cls, labels: Iterable[int], q: int) -> "Partition":
        return cls(tuple(int(a) + 1 for a in labels), q)

    def clusters(self) -> list[list[int]]:
        """Evidence indices (0-based) of each cluster, cluster 1 first."""
        out: list[list[int]] = [[] for _ in range(self.cluster_count)]
        for i, a in enumerate(self.assignment):
            out[a - 1].append(i)
        return out

    def relabel(self, perm: Sequence[int]) -> "Partition":
        """Apply ``perm`` (a permutation of 1..q, given as old -> perm[old-1])."""
        return Partition(tuple(perm[a - 1] for a in self.assignment), self.cluster_count)


def metaconflict(evidence: Sequence[SimpleSupport], p: Partition) -> float:
    if len(p.assignment) != len(evidence):
        raise EvidenceError("partition length does not match evidence length")
    keep = 1.0
    for idx in p.clusters():
        if idx:
            keep *= 1.0 - cluster_conflict([evidence[i] for i in idx])
    return min(1.0, max(0.0, 1.0 - keep))


def linearized_conflict(cluster: Sequence[SimpleSupport], lam: float = 1.0) -> float:
    """Sum of pairwise weights of conflict inside ``cluster``, scaled by ``1/lam``."""
    if not cluster:
        raise EvidenceError("cluster must be nonempty")
    if lam <= 0:
        raise EvidenceError("lambda must be positive")
    total = 0.0
    for k in range(len(cluster)):
        for l in range(k + 1, len(cluster)):
            total += pairwise_conflict(cluster[k], cluster[l])
    return total / lam
