"""Spin/bond dual representation of the antiferromagnetic Potts system.

An edge exists between sites ``i`` and ``k`` only where ``J[i, k] > 0``; pairs
with no interaction carry no bond variable at all. Bond value 1 means
occupied, 0 vacant. Bond states are dicts keyed by ``(i, k)`` with ``i < k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np

from .annealer import InteractionMatrix, _as_matrix

MAX_STATES = 10**7


class TooLarge(ValueError):
    pass


class NotGroundStateForm(ValueError):
    """A vacant bond joins two sites of the same bond-cluster."""


class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted(out.values(), key=lambda g: g[0])


@dataclass(frozen=True)
class BondGraph:
    p: np.ndarray
    present: np.ndarray

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def edges(self) -> list[tuple[int, int]]:
        n = self.n
        return [(i, k) for i in range(n) for k in range(i + 1, n) if self.present[i, k]]

    def fully_connected(self) -> bool:
        n = self.n
        return all(self.present[i, k] for i in range(n) for k in range(i + 1, n))


def bond_probabilities(j, beta: float) -> BondGraph:
    if beta <= 0:
        raise ValueError("beta must be positive")
    jm = _as_matrix(j)
    present = jm > 0
    np.fill_diagonal(present, False)
    p = np.where(present, -np.expm1(-beta * jm), 0.0)
    return BondGraph(p, present)


def extract_bond_clusters(g: BondGraph, threshold: float = 0.5,
                          spins: Sequence[int] | None = None) -> list[list[int]]:
    """Connected components of occupied bonds under the deterministic rule.

    A present edge is vacant when ``p > threshold`` and occupied otherwise.
    Without ``spins``, pairs lacking an edge behave as ``p = 0`` (occupied).
    With ``spins``, bonds follow the spin-conditional law read deterministically:
    parallel spins are always bonded, and antiparallel spins are bonded only
    across a present edge with ``p <= threshold``.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    n = g.n
    ds = DisjointSet(n)
    for i in range(n):
        for k in range(i + 1, n):
            if spins is not None:
                if spins[i] == spins[k]:
                    ds.union(i, k)
                elif g.present[i, k] and g.p[i, k] <= threshold:
                    ds.union(i, k)
            elif not g.present[i, k] or g.p[i, k] <= threshold:
                ds.union(i, k)
    return ds.groups()


def bond_clusters(bonds: Mapping[tuple[int, int], int], n: int) -> list[list[int]]:
    ds = DisjointSet(n)
    for (i, k), v in bonds.items():
        if v:
            ds.union(i, k)
    return ds.groups()


def joint_weight(spins: Sequence[int], bonds: Mapping[tuple[int, int], int], g: BondGraph) -> float:
    """Unnormalized joint spin/bond weight over the present edges."""
    w = 1.0
    for i, k in g.edges():
        p = g.p[i, k]
        if bonds[(i, k)]:
            w *= 1.0 - p
        elif spins[i] != spins[k]:
            w *= p
        else:
            return 0.0
    return w


def _boltzmann(spins: Sequence[int], jm: np.ndarray, beta: float) -> float:
    n = len(spins)
    e = 0.0
    for i in range(n):
        for k in range(i + 1, n):
            if spins[i] == spins[k]:
                e += jm[i, k]
    return math.exp(-beta * e)


def _all_bond_states(edges):
    for bits in product((0, 1), repeat=len(edges)):
        yield dict(zip(edges, bits))


def _guard(n: int, q: int, n_edges: int) -> None:
    if q ** n * 2 ** n_edges > MAX_STATES:
        raise TooLarge(f"{q}^{n} * 2^{n_edges} states exceed {MAX_STATES}")


def verify_marginals(g: BondGraph, j, beta: float, q: int, report: dict | None = None) -> tuple[float, float]:
    """Total-variation distances of (spin marginal vs Boltzmann, bond conditional vs closed form).

    Pass a dict as ``report`` to also receive the largest bond-cluster count
    seen among states of nonzero weight.
    """
    jm = _as_matrix(j)
    n = g.n
    edges = g.edges()
    _guard(n, q, len(edges))
    spin_states = list(product(range(1, q + 1), repeat=n))
    bond_states = list(_all_bond_states(edges))
    weights = np.array([[joint_weight(s, b, g) for b in bond_states] for s in spin_states])
    full = g.fully_connected()
    max_clusters = 0
    bound_ok = True
    for si, s in enumerate(spin_states):
        for bi, b in enumerate(bond_states):
            if weights[si, bi] > 0:
                c = len(bond_clusters(b, n))
                max_clusters = max(max_clusters, c)
                if full and c > q:
                    bound_ok = False

    marg = weights.sum(axis=1)
    marg = marg / marg.sum()
    boltz = np.array([_boltzmann(s, jm, beta) for s in spin_states])
    boltz /= boltz.sum()
    tv_spin = 0.5 * float(np.abs(marg - boltz).sum())

    tv_cond = 0.0
    for si, s in enumerate(spin_states):
        row = weights[si]
        z = row.sum()
        if z <= 0:
            continue
        closed = np.empty(len(bond_states))
        for bi, b in enumerate(bond_states):
            pr = 1.0
            for (i, k) in edges:
                p = g.p[i, k]
                if s[i] == s[k]:
                    pr *= 1.0 if b[(i, k)] else 0.0
                else:
                    pr *= (1.0 - p) if b[(i, k)] else p
            closed[bi] = pr
        tv_cond = max(tv_cond, 0.5 * float(np.abs(row / z - closed).sum()))

    if report is not None:
        report.update(max_bond_clusters=max_clusters, cluster_bound_holds=bound_ok,
                      fully_connected=full, spin_states=len(spin_states),
                      bond_states=len(bond_states))
    return tv_spin, tv_cond


def _compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def surjections(n: int, m: int) -> int:
    """Number of maps from an n-set onto an m-set."""
    return sum((-1) ** i * comb(m, i) * (m - i) ** n for i in range(m + 1))


def spin_sum_factor(sizes: Sequence[int], q: int) -> int:
    """Exact number of q-colourings in which different bond-clusters share no colour."""
    c = len(sizes)
    if c > q:
        return 0
    total = 0
    for alloc in _compositions(q, c + 1):
        used = alloc[:c]
        if any(u == 0 for u in used):
            continue
        ways = factorial(q)
        for u in alloc:
            ways //= factorial(u)
        for size, u in zip(sizes, used):
            ways *= surjections(size, u)
            if ways == 0:
                break
        total += ways
    return total


def allotment_factor(sizes: Sequence[int], q: int) -> int:
    """Colour-allocation sum in its textbook form: every colour is allotted to some
    cluster and each cluster may use any of its allotted colours. Overcounts
    when 1 < C < q because unused allotted colours are counted repeatedly."""
    c = len(sizes)
    if c > q:
        return 0
    total = 0
    for alloc in _compositions(q, c):
        ways = factorial(q)
        for u in alloc:
            ways //= factorial(u)
        for size, u in zip(sizes, alloc):
            ways *= u ** size
            if ways == 0:
                break
        total += ways
    return total


def graph_distribution_weight(bonds: Mapping[tuple[int, int], int], g: BondGraph, q: int) -> float:
    """Unnormalized weight of a bond state with the spins summed out.

    Valid for fully connected graphs whose vacant bonds all run between
    different bond-clusters; raises :class:`NotGroundStateForm` otherwise.
    """
    if not g.fully_connected():
        raise ValueError("graph is not fully connected")
    n = g.n
    groups = bond_clusters(bonds, n)
    label = {}
    for gi, grp in enumerate(groups):
        for x in grp:
            label[x] = gi
    w = 1.0
    for (i, k), v in bonds.items():
        if v:
            w *= 1.0 - g.p[i, k]
        else:
            if label[i] == label[k]:
                raise NotGroundStateForm(f"vacant bond ({i}, {k}) inside a bond-cluster")
            w *= g.p[i, k]
    if len(groups) > q:
        return 0.0
    return spin_sum_factor([len(grp) for grp in groups], q) * w


def is_ground_state_form(bonds: Mapping[tuple[int, int], int], n: int) -> bool:
    groups = bond_clusters(bonds, n)
    label = {x: gi for gi, grp in enumerate(groups) for x in grp}
    return all(v or label[i] != label[k] for (i, k), v in bonds.items())


def exhaustive_spin_sum(bonds: Mapping[tuple[int, int], int], g: BondGraph, q: int) -> float:
    return float(sum(joint_weight(s, bonds, g) for s in product(range(1, q + 1), repeat=g.n)))


def random_interactions(n: int, rng: np.random.Generator, low: float = 0.05, high: float = 2.0) -> InteractionMatrix:
    """Fully connected symmetric positive interactions."""
    j = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    j[iu] = rng.uniform(low, high, size=len(iu[0]))
    return InteractionMatrix(j + j.T)


def graph_check(n: int, q: int, beta: float, seed: int) -> dict:
    """Marginal, conditional and spin-sum identities on one random tiny instance."""
    rng = np.random.default_rng(seed)
    jmat = random_interactions(n, rng)
    g = bond_probabilities(jmat, beta)
    info: dict = {}
    tv_spin, tv_cond = verify_marginals(g, jmat, beta, q, info)
    evaluable = 0
    worst = 0.0
    for b in _all_bond_states(g.edges()):
        if not is_ground_state_form(b, n):
            continue
        evaluable += 1
        exact = exhaustive_spin_sum(b, g, q)
        got = graph_distribution_weight(b, g, q)
        worst = max(worst, abs(got - exact))
    return {
        "n": n, "q": q, "beta": beta, "seed": seed,
        "tv_spin": tv_spin, "tv_cond": tv_cond,
        "evaluable_bond_states": evaluable, "max_spin_sum_error": worst,
        **info,
        "pass": bool(tv_spin <= 1e-10 and tv_cond <= 1e-10 and worst <= 1e-10
                     and info["cluster_bound_holds"]),
    }
