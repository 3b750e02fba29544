"""Mean-field annealing of an antiferromagnetic Potts system built from evidence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from . import _kernels
from .evidence import EvidenceError, Partition, SimpleSupport
from .rng import CounterStream, derive_key

INTERACTION_CAP = 1e12
JACOBI_MAX_N = 256

# Equipartition weight by cluster count; anything not listed uses 0.
DEFAULT_ALPHA = {8: 1e-6, 10: 3e-7, 11: 3e-8}


class AnnealError(ValueError):
    pass


class DegenerateSpectrum(AnnealError):
    pass


def default_alpha(q: int) -> float:
    return DEFAULT_ALPHA.get(q, 0.0)


@dataclass(frozen=True)
class InteractionMatrix:
    j: np.ndarray
    capped: bool = False

    def __post_init__(self):
        j = np.asarray(self.j, dtype=np.float64)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise AnnealError("interaction matrix must be square")
        if np.any(np.diag(j) != 0.0) or not np.array_equal(j, j.T) or np.any(j < 0):
            raise AnnealError("interaction matrix must be symmetric, nonnegative, zero diagonal")
        j.setflags(write=False)
        object.__setattr__(self, "j", j)

    @property
    def n(self) -> int:
        return self.j.shape[0]


@dataclass(frozen=True)
class AnnealConfig:
    q: int
    tau: float = 0.9
    epsilon: float = 0.001
    alpha: float | None = None
    gamma: float = 0.5
    lam: float = 1.0
    sweep_tol: float = 0.01
    saturation_tol: float = 0.99
    max_sweeps_per_temp: int = 1000
    max_temps: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.alpha is None:
            object.__setattr__(self, "alpha", default_alpha(self.q))
        if self.q < 2:
            raise AnnealError("q must be at least 2")
        if not 0.0 < self.tau < 1.0:
            raise AnnealError("tau must lie in (0, 1)")
        if self.epsilon < 0 or self.alpha < 0:
            raise AnnealError("epsilon and alpha must be nonnegative")
        if self.gamma <= 0 or self.lam <= 0:
            raise AnnealError("gamma and lambda must be positive")
        if self.max_sweeps_per_temp < 1 or self.max_temps < 1:
            raise AnnealError("iteration caps must be positive")

    @classmethod
    def from_mapping(cls, doc: dict) -> "AnnealConfig":
        """Build from a flat key/value document; ``lambda`` is accepted for ``lam``."""
        doc = dict(doc)
        if "lambda" in doc:
            doc["lam"] = doc.pop("lambda")
        names = {f.name: f.type for f in fields(cls)}
        unknown = set(doc) - set(names)
        if unknown:
            raise AnnealError(f"unknown config keys: {sorted(unknown)}")
        ints = {"q", "max_sweeps_per_temp", "max_temps", "seed"}
        clean = {}
        for k, v in doc.items():
            if v is None:
                continue
            clean[k] = int(v) if k in ints else float(v)
        return cls(**clean)

    def to_mapping(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["lambda"] = d.pop("lam")
        return d


@dataclass
class MeanFieldState:
    v: np.ndarray
    temperature: float
    sweeps_done: int = 0
    temps_done: int = 0
    stream: CounterStream | None = field(default=None, repr=False)

    def saturation(self) -> float:
        return float((self.v * self.v).sum() / self.v.shape[0])


@dataclass(frozen=True)
class ClusterAssignment:
    partition: Partition
    saturation: float
    final_temperature: float
    energy: float
    initial_temperature: float = math.nan
    sweeps: int = 0
    temps: int = 0
    frozen: bool = True
    v: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def not_frozen(self) -> bool:
        return not self.frozen


def build_interactions(evidence: Sequence[SimpleSupport], lam: float = 1.0) -> InteractionMatrix:
    if len(evidence) < 2:
        raise AnnealError("need at least two pieces of evidence")
    if lam <= 0:
        raise AnnealError("lambda must be positive")
    frame = evidence[0].frame
    n = len(evidence)
    focal = [e.focal for e in evidence]
    s = np.array([e.support for e in evidence])
    j = np.zeros((n, n))
    capped = False
    for i in range(n):
        if evidence[i].frame != frame:
            raise EvidenceError("evidence on different frames")
        for k in range(i + 1, n):
            if focal[i] & focal[k]:
                continue
            prod = s[i] * s[k]
            if prod >= 1.0:
                w = INTERACTION_CAP
                capped = True
            else:
                w = min(-math.log1p(-prod) / lam, INTERACTION_CAP)
            j[i, k] = j[k, i] = w
    return InteractionMatrix(j, capped)


def _as_matrix(j) -> np.ndarray:
    return j.j if isinstance(j, InteractionMatrix) else np.asarray(j, dtype=np.float64)


def extreme_eigenvalues(m: np.ndarray) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric matrix."""
    m = np.ascontiguousarray(m, dtype=np.float64)
    n = m.shape[0]
    if n <= JACOBI_MAX_N:
        ev = _kernels.jacobi_eigenvalues(m)
        return float(ev[0]), float(ev[-1])
    # Gershgorin bounds make both shifted matrices positive semidefinite
    radius = np.abs(m).sum(axis=1) - np.abs(np.diag(m))
    lo = float((np.diag(m) - radius).min())
    hi = float((np.diag(m) + radius).max())
    eye = np.eye(n)
    cap = 10 * n
    lmax = lo + float(_kernels.power_iteration(m - lo * eye, 1e-8, cap))
    lmin = hi - float(_kernels.power_iteration(hi * eye - m, 1e-8, cap))
    return lmin, lmax


def critical_temperature(j, alpha: float, gamma: float, q: int) -> float:
    jm = _as_matrix(j)
    n = jm.shape[0]
    if n < 1:
        raise AnnealError("empty interaction matrix")
    m = jm + alpha - gamma * np.eye(n)
    lmin, lmax = extreme_eigenvalues(m)
    tc = max(-lmin, lmax) / q
    if not tc > 0:
        raise DegenerateSpectrum("critical temperature is not positive")
    return tc


def initial_state(n: int, cfg: AnnealConfig, temperature: float, stream: CounterStream) -> MeanFieldState:
    v = 1.0 / cfg.q + cfg.epsilon * stream.uniform(n * cfg.q).reshape(n, cfg.q)
    v /= v.sum(axis=1, keepdims=True)
    return MeanFieldState(v, temperature, stream=stream)


def mean_field_sweep(state: MeanFieldState, j, cfg: AnnealConfig, rng: CounterStream | None = None):
    """One serial update of every spin. Returns a new state and the mean absolute change."""
    jm = np.ascontiguousarray(_as_matrix(j))
    if state.v.shape != (jm.shape[0], cfg.q):
        raise AnnealError("state shape does not match interactions and q")
    stream = rng or state.stream or CounterStream(derive_key(cfg.seed))
    v = np.array(state.v, dtype=np.float64, copy=True)
    delta, counter = _kernels.sweep(
        jm, v, float(state.temperature), float(cfg.epsilon), float(cfg.alpha),
        float(cfg.gamma), np.uint64(stream.key), stream.counter,
    )
    stream.counter = int(counter)
    new = MeanFieldState(v, state.temperature, state.sweeps_done + 1, state.temps_done, stream)
    return new, float(delta)


def energy(s, j, cfg: AnnealConfig) -> float:
    """Potts energy of mean-field values, a one-hot matrix, or a Partition."""
    jm = _as_matrix(j)
    if isinstance(s, Partition):
        s = one_hot(s)
    s = np.asarray(s, dtype=np.float64)
    if s.shape[0] != jm.shape[0]:
        raise AnnealError("dimension mismatch")
    pair = 0.5 * float(np.einsum("ij,ia,ja->", jm, s, s))
    self_term = 0.5 * cfg.gamma * float((s * s).sum())
    balance = 0.5 * cfg.alpha * float((s.sum(axis=0) ** 2).sum())
    return pair - self_term + balance


def one_hot(p: Partition) -> np.ndarray:
    s = np.zeros((len(p.assignment), p.cluster_count))
    s[np.arange(len(p.assignment)), np.asarray(p.assignment) - 1] = 1.0
    return s


def partition_from_state(v: np.ndarray) -> Partition:
    # np.argmax returns the first maximum, i.e. the lowest cluster index on ties
    return Partition.from_zero_based(np.argmax(v, axis=1), v.shape[1])


def anneal_interactions(j, cfg: AnnealConfig, run_index: int = 0,
                        t_start: float | None = None) -> ClusterAssignment:
    """Run the full schedule on a prebuilt interaction matrix.

    ``t_start`` overrides the starting temperature, which otherwise is the
    critical temperature of ``j``.
    """
    jm = np.ascontiguousarray(_as_matrix(j))
    n = jm.shape[0]
    t0 = critical_temperature(jm, cfg.alpha, cfg.gamma, cfg.q) if t_start is None else float(t_start)
    stream = CounterStream(derive_key(cfg.seed, run_index))
    state = initial_state(n, cfg, t0, stream)
    v = state.v
    t_final, sweeps, temps, frozen, counter = _kernels.anneal_loop(
        jm, v, t0, float(cfg.tau), float(cfg.epsilon), float(cfg.alpha), float(cfg.gamma),
        float(cfg.sweep_tol), float(cfg.saturation_tol), int(cfg.max_sweeps_per_temp),
        int(cfg.max_temps), np.uint64(stream.key), stream.counter,
    )
    stream.counter = int(counter)
    part = partition_from_state(v)
    return ClusterAssignment(
        partition=part,
        saturation=float((v * v).sum() / n),
        final_temperature=float(t_final),
        energy=energy(part, jm, cfg),
        initial_temperature=t0,
        sweeps=int(sweeps),
        temps=int(temps),
        frozen=bool(frozen),
        v=v,
    )


def anneal(evidence: Sequence[SimpleSupport], cfg: AnnealConfig, run_index: int = 0) -> ClusterAssignment:
    """Cluster ``evidence`` into ``cfg.q`` subsets.

    A single piece of evidence is trivially placed in cluster 1. When the
    temperature cap is hit before saturation the argmax partition is still
    returned, with ``frozen=False``.
    """
    if len(evidence) == 0:
        raise AnnealError("no evidence")
    if len(evidence) == 1:
        p = Partition((1,), cfg.q)
        return ClusterAssignment(p, 1.0, math.nan, -0.5 * cfg.gamma + 0.5 * cfg.alpha,
                                 v=np.eye(1, cfg.q))
    j = build_interactions(evidence, cfg.lam)
    return anneal_interactions(j, cfg, run_index)


def best_of(evidence: Sequence[SimpleSupport], cfg: AnnealConfig, runs: int, score) -> ClusterAssignment:
    """Lowest ``score(partition)`` over ``runs`` independently seeded anneals."""
    j = build_interactions(evidence, cfg.lam)
    best = None
    best_score = math.inf
    for r in range(runs):
        res = anneal_interactions(j, cfg, r)
        sc = score(res.partition)
        if sc < best_score:
            best, best_score = res, sc
    return best


def with_seed(cfg: AnnealConfig, seed: int) -> AnnealConfig:
    return replace(cfg, seed=seed)
