"""Clustering Dempster-Shafer evidence by mean-field annealing of an antiferromagnetic Potts model."""

from ._kernels import BACKEND
from .annealer import (
    AnnealConfig,
    ClusterAssignment,
    InteractionMatrix,
    MeanFieldState,
    anneal,
    build_interactions,
    critical_temperature,
    energy,
    mean_field_sweep,
)
from .evidence import (
    FrameOfDiscernment,
    MassFunction,
    Partition,
    SimpleSupport,
    belief,
    cluster_conflict,
    combine,
    linearized_conflict,
    metaconflict,
    pairwise_conflict,
    plausibility,
)
from .oracle import OracleResult, enumerate_min, linearization_gap

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AnnealConfig", "ClusterAssignment", "InteractionMatrix", "MeanFieldState",
    "anneal", "build_interactions", "critical_temperature", "energy", "mean_field_sweep",
    "FrameOfDiscernment", "MassFunction", "Partition", "SimpleSupport", "belief",
    "cluster_conflict", "combine", "linearized_conflict", "metaconflict", "pairwise_conflict",
    "plausibility", "OracleResult", "enumerate_min", "linearization_gap",
]
