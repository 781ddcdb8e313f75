"""Data models for spectral-ssl."""

from .experiment import CheckResult, ExperimentReport, ExperimentSpec
from .graph import Laplacian, RelationGraph, choose_storage
from .results import (
    ProbeResult,
    RankBoundGap,
    SpanCheck,
    Trajectory,
    TrajectoryPoint,
)
from .spectral import (
    CcaWeights,
    LaplacianEigenmap,
    LinearProjection,
    LinearVicregOptimum,
    Matrix,
    SimclrOptimum,
    SingularTriplets,
    SpectralDecomposition,
    Vector,
    VicregOptimum,
)

__all__ = [
    "CcaWeights",
    "CheckResult",
    "ExperimentReport",
    "ExperimentSpec",
    "Laplacian",
    "LaplacianEigenmap",
    "LinearProjection",
    "LinearVicregOptimum",
    "Matrix",
    "ProbeResult",
    "RankBoundGap",
    "RelationGraph",
    "SimclrOptimum",
    "SingularTriplets",
    "SpanCheck",
    "SpectralDecomposition",
    "Trajectory",
    "TrajectoryPoint",
    "Vector",
    "VicregOptimum",
    "choose_storage",
]
