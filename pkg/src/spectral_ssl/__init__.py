"""spectral-ssl - self-supervised losses as spectral embedding of relation graphs."""

from .closed_form import (
    barlow_twins_optimal,
    cca_weights,
    classical_mds,
    classical_mds_from_distances,
    laplacian_eigenmap,
    lpp_lda_weights,
    selection_loss,
    simclr_optimal,
    vicreg_bordered_matrix,
    vicreg_combined_matrix,
    vicreg_linear_optimum,
    vicreg_linear_weights,
    vicreg_optimal,
    vicreg_optimal_sparse,
    vicreg_selection,
)
from .config import (
    CONVERGENCE_GAP_SQ,
    DEFAULT_EPS,
    DEFAULT_TAU,
    DENSE_GRAPH_LIMIT,
    DIVERGENCE_LOSS,
    LOBPCG_MAX_ITER,
    LOBPCG_TOL,
    RANK_TOL,
    RIDGE_SCALE,
    SYMMETRY_TOL,
    LossConfig,
    OptimizerConfig,
    RuntimeConfig,
)
from .downstream import (
    least_squares_probe,
    minimal_probe_loss,
    probe_accuracy,
    probe_null_space,
    probe_solution_family,
    rank_bound_gap,
    span_condition,
)
from .eigensolver import (
    generalized_topk,
    lobpcg_topk,
    max_principal_angle,
    numerical_rank,
    svd,
    sym_eig,
)
from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    DegenerateGraphError,
    DivergenceError,
    ExperimentError,
    GraphFormatError,
    ShapeMismatchError,
    SingularMatrixError,
    SpectralSSLError,
    UnknownExperimentError,
    ValidationError,
)
from .graph import (
    build_clique_graph,
    build_supervised_graph,
    build_view_graph,
    dirichlet_energy,
    laplacian,
    pair_expand,
    relation_rank,
)
from .graph_estimation import estimate_graph, pairwise_distance
from .losses import (
    barlow_twins_loss,
    infonce_loss,
    simclr_loss,
    vicreg_loss,
)
from .messages import ErrorMessages, LogMessages
from .models import ExperimentReport, ExperimentSpec, RelationGraph, Trajectory
from .options import (
    ConstraintSet,
    LossKind,
    Matching,
    Metric,
    OptimizerKind,
    Preconditioner,
    Regularizer,
    VarianceMode,
)

__all__ = [
    # Config
    "CONVERGENCE_GAP_SQ",
    "DEFAULT_EPS",
    "DEFAULT_TAU",
    "DENSE_GRAPH_LIMIT",
    "DIVERGENCE_LOSS",
    "LOBPCG_MAX_ITER",
    "LOBPCG_TOL",
    "RANK_TOL",
    "RIDGE_SCALE",
    "SYMMETRY_TOL",
    "LossConfig",
    "OptimizerConfig",
    "RuntimeConfig",
    # Options
    "ConstraintSet",
    "LossKind",
    "Matching",
    "Metric",
    "OptimizerKind",
    "Preconditioner",
    "Regularizer",
    "VarianceMode",
    # Models
    "ExperimentReport",
    "ExperimentSpec",
    "RelationGraph",
    "Trajectory",
    # Exceptions
    "SpectralSSLError",
    "ValidationError",
    "ShapeMismatchError",
    "GraphFormatError",
    "DegenerateGraphError",
    "SingularMatrixError",
    "ConvergenceError",
    "DivergenceError",
    "ExperimentError",
    "UnknownExperimentError",
    "ConfigurationError",
    # Graph
    "build_clique_graph",
    "build_supervised_graph",
    "build_view_graph",
    "dirichlet_energy",
    "laplacian",
    "pair_expand",
    "relation_rank",
    # Losses and graph estimation
    "barlow_twins_loss",
    "estimate_graph",
    "infonce_loss",
    "pairwise_distance",
    "simclr_loss",
    "vicreg_loss",
    # Eigensolvers
    "generalized_topk",
    "lobpcg_topk",
    "max_principal_angle",
    "numerical_rank",
    "svd",
    "sym_eig",
    # Closed-form optima
    "barlow_twins_optimal",
    "cca_weights",
    "classical_mds",
    "classical_mds_from_distances",
    "laplacian_eigenmap",
    "lpp_lda_weights",
    "selection_loss",
    "simclr_optimal",
    "vicreg_bordered_matrix",
    "vicreg_combined_matrix",
    "vicreg_linear_optimum",
    "vicreg_linear_weights",
    "vicreg_optimal",
    "vicreg_optimal_sparse",
    "vicreg_selection",
    # Downstream
    "least_squares_probe",
    "minimal_probe_loss",
    "probe_accuracy",
    "probe_null_space",
    "probe_solution_family",
    "rank_bound_gap",
    "span_condition",
    # Messages
    "ErrorMessages",
    "LogMessages",
]

__version__ = "1.0.0"
