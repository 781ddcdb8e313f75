"""Centralized configuration and constants for spectral-ssl."""

import os
from dataclasses import dataclass
from typing import Final

from .exceptions import ConfigurationError, ValidationError
from .options import (
    ConstraintSet,
    Metric,
    OptimizerKind,
    Regularizer,
    VarianceMode,
)

# Numerical tolerances
RANK_TOL: Final[float] = 1e-10  # relative to the largest singular value
SYMMETRY_TOL: Final[float] = 1e-8
RIDGE_SCALE: Final[float] = 1e-8  # ridge = RIDGE_SCALE * trace / D
DEFAULT_EPS: Final[float] = 1e-12

# Graph storage
DENSE_GRAPH_LIMIT: Final[int] = 4096

# Losses and graph estimation
DEFAULT_TAU: Final[float] = 1.0
DEFAULT_ALPHA_BT: Final[float] = 0.005
SMALL_GAMMA: Final[float] = 1e-3

# Block eigensolver
LOBPCG_TOL: Final[float] = 1e-9
LOBPCG_MAX_ITER: Final[int] = 500
LOBPCG_PADDING: Final[int] = 4

# Training
RMSPROP_DECAY: Final[float] = 0.99
RMSPROP_EPS: Final[float] = 1e-8
DEFAULT_LEARNING_RATE: Final[float] = 1e-3
DEFAULT_MAX_STEPS: Final[int] = 5000
DEFAULT_RECORD_EVERY: Final[int] = 50
DIVERGENCE_LOSS: Final[float] = 1e12
DIVERGENCE_CHECK_EVERY: Final[int] = 10  # steps between loss checks
CONVERGENCE_GAP_SQ: Final[float] = 1e-4
SPAN_ANGLE_TOL: Final[float] = 1e-6  # radians

# Experiments
LANDSCAPE_POINTS: Final[int] = 32
DEFAULT_OUTPUT_DIR: Final[str] = "results"
DEFAULT_SEED: Final[int] = 0
LOG_LEVELS: Final[tuple[str, ...]] = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class LossConfig:
    """Hyperparameters of the three self-supervised losses.

    Attributes:
        alpha: VICReg variance weight
        beta: VICReg covariance weight
        gamma: VICReg invariance weight
        tau: Temperature of the graph estimate
        eps: Normalization guard for cosines
        alpha_bt: BarlowTwins off-diagonal weight
        variance_mode: Hinge (published loss) or squared (analysis form)
        metric: Distance used by the SimCLR graph estimate
        regularizer: Regularizer of the SimCLR graph estimate
        constraint: Feasible set of the SimCLR graph estimate
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.1
    tau: float = DEFAULT_TAU
    eps: float = DEFAULT_EPS
    alpha_bt: float = DEFAULT_ALPHA_BT
    variance_mode: VarianceMode = VarianceMode.HINGE
    metric: Metric = Metric.COSINE
    regularizer: Regularizer = Regularizer.LOG
    constraint: ConstraintSet = ConstraintSet.RIGHT_STOCHASTIC

    def __post_init__(self) -> None:
        """Validate field ranges and coerce option strings.

        Raises:
            ValidationError: If a weight is negative or tau/eps not positive
        """
        for name in ("alpha", "beta", "gamma", "alpha_bt"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be nonnegative.")
        if self.tau <= 0:
            raise ValidationError("tau must be positive.")
        if self.eps <= 0:
            raise ValidationError("eps must be positive.")
        object.__setattr__(
            self, "variance_mode", VarianceMode.from_string(self.variance_mode)
        )
        object.__setattr__(self, "metric", Metric.from_string(self.metric))
        object.__setattr__(
            self, "regularizer", Regularizer.from_string(self.regularizer)
        )
        object.__setattr__(
            self, "constraint", ConstraintSet.from_string(self.constraint)
        )

    @classmethod
    def analysis(cls, alpha: float = 1.0, gamma: float = 0.0) -> "LossConfig":
        """Squared-variance VICReg config with beta tied to alpha.

        This is the setting in which the closed-form optimum applies.
        """
        return cls(
            alpha=alpha, beta=alpha, gamma=gamma, variance_mode=VarianceMode.SQUARED
        )


@dataclass(frozen=True)
class OptimizerConfig:
    """First-order optimizer settings.

    Attributes:
        kind: SGD or RMSProp
        learning_rate: Step size
        decay: Second-moment EMA decay (RMSProp only)
        eps: Denominator guard (RMSProp only)
        max_steps: Number of update steps
        seed: Seed recorded with the trajectory
        record_every: Trajectory sampling period in steps
        final_learning_rate: When set, the step size is held for the first
            half of max_steps, then decays geometrically to this value
    """

    kind: OptimizerKind = OptimizerKind.RMSPROP
    learning_rate: float = DEFAULT_LEARNING_RATE
    decay: float = RMSPROP_DECAY
    eps: float = RMSPROP_EPS
    max_steps: int = DEFAULT_MAX_STEPS
    seed: int = DEFAULT_SEED
    record_every: int = DEFAULT_RECORD_EVERY
    final_learning_rate: float | None = None

    def __post_init__(self) -> None:
        """Validate field ranges.

        Raises:
            ValidationError: If any field is out of range
        """
        object.__setattr__(self, "kind", OptimizerKind.from_string(self.kind))
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive.")
        if not 0 <= self.decay < 1:
            raise ValidationError("decay must lie in [0, 1).")
        if self.eps <= 0:
            raise ValidationError("eps must be positive.")
        if self.max_steps < 0:
            raise ValidationError("max_steps cannot be negative.")
        if self.record_every < 1:
            raise ValidationError("record_every must be at least 1.")
        if self.final_learning_rate is not None and not 0 < self.final_learning_rate <= self.learning_rate:
            raise ValidationError("final_learning_rate must lie in (0, learning_rate].")

    def learning_rate_at(self, step: int) -> float:
        """Step size used for update number step (1-based)."""
        if self.final_learning_rate is None or self.max_steps < 2:
            return self.learning_rate
        half = self.max_steps // 2
        if step <= half:
            return self.learning_rate
        fraction = (step - half) / (self.max_steps - half)
        return self.learning_rate * (self.final_learning_rate / self.learning_rate) ** fraction


@dataclass(frozen=True)
class RuntimeConfig:
    """Process-level settings for the experiment runner."""

    log_level: str = "INFO"
    output_dir: str = DEFAULT_OUTPUT_DIR
    jobs: int = 1
    seed: int = DEFAULT_SEED

    @classmethod
    def from_env(cls) -> "RuntimeConfig":
        """Create a RuntimeConfig from environment variables.

        Environment Variables:
            SPECTRAL_SSL_LOG_LEVEL: Optional. Logging level. Defaults to "INFO".
            SPECTRAL_SSL_OUTPUT_DIR: Optional. Directory for reports.
                Defaults to "results".
            SPECTRAL_SSL_JOBS: Optional. Worker count for sweeps. Defaults to 1.
            SPECTRAL_SSL_SEED: Optional. Base seed. Defaults to 0.

        Returns:
            RuntimeConfig: A new instance populated from the environment.

        Raises:
            ConfigurationError: If a value cannot be parsed or is out of range.
        """
        log_level = os.getenv("SPECTRAL_SSL_LOG_LEVEL", "INFO").upper()
        if log_level not in LOG_LEVELS:
            raise ConfigurationError(
                f"SPECTRAL_SSL_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, "
                f"got '{log_level}'"
            )

        jobs = _int_from_env("SPECTRAL_SSL_JOBS", 1)
        if jobs < 1:
            raise ConfigurationError(f"SPECTRAL_SSL_JOBS must be >= 1, got {jobs}")

        return cls(
            log_level=log_level,
            output_dir=os.getenv("SPECTRAL_SSL_OUTPUT_DIR", DEFAULT_OUTPUT_DIR),
            jobs=jobs,
            seed=_int_from_env("SPECTRAL_SSL_SEED", DEFAULT_SEED),
        )


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name} must be a valid integer, got '{raw}'") from e
