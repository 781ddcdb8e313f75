"""Custom exceptions for spectral-ssl."""

from collections.abc import Iterable

import numpy as np


class SpectralSSLError(Exception):
    """Base exception for all spectral-ssl errors."""


class ValidationError(SpectralSSLError):
    """Raised when an argument fails validation."""


class ShapeMismatchError(ValidationError):
    """Raised when array shapes do not agree."""

    def __init__(
        self,
        expected: tuple[int, ...],
        actual: tuple[int, ...],
        message: str | None = None,
    ) -> None:
        """Initialize the exception.

        Args:
            expected: The shape the operation required
            actual: The shape that was supplied
            message: Optional custom message
        """
        self.expected = expected
        self.actual = actual
        if message is None:
            message = f"Shape mismatch: expected {expected}, got {actual}"
        super().__init__(message)


class GraphFormatError(ValidationError):
    """Raised when a serialized graph cannot be loaded."""


class DegenerateGraphError(SpectralSSLError):
    """Raised when a graph has isolated nodes or no edges where either is fatal."""

    def __init__(self, node: int | None = None, message: str | None = None) -> None:
        """Initialize the exception.

        Args:
            node: Index of the offending node, if a single node is at fault
            message: Optional custom message
        """
        self.node = node
        if message is None:
            message = (
                f"Node {node} has zero degree"
                if node is not None
                else "Graph has no edges"
            )
        super().__init__(message)


class SingularMatrixError(SpectralSSLError):
    """Raised when a matrix cannot be inverted even after ridge regularization."""


class ConvergenceError(SpectralSSLError):
    """Raised when an iterative eigensolver fails to reach its tolerance."""

    def __init__(self, residuals: Iterable[float], message: str | None = None) -> None:
        """Initialize the exception.

        Args:
            residuals: Residual norm per requested eigenpair
            message: Optional custom message
        """
        self.residuals = np.asarray(list(residuals), dtype=float)
        if message is None:
            worst = float(self.residuals.max()) if self.residuals.size else float("nan")
            message = f"Eigensolver did not converge (max residual {worst:.3e})"
        super().__init__(message)


class DivergenceError(SpectralSSLError):
    """Raised when a training run blows up."""

    def __init__(self, step: int, loss: float) -> None:
        """Initialize the exception.

        Args:
            step: Step at which divergence was detected
            loss: Loss value observed at that step
        """
        self.step = step
        self.loss = loss
        super().__init__(f"Training diverged at step {step} (loss={loss:.3e})")


class ExperimentError(SpectralSSLError):
    """Base exception for experiment-runner errors."""


class UnknownExperimentError(ExperimentError):
    """Raised when an experiment name is not registered."""

    def __init__(self, name: str, registered: Iterable[str]) -> None:
        """Initialize the exception.

        Args:
            name: The requested experiment name
            registered: Names that are available
        """
        self.name = name
        self.registered = sorted(registered)
        super().__init__(
            f"Unknown experiment '{name}'. "
            f"Registered experiments: {', '.join(self.registered)}"
        )


class ConfigurationError(SpectralSSLError):
    """Raised when configuration is invalid or missing."""
