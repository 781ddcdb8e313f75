"""String-valued option enums shared across losses, estimators and trainers."""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Self

from .exceptions import ValidationError


class _Option(str, Enum):
    """Enum whose members parse case-insensitively from strings."""

    @classmethod
    def from_string(cls, value: "str | Self") -> Self:
        """Create a member from its string value.

        Args:
            value: Member or string representation (case-insensitive)

        Returns:
            The matching enum member

        Raises:
            ValidationError: If the value names no member
        """
        if isinstance(value, cls):
            return value
        normalized = str(value).strip().lower()
        for member in cls:
            if member.value == normalized:
                return member
        choices = ", ".join(member.value for member in cls)
        raise ValidationError(
            f"Invalid {cls.__name__}: {value!r}. Must be one of: {choices}."
        )


class VarianceMode(_Option):
    """VICReg variance penalty."""

    HINGE = "hinge"
    SQUARED = "squared"


class Metric(_Option):
    """Pairwise distance between embedding rows."""

    COSINE = "cosine"
    L2 = "l2"
    L2_SQUARED = "l2_squared"


class Regularizer(_Option):
    """Regularizer of the graph-estimation program."""

    LOG = "log"
    FROBENIUS = "frobenius"


class ConstraintSet(_Option):
    """Feasible set of estimated graphs."""

    SIMPLE = "simple"  # symmetric, nonnegative, zero diagonal
    RIGHT_STOCHASTIC = "right_stochastic"  # additionally rows sum to 1


class Matching(_Option):
    """Comparison between the relation graph and its estimate."""

    EUCLIDEAN = "euclidean"
    CROSS_ENTROPY = "cross_entropy"


class LossKind(_Option):
    """Self-supervised objective."""

    VICREG = "vicreg"
    SIMCLR = "simclr"
    BARLOW_TWINS = "barlow_twins"


class OptimizerKind(_Option):
    """First-order update rule."""

    SGD = "sgd"
    RMSPROP = "rmsprop"


class Preconditioner(_Option):
    """Preconditioner for the block eigensolver."""

    IDENTITY = "identity"
    JACOBI = "jacobi"
