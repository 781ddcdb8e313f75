"""Argument validation for matrices, embeddings and dimensions."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import SYMMETRY_TOL
from .exceptions import ShapeMismatchError, ValidationError
from .messages import ErrorMessages


def validate_matrix(value: ArrayLike, name: str = "matrix") -> NDArray[np.float64]:
    """Validate that a value is a finite 2-D float array.

    Args:
        value: Array-like input
        name: Name used in error messages

    Returns:
        The input as a float64 ndarray

    Raises:
        ValidationError: If the input is not 2-D or has non-finite entries
    """
    array = np.asarray(value, dtype=float)
    if array.ndim != 2:
        raise ValidationError(ErrorMessages.NOT_MATRIX.format(name=name, ndim=array.ndim))
    if not np.all(np.isfinite(array)):
        raise ValidationError(ErrorMessages.NOT_FINITE.format(name=name))
    return array


def validate_embedding(value: ArrayLike, name: str = "z") -> NDArray[np.float64]:
    """Validate an N×K embedding.

    Args:
        value: Array-like input
        name: Name used in error messages

    Returns:
        The embedding as a float64 ndarray

    Raises:
        ValidationError: If the embedding is not a finite 2-D array
    """
    return validate_matrix(value, name)


def validate_square(value: ArrayLike, name: str = "matrix") -> NDArray[np.float64]:
    """Validate a finite square matrix.

    Raises:
        ValidationError: If the matrix is not square
    """
    array = validate_matrix(value, name)
    if array.shape[0] != array.shape[1]:
        raise ValidationError(ErrorMessages.NOT_SQUARE.format(name=name, shape=array.shape))
    return array


def validate_symmetric(
    value: ArrayLike, name: str = "matrix", tol: float = SYMMETRY_TOL
) -> NDArray[np.float64]:
    """Validate a finite symmetric matrix.

    Asymmetry is measured relative to max(1, max|A|).

    Args:
        value: Array-like input
        name: Name used in error messages
        tol: Relative asymmetry tolerance

    Returns:
        The matrix as a float64 ndarray

    Raises:
        ValidationError: If the matrix is not square or not symmetric
    """
    array = validate_square(value, name)
    if array.size == 0:
        return array
    asymmetry = float(np.max(np.abs(array - array.T)))
    scale = max(1.0, float(np.max(np.abs(array))))
    if asymmetry > tol * scale:
        raise ValidationError(
            ErrorMessages.NOT_SYMMETRIC.format(name=name, asymmetry=asymmetry)
        )
    return array


def validate_same_rows(
    left: NDArray, right: NDArray, left_name: str = "left", right_name: str = "right"
) -> None:
    """Validate that two arrays have the same number of rows.

    Raises:
        ShapeMismatchError: If row counts differ
    """
    if left.shape[0] != right.shape[0]:
        raise ShapeMismatchError(
            (left.shape[0],),
            (right.shape[0],),
            ErrorMessages.ROW_MISMATCH.format(
                left=left_name,
                left_rows=left.shape[0],
                right=right_name,
                right_rows=right.shape[0],
            ),
        )


def validate_dimension(value: int, name: str, low: int, high: int) -> int:
    """Validate an integer dimension against inclusive bounds.

    Args:
        value: The dimension to validate
        name: Name used in error messages
        low: Inclusive lower bound
        high: Inclusive upper bound

    Returns:
        The validated dimension

    Raises:
        ValidationError: If the value is not an integer or out of range
    """
    if isinstance(value, bool) or not isinstance(value, int | np.integer):
        raise ValidationError(f"{name} must be an integer.")
    if not low <= value <= high:
        raise ValidationError(ErrorMessages.dimension_range(name, int(value), low, high))
    return int(value)


def validate_positive(value: float, name: str) -> float:
    """Validate a strictly positive real.

    Raises:
        ValidationError: If the value is not positive
    """
    if not value > 0:
        raise ValidationError(ErrorMessages.NOT_POSITIVE.format(name=name, value=value))
    return float(value)


def validate_nonnegative(value: float, name: str) -> float:
    """Validate a nonnegative real.

    Raises:
        ValidationError: If the value is negative
    """
    if value < 0:
        raise ValidationError(f"{name} must be nonnegative, got {value}.")
    return float(value)


def validate_labels(labels: ArrayLike) -> NDArray[np.int64]:
    """Validate a 1-D integer label vector.

    Raises:
        ValidationError: If labels are not a 1-D integer-valued vector
    """
    array = np.asarray(labels)
    if array.ndim != 1:
        raise ValidationError("labels must be a 1-D vector.")
    if array.size and not np.all(np.equal(np.mod(array, 1), 0)):
        raise ValidationError("labels must be integers.")
    return array.astype(np.int64)
