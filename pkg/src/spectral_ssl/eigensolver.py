"""Symmetric eigensolvers, SVD and numerical rank.

Dense problems go through LAPACK (``scipy.linalg.eigh``/``svd``); large
sparse ones through LOBPCG using matrix-vector products only. Every
decomposition leaves here in a canonical form: eigenvalues descending,
largest-magnitude entry of each eigenvector positive, and eigenvectors of
(numerically) tied eigenvalues ordered lexicographically.
"""

import logging
import warnings

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, sparse
from scipy.sparse.linalg import LinearOperator, aslinearoperator, lobpcg

from .config import LOBPCG_MAX_ITER, LOBPCG_PADDING, LOBPCG_TOL, RANK_TOL, SYMMETRY_TOL
from .exceptions import ValidationError
from .messages import ErrorMessages, LogMessages
from .models.spectral import SingularTriplets, SpectralDecomposition
from .options import Preconditioner
from .validators import validate_dimension, validate_matrix, validate_symmetric

logger = logging.getLogger(__name__)

# Relative gap below which two eigenvalues count as tied
TIE_TOL = 1e-9
# Re-orthogonalize when a Gram-Schmidt pass keeps less than this norm fraction
REORTH_THRESHOLD = 0.7

OperatorLike = LinearOperator | NDArray[np.float64] | sparse.sparray | sparse.spmatrix


# =============================================================================
# Canonical form
# =============================================================================


def fix_signs(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    """Flip columns so the largest-magnitude entry of each is positive."""
    vectors = np.array(vectors, dtype=float)
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _canonicalize(
    values: NDArray[np.float64], vectors: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = fix_signs(vectors[:, order])

    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    start = 0
    while start < values.size:
        stop = start + 1
        while stop < values.size and values[start] - values[stop] <= TIE_TOL * scale:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            # lexsort treats the last key as primary: feed rows bottom-up
            perm = np.lexsort(-block[::-1, :])
            vectors[:, start:stop] = block[:, perm]
            values[start:stop] = values[start:stop][perm]
        start = stop
    return values, vectors


# =============================================================================
# Dense routines
# =============================================================================


def sym_eig(a: ArrayLike, symmetry_tol: float = SYMMETRY_TOL) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix, descending.

    Args:
        a: N×N symmetric matrix
        symmetry_tol: Relative asymmetry tolerated before rejecting the input

    Returns:
        SpectralDecomposition: All N eigenpairs in canonical form

    Raises:
        ValidationError: If a is not symmetric within symmetry_tol
    """
    a = validate_symmetric(a, "a", tol=symmetry_tol)
    values, vectors = linalg.eigh(0.5 * (a + a.T))
    values, vectors = _canonicalize(values, vectors)
    return SpectralDecomposition(values, vectors)


def svd(m: ArrayLike) -> SingularTriplets:
    """Thin SVD with singular values descending; returns (U, s, V)."""
    m = validate_matrix(m, "m")
    rows, cols = m.shape
    if min(rows, cols) == 0:
        rank = min(rows, cols)
        return SingularTriplets(np.zeros((rows, rank)), np.zeros(rank), np.zeros((cols, rank)))
    u, s, vt = linalg.svd(m, full_matrices=False)
    return SingularTriplets(u, s, vt.T)


def numerical_rank(singular_values: ArrayLike, tol_rel: float = RANK_TOL) -> int:
    """Count singular values above tol_rel times the largest one."""
    values = np.abs(np.asarray(singular_values, dtype=float))
    if values.size == 0:
        return 0
    top = float(values.max())
    if top == 0:
        return 0
    return int(np.sum(values > tol_rel * top))


def psd_sqrt(a: ArrayLike) -> NDArray[np.float64]:
    """Principal square root of a symmetric matrix, negative modes clamped."""
    spectrum = sym_eig(a)
    values = _clamped(spectrum.eigenvalues)
    return (spectrum.eigenvectors * np.sqrt(values)) @ spectrum.eigenvectors.T


def psd_inverse_sqrt(a: ArrayLike) -> NDArray[np.float64]:
    """Pseudo-inverse square root; modes at or below rank_tol are dropped."""
    spectrum = sym_eig(a)
    values = _clamped(spectrum.eigenvalues)
    inverse = np.zeros_like(values)
    kept = values > 0
    inverse[kept] = 1.0 / np.sqrt(values[kept])
    return (spectrum.eigenvectors * inverse) @ spectrum.eigenvectors.T


def _clamped(values: NDArray[np.float64]) -> NDArray[np.float64]:
    if values.size == 0:
        return values
    cutoff = RANK_TOL * float(np.max(np.abs(values)))
    return np.where(values > cutoff, values, 0.0)


def max_principal_angle(a: ArrayLike, b: ArrayLike) -> float:
    """Largest principal angle (radians) between two column spaces."""
    a = validate_matrix(a, "a")
    b = validate_matrix(b, "b")
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0.0
    return float(np.max(linalg.subspace_angles(a, b)))


# =============================================================================
# Operators
# =============================================================================


def as_operator(matrix: OperatorLike) -> LinearOperator:
    """Wrap a dense or sparse matrix as a LinearOperator."""
    if isinstance(matrix, LinearOperator):
        return matrix
    return aslinearoperator(matrix)


def check_operator_symmetry(
    op: OperatorLike, seed: int = 0, trials: int = 3, tol: float = 1e-10
) -> float:
    """Measure |uᵀAv − vᵀAu| on random vectors.

    The bound is tol·||u||·||v|| scaled by the operator's observed gain.

    Returns:
        The largest relative asymmetry observed

    Raises:
        ValidationError: If the operator is not square or is not symmetric
    """
    op = as_operator(op)
    n, m = op.shape
    if n != m:
        raise ValidationError(ErrorMessages.NOT_SQUARE.format(name="operator", shape=op.shape))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(n)
        v = rng.standard_normal(n)
        av, au = op.matvec(v), op.matvec(u)
        gain = max(1.0, np.linalg.norm(av) / np.linalg.norm(v), np.linalg.norm(au) / np.linalg.norm(u))
        asymmetry = abs(u @ av - v @ au) / (np.linalg.norm(u) * np.linalg.norm(v) * gain)
        worst = max(worst, float(asymmetry))
    if worst > tol:
        raise ValidationError(
            ErrorMessages.NOT_SYMMETRIC.format(name="operator", asymmetry=worst)
        )
    return worst


def orthonormalize(block: ArrayLike) -> NDArray[np.float64]:
    """Modified Gram-Schmidt with re-orthogonalization.

    A second pass runs whenever a pass keeps less than 70% of a column's norm.

    Raises:
        ValidationError: If the columns are linearly dependent
    """
    q = np.array(block, dtype=float)
    for j in range(q.shape[1]):
        v = q[:, j]
        reference = np.linalg.norm(v)
        norm = reference
        for _ in range(3):
            for i in range(j):
                v -= (q[:, i] @ v) * q[:, i]
            norm = np.linalg.norm(v)
            if norm >= REORTH_THRESHOLD * reference:
                break
            reference = norm
        if norm == 0:
            raise ValidationError("Block columns are linearly dependent.")
        q[:, j] = v / norm
    return q


def _residual_norms(
    op: LinearOperator, values: NDArray[np.float64], vectors: NDArray[np.float64]
) -> NDArray[np.float64]:
    applied = np.asarray(op.matmat(vectors))
    return np.linalg.norm(applied - vectors * values, axis=0)


def lobpcg_topk(
    op: OperatorLike,
    k: int,
    tol: float = LOBPCG_TOL,
    max_iter: int = LOBPCG_MAX_ITER,
    seed: int = 0,
    preconditioner: Preconditioner | str = Preconditioner.IDENTITY,
    diagonal: ArrayLike | None = None,
) -> SpectralDecomposition:
    """Top-k eigenpairs of a symmetric operator by LOBPCG.

    The block carries k + min(k, 4) vectors; the extra ones are discarded.
    Problems too small for a block method (n < 5·block) are solved densely.
    Non-convergence is not an error here: the result comes back with
    ``converged=False`` and its residual norms.

    Args:
        op: Symmetric operator, dense or sparse matrix
        k: Number of eigenpairs
        tol: Residual tolerance, per pair ||Av − λv|| ≤ tol·|λ| + tol
        max_iter: Iteration cap
        seed: Seed of the initial block
        preconditioner: "identity" or "jacobi"
        diagonal: Operator diagonal, required for the Jacobi preconditioner

    Returns:
        SpectralDecomposition: k eigenpairs with residual norms

    Raises:
        ValidationError: If k is out of range or the Jacobi diagonal is missing
    """
    op = as_operator(op)
    n = op.shape[0]
    k = validate_dimension(k, "k", 1, n)
    preconditioner = Preconditioner.from_string(preconditioner)
    block = min(n, k + min(k, LOBPCG_PADDING))

    if n < 5 * block:
        logger.debug(LogMessages.DENSE_FALLBACK, n)
        dense = np.asarray(op.matmat(np.eye(n)))
        top = sym_eig(0.5 * (dense + dense.T)).top(k)
        residuals = _residual_norms(op, top.eigenvalues, top.eigenvectors)
        return SpectralDecomposition(top.eigenvalues, top.eigenvectors, residuals=residuals)

    m = None
    if preconditioner is Preconditioner.JACOBI:
        if diagonal is None:
            raise ValidationError("Jacobi preconditioner needs the operator diagonal.")
        entries = np.asarray(diagonal, dtype=float)
        inverse = 1.0 / np.where(np.abs(entries) > RANK_TOL, entries, 1.0)
        m = LinearOperator((n, n), matvec=lambda v: inverse * np.ravel(v), dtype=float)

    logger.debug(LogMessages.LOBPCG_START, n, k, block, preconditioner.value)
    rng = np.random.default_rng(seed)
    x0 = orthonormalize(rng.standard_normal((n, block)))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        values, vectors = lobpcg(op, x0, M=m, tol=tol, maxiter=max_iter, largest=True)
    for warning in caught:
        logger.debug(LogMessages.SOLVER_WARNING, warning.message)

    values, vectors = _canonicalize(np.asarray(values, dtype=float), np.asarray(vectors))
    values, vectors = values[:k], vectors[:, :k]
    residuals = _residual_norms(op, values, vectors)
    converged = bool(np.all(residuals <= tol * np.abs(values) + tol))
    if not converged:
        logger.warning(LogMessages.LOBPCG_NOT_CONVERGED, float(residuals.max()), tol)
    return SpectralDecomposition(values, vectors, residuals=residuals, converged=converged)


def generalized_topk(a_op: OperatorLike, b: ArrayLike, k: int) -> SpectralDecomposition:
    """Top-k solutions of A·v = λ·B·v for symmetric A and SPD B.

    B = C·Cᵀ is factored by Cholesky and the pencil reduced to the standard
    problem C⁻¹·A·C⁻ᵀ. Returned eigenvectors are B-orthonormal.

    Args:
        a_op: Symmetric matrix or operator
        b: Symmetric positive definite matrix
        k: Number of eigenpairs

    Returns:
        SpectralDecomposition: k generalized eigenpairs, descending

    Raises:
        ValidationError: If B is not SPD or shapes disagree
    """
    b = validate_symmetric(b, "b")
    n = b.shape[0]
    k = validate_dimension(k, "k", 1, n)
    if isinstance(a_op, LinearOperator):
        a = np.asarray(a_op.matmat(np.eye(n)))
    elif sparse.issparse(a_op):
        a = a_op.toarray()
    else:
        a = np.asarray(a_op, dtype=float)
    a = validate_symmetric(a, "a")
    if a.shape != b.shape:
        raise ValidationError(f"A has shape {a.shape} but B has shape {b.shape}.")

    try:
        c = linalg.cholesky(0.5 * (b + b.T), lower=True)
    except linalg.LinAlgError as e:
        raise ValidationError(ErrorMessages.NOT_SPD) from e

    left = linalg.solve_triangular(c, a, lower=True)
    standard = linalg.solve_triangular(c, left.T, lower=True)
    top = sym_eig(0.5 * (standard + standard.T)).top(k)
    vectors = linalg.solve_triangular(c.T, top.eigenvectors, lower=False)
    return SpectralDecomposition(top.eigenvalues, fix_signs(vectors))
