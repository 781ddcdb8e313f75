"""Closed-form optima of the self-supervised losses.

VICReg's optimum is spectral in I − 11ᵀ/N − (γ/α)·L, computed densely or
through a sparse bordered matrix and LOBPCG. SimCLR's optimum is classical
MDS of G + I. In the linear regime VICReg yields whitened generalized
eigenvectors, LPP/LDA a scatter-matrix pencil and BarlowTwins CCA.
"""

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, sparse

from .config import LOBPCG_MAX_ITER, LOBPCG_TOL, RANK_TOL, RIDGE_SCALE
from .eigensolver import (
    fix_signs,
    generalized_topk,
    lobpcg_topk,
    psd_inverse_sqrt,
    sym_eig,
)
from .exceptions import (
    ConvergenceError,
    DegenerateGraphError,
    SingularMatrixError,
    ValidationError,
)
from .graph import degree, laplacian
from .messages import ErrorMessages, LogMessages
from .models.graph import RelationGraph
from .models.spectral import (
    CcaWeights,
    LaplacianEigenmap,
    LinearProjection,
    LinearVicregOptimum,
    SimclrOptimum,
    SpectralDecomposition,
    VicregOptimum,
)
from .options import Preconditioner
from .validators import (
    validate_dimension,
    validate_matrix,
    validate_nonnegative,
    validate_positive,
    validate_same_rows,
    validate_symmetric,
)

logger = logging.getLogger(__name__)


# =============================================================================
# VICReg on embeddings
# =============================================================================


def vicreg_combined_matrix(
    g: RelationGraph, alpha: float, gamma: float
) -> NDArray[np.float64]:
    """Return I − (1/N)·11ᵀ − (γ/α)·L(G) as a dense matrix.

    Raises:
        ValidationError: If alpha <= 0 or gamma < 0
    """
    alpha = validate_positive(alpha, "alpha")
    gamma = validate_nonnegative(gamma, "gamma")
    n = g.n
    matrix = np.eye(n) - np.full((n, n), 1.0 / n)
    if gamma:
        matrix -= (gamma / alpha) * laplacian(g).to_dense()
    return matrix


def _vicreg_from_spectrum(
    spectrum: SpectralDecomposition, n: int, alpha: float, gamma: float
) -> VicregOptimum:
    clamped = np.maximum(spectrum.eigenvalues, 0.0)
    z_star = spectrum.eigenvectors * np.sqrt(clamped * n)
    min_loss = alpha * (spectrum.k - float(np.sum(clamped**2)))
    return VicregOptimum(z_star, min_loss, spectrum, alpha, gamma)


def vicreg_optimal(g: RelationGraph, alpha: float, gamma: float, k: int) -> VicregOptimum:
    """Global minimizer of squared-variance VICReg with β = α.

    Z* = P·(N·max(Λ, 0))^{1/2} over the top-K eigenpairs of the combined
    matrix, with loss α·(K − Σ_{k≤K} max(λ_k, 0)²).

    Args:
        g: Relation graph
        alpha: Variance/covariance weight
        gamma: Invariance weight
        k: Embedding dimension, 1 <= k <= N

    Returns:
        VicregOptimum: Embedding, loss and top-K spectrum

    Raises:
        ValidationError: If k is out of range or alpha <= 0
    """
    k = validate_dimension(k, "k", 1, g.n)
    spectrum = sym_eig(vicreg_combined_matrix(g, alpha, gamma)).top(k)
    return _vicreg_from_spectrum(spectrum, g.n, alpha, gamma)


def vicreg_bordered_matrix(g: RelationGraph, alpha: float, gamma: float) -> sparse.csr_array:
    """Sparse (N+1)×(N+1) matrix [[0, 1ᵀ], [1, I − (γ/α)·L]].

    Its eigenvectors with a zero border coordinate are the combined
    matrix's zero-mean eigenvectors.
    """
    alpha = validate_positive(alpha, "alpha")
    gamma = validate_nonnegative(gamma, "gamma")
    n = g.n
    lap = laplacian(g.with_storage("sparse")).matrix
    inner = sparse.eye_array(n, format="csr") - (gamma / alpha) * lap
    ones = sparse.csr_array(np.ones((n, 1)))
    bordered = sparse.csr_array(
        sparse.block_array([[None, ones.T], [ones, inner]], format="csr")
    )
    bordered.sort_indices()
    return bordered


def vicreg_optimal_sparse(
    g: RelationGraph,
    alpha: float,
    gamma: float,
    k: int,
    tol: float = LOBPCG_TOL,
    max_iter: int = LOBPCG_MAX_ITER,
    seed: int = 0,
    preconditioner: Preconditioner | str = Preconditioner.IDENTITY,
) -> VicregOptimum:
    """VICReg optimum through LOBPCG on the sparse bordered matrix.

    The top eigenpair of the bordered matrix is the border mode (eigenvalue
    (1 + √(1 + 4N))/2); the next K are kept, the border coordinate dropped
    and columns renormalized.

    Raises:
        ConvergenceError: If LOBPCG misses its tolerance
        ValidationError: If k is out of range or alpha <= 0
    """
    k = validate_dimension(k, "k", 1, g.n)
    bordered = vicreg_bordered_matrix(g, alpha, gamma)
    spectrum = lobpcg_topk(
        bordered,
        k + 1,
        tol=tol,
        max_iter=max_iter,
        seed=seed,
        preconditioner=preconditioner,
        diagonal=bordered.diagonal(),
    )
    if not spectrum.converged:
        raise ConvergenceError(spectrum.residuals)

    border = int(np.argmax(np.abs(spectrum.eigenvectors[0, :])))
    keep = np.array([i for i in range(spectrum.k) if i != border])
    vectors = spectrum.eigenvectors[1:, keep]
    vectors = fix_signs(vectors / np.linalg.norm(vectors, axis=0))
    residuals = None if spectrum.residuals is None else spectrum.residuals[keep]
    inner = SpectralDecomposition(spectrum.eigenvalues[keep], vectors, residuals=residuals)
    return _vicreg_from_spectrum(inner, g.n, alpha, gamma)


def vicreg_selection(
    spectrum: SpectralDecomposition, columns: Sequence[int], n: int
) -> NDArray[np.float64]:
    """Embedding built from an arbitrary selection of eigen-columns.

    Column j is P_j·√(N·max(λ_j, 0)); the top-K selection is vicreg_optimal.
    """
    index = np.asarray(columns, dtype=np.int64)
    clamped = np.maximum(spectrum.eigenvalues[index], 0.0)
    return spectrum.eigenvectors[:, index] * np.sqrt(clamped * n)


def selection_loss(spectrum: SpectralDecomposition, columns: Sequence[int], alpha: float) -> float:
    """Squared-variance VICReg loss α·(K − Σ_selected max(λ, 0)²) of a selection."""
    index = np.asarray(columns, dtype=np.int64)
    clamped = np.maximum(spectrum.eigenvalues[index], 0.0)
    return alpha * (index.size - float(np.sum(clamped**2)))


def laplacian_eigenmap(g: RelationGraph, k: int) -> LaplacianEigenmap:
    """Solve min Tr(ZᵀLZ) subject to ZᵀDZ = I, skipping the constant mode.

    Raises:
        DegenerateGraphError: If a node is isolated (D is singular)
        ValidationError: If k is not in 1..N−1
    """
    k = validate_dimension(k, "k", 1, g.n - 1)
    degrees = degree(g)
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise DegenerateGraphError(node=int(isolated[0]))
    spectrum = generalized_topk(-laplacian(g).to_dense(), np.diag(degrees), k + 1)
    return LaplacianEigenmap(spectrum.eigenvectors[:, 1:], -spectrum.eigenvalues[1:])


# =============================================================================
# SimCLR and MDS
# =============================================================================


def _mds_embedding(spectrum: SpectralDecomposition, k: int) -> NDArray[np.float64]:
    clamped = np.maximum(spectrum.eigenvalues[:k], 0.0)
    return spectrum.eigenvectors[:, :k] * np.sqrt(clamped)


def classical_mds(gram: ArrayLike, k: int) -> NDArray[np.float64]:
    """Best rank-K PSD fit Z·Zᵀ of a symmetric Gram matrix."""
    gram = validate_symmetric(gram, "gram")
    k = validate_dimension(k, "k", 1, gram.shape[0])
    return _mds_embedding(sym_eig(gram), k)


def classical_mds_from_distances(d: ArrayLike, k: int) -> NDArray[np.float64]:
    """Classical MDS of a distance matrix via B = −½·H·(D∘D)·H."""
    d = validate_symmetric(d, "d")
    n = d.shape[0]
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    return classical_mds(-0.5 * centering @ (d**2) @ centering, k)


def simclr_optimal(
    g: RelationGraph | ArrayLike,
    k: int,
    tau: float | None = None,
    shift: float = 1.0,
) -> SimclrOptimum:
    """Spectral minimizer of SimCLR's Frobenius matching loss.

    Decomposes S = G + shift·I with negative eigenvalues clamped and returns
    U·Λ^{1/2} over the top-K pairs. With tau the embedding is scaled by
    √(τ/2), the Gram scale at which the Frobenius estimate of Z* equals G.
    min_loss = Σ_{k>K} σ_k(G)².

    Args:
        g: Relation graph, or a plain symmetric matrix
        k: Embedding dimension
        tau: Optional temperature of the Frobenius estimate
        shift: Diagonal shift; 1 for relation graphs, 0 for PSD matrices

    Returns:
        SimclrOptimum: Unpacks as (z_star, min_loss)
    """
    matrix = g.to_dense() if isinstance(g, RelationGraph) else validate_symmetric(g, "g")
    n = matrix.shape[0]
    k = validate_dimension(k, "k", 1, n)
    spectrum = sym_eig(matrix + shift * np.eye(n))
    z_star = _mds_embedding(spectrum, k)
    if tau is not None:
        z_star = z_star * np.sqrt(validate_positive(tau, "tau") / 2.0)
    singular = np.sort(np.abs(spectrum.eigenvalues - shift))[::-1]
    min_loss = float(np.sum(singular[k:] ** 2))
    return SimclrOptimum(z_star, min_loss, spectrum.top(k))


def barlow_twins_optimal(g: RelationGraph, k: int) -> NDArray[np.float64]:
    """Feature-space BarlowTwins representation of a relation graph.

    Unit-variance, mutually uncorrelated columns spanning the positive
    eigenspace of H·(G + I)·H; columns beyond its rank are zero.
    """
    k = validate_dimension(k, "k", 1, g.n)
    n = g.n
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    spectrum = sym_eig(centering @ (g.to_dense() + np.eye(n)) @ centering)
    values = spectrum.eigenvalues[:k]
    kept = values > RANK_TOL * max(float(np.max(np.abs(spectrum.eigenvalues))), 1.0)
    z_star = np.zeros((n, k))
    z_star[:, kept] = np.sqrt(n) * spectrum.eigenvectors[:, :k][:, kept]
    return z_star


# =============================================================================
# Linear models
# =============================================================================


def _regularized(
    matrix: NDArray[np.float64], name: str, ridge: float | None, always: bool = False
) -> NDArray[np.float64]:
    """Add ridge·I when matrix is singular (or always, if asked).

    The default ridge is RIDGE_SCALE·trace/D.

    Raises:
        SingularMatrixError: If the matrix is zero or stays indefinite
    """
    dim = matrix.shape[0]
    trace = float(np.trace(matrix))
    if trace <= 0:
        raise SingularMatrixError(ErrorMessages.ZERO_TRACE.format(name=name))
    amount = RIDGE_SCALE * trace / dim if ridge is None else validate_nonnegative(ridge, "ridge")

    if not always:
        eigenvalues = linalg.eigvalsh(matrix)
        if eigenvalues[0] > RANK_TOL * eigenvalues[-1]:
            return matrix
        logger.warning(LogMessages.RIDGE_APPLIED, name, amount)
    regularized = matrix + amount * np.eye(dim)
    try:
        linalg.cholesky(regularized, lower=True)
    except linalg.LinAlgError as e:
        raise SingularMatrixError(ErrorMessages.SINGULAR.format(name=name, ridge=amount)) from e
    return regularized


def _centered(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return x - x.mean(axis=0)


def vicreg_linear_optimum(
    x: ArrayLike,
    g: RelationGraph,
    alpha: float,
    gamma: float,
    k: int,
    ridge: float | None = None,
) -> LinearVicregOptimum:
    """Optimal weights of squared-variance VICReg on Z = X·W (β = α).

    With Σ = Cov(X), B = Σ − (γ/(αN))·XᵀLX and M = Σ^{-1/2}·B·Σ^{-1/2},
    W* = Σ^{-1/2}·P_M·max(Λ_M, 0)^{1/2} over the top-K eigenpairs of M and
    the loss is α·(K − Σ max(λ_M, 0)²). Σ gets a ridge only when singular.

    Raises:
        SingularMatrixError: If Cov(X) is zero
        ValidationError: If k is not in 1..D or alpha <= 0
    """
    x = validate_matrix(x, "x")
    if x.shape[0] != g.n:
        raise ValidationError(
            ErrorMessages.ROW_MISMATCH.format(
                left="x", left_rows=x.shape[0], right="g", right_rows=g.n
            )
        )
    alpha = validate_positive(alpha, "alpha")
    gamma = validate_nonnegative(gamma, "gamma")
    k = validate_dimension(k, "k", 1, x.shape[1])

    n = x.shape[0]
    centered = _centered(x)
    cov = _regularized(centered.T @ centered / n, "Cov(X)", ridge)
    smoothness = centered.T @ laplacian(g).dot(centered)
    target = cov - (gamma / (alpha * n)) * 0.5 * (smoothness + smoothness.T)

    whitener = psd_inverse_sqrt(cov)
    whitened = whitener @ target @ whitener
    spectrum = sym_eig(0.5 * (whitened + whitened.T)).top(k)
    clamped = np.maximum(spectrum.eigenvalues, 0.0)
    w_star = whitener @ (spectrum.eigenvectors * np.sqrt(clamped))
    min_loss = alpha * (k - float(np.sum(clamped**2)))
    return LinearVicregOptimum(w_star, min_loss, spectrum)


def vicreg_linear_weights(
    x: ArrayLike,
    g: RelationGraph,
    alpha: float,
    gamma: float,
    k: int,
    ridge: float | None = None,
) -> NDArray[np.float64]:
    """D×K optimal weights of linear VICReg; see vicreg_linear_optimum."""
    return vicreg_linear_optimum(x, g, alpha, gamma, k, ridge).w_star


def _unit_columns(w: NDArray[np.float64]) -> NDArray[np.float64]:
    norms = np.linalg.norm(w, axis=0)
    return np.divide(w, norms, out=np.zeros_like(w), where=norms > 0)


def lpp_lda_weights(
    x: ArrayLike, g: RelationGraph, k: int, ridge: float | None = None
) -> LinearProjection:
    """Top-K directions of the pencil (Xᵀ(G + I)X, XᵀLX) on centered X.

    For supervised G this is LDA (class-averaged between-scatter against
    within-scatter); for regular graphs the directions are those of
    (XᵀLX)⁻¹XᵀGX.

    Raises:
        DegenerateGraphError: If G has no edges
        SingularMatrixError: If the within-scatter stays singular after ridge
    """
    x = validate_matrix(x, "x")
    if x.shape[0] != g.n:
        raise ValidationError(
            ErrorMessages.ROW_MISMATCH.format(
                left="x", left_rows=x.shape[0], right="g", right_rows=g.n
            )
        )
    k = validate_dimension(k, "k", 1, x.shape[1])
    if g.nnz == 0:
        raise DegenerateGraphError(
            message="Relation graph has no edges; between-scatter carries no direction"
        )
    centered = _centered(x)
    between = centered.T @ (np.asarray(g.weights @ centered) + centered)
    within = centered.T @ laplacian(g).dot(centered)
    within = _regularized(0.5 * (within + within.T), "X^T L X", ridge)
    spectrum = generalized_topk(0.5 * (between + between.T), within, k)
    return LinearProjection(fix_signs(_unit_columns(spectrum.eigenvectors)), spectrum.eigenvalues)


def cca_weights(
    x_a: ArrayLike, x_b: ArrayLike, k: int, ridge: float | None = None
) -> CcaWeights:
    """Canonical correlation directions of two views.

    w_a solves C_ab·C_bb⁻¹·C_ba·w = ρ²·C_aa·w with ridge·I on C_aa and C_bb;
    w_b = C_bb⁻¹·C_ba·w_a. Both are column-normalized.

    Args:
        x_a: N×D_a first view
        x_b: N×D_b second view
        k: Number of directions, k <= min(D_a, D_b)
        ridge: Ridge on both auto-covariances; RIDGE_SCALE·trace/D each if None

    Returns:
        CcaWeights: Directions and correlations ρ in [0, 1]

    Raises:
        SingularMatrixError: If a view is constant
    """
    x_a = _centered(validate_matrix(x_a, "x_a"))
    x_b = _centered(validate_matrix(x_b, "x_b"))
    validate_same_rows(x_a, x_b, "x_a", "x_b")
    k = validate_dimension(k, "k", 1, min(x_a.shape[1], x_b.shape[1]))

    n = x_a.shape[0]
    c_aa = _regularized(x_a.T @ x_a / n, "C_aa", ridge, always=True)
    c_bb = _regularized(x_b.T @ x_b / n, "C_bb", ridge, always=True)
    c_ab = x_a.T @ x_b / n

    b_solve_ba = linalg.solve(c_bb, c_ab.T, assume_a="pos")
    pencil = c_ab @ b_solve_ba
    spectrum = generalized_topk(0.5 * (pencil + pencil.T), c_aa, k)

    correlations = np.sqrt(np.clip(spectrum.eigenvalues, 0.0, 1.0))
    w_a = fix_signs(_unit_columns(spectrum.eigenvectors))
    w_b = _unit_columns(b_solve_ba @ w_a)
    return CcaWeights(w_a, w_b, correlations)
