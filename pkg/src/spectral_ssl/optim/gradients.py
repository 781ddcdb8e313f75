"""Analytic gradients of the self-supervised losses.

Every gradient here differentiates the loss exactly as ``losses`` evaluates
it, including the eps guards, and is verified against central differences
in the tests.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse

from ..config import LossConfig
from ..exceptions import ShapeMismatchError
from ..graph import laplacian, pair_indices
from ..graph_estimation import estimate_graph, frobenius_kkt_solution, pairwise_distance
from ..losses import covariance, cross_correlation, matching_target
from ..models.graph import Laplacian, RelationGraph
from ..options import ConstraintSet, Matching, Metric, Regularizer, VarianceMode
from ..validators import validate_embedding, validate_matrix

# =============================================================================
# VICReg
# =============================================================================


def _variance_derivative(diag: NDArray[np.float64], cfg: LossConfig) -> NDArray[np.float64]:
    """Derivative of the variance term with respect to each C_kk."""
    if cfg.variance_mode is VarianceMode.SQUARED:
        return -2.0 * (1.0 - diag)
    root = np.sqrt(np.maximum(diag, cfg.eps))
    # subgradient 0 at C_kk == 1 and inside the eps clamp
    active = (diag > cfg.eps) & (root < 1.0)
    return np.where(active, -0.5 / root, 0.0)


def grad_vicreg(
    z: ArrayLike,
    g: RelationGraph,
    cfg: LossConfig,
    lap: Laplacian | None = None,
) -> NDArray[np.float64]:
    """Gradient of vicreg_loss with respect to Z.

    With Γ = ∂(α·var + β·cov)/∂C the gradient is (2/N)·Z_c·Γ + (4γ/N)·L·Z.

    Args:
        z: N×K embedding
        g: Relation graph
        cfg: Loss weights and variance mode
        lap: Precomputed Laplacian of g

    Returns:
        N×K gradient

    Raises:
        ShapeMismatchError: If Z does not have one row per node
    """
    z = validate_embedding(z)
    n = z.shape[0]
    if n != g.n:
        raise ShapeMismatchError((g.n,), (n,))
    cov = covariance(z)
    diag = np.diag(cov)
    gamma_matrix = cfg.beta * 2.0 * (cov - np.diag(diag))
    gamma_matrix += np.diag(cfg.alpha * _variance_derivative(diag, cfg))
    centered = z - z.mean(axis=0)
    grad = (2.0 / n) * centered @ gamma_matrix
    if cfg.gamma:
        lap = laplacian(g) if lap is None else lap
        grad += (4.0 * cfg.gamma / n) * lap.dot(z)
    return grad


def grad_vicreg_linear(
    w: ArrayLike,
    x: ArrayLike,
    g: RelationGraph,
    cfg: LossConfig,
    lap: Laplacian | None = None,
) -> NDArray[np.float64]:
    """Gradient of vicreg_loss(X·W) with respect to W, i.e. Xᵀ·∇_Z."""
    x = validate_matrix(x, "x")
    w = validate_matrix(w, "w")
    return x.T @ grad_vicreg(x @ w, g, cfg, lap)


# =============================================================================
# SimCLR
# =============================================================================


def _match_gradient(
    target: NDArray[np.float64],
    g_hat: NDArray[np.float64],
    matching: Matching,
    eps: float,
) -> NDArray[np.float64]:
    """∂loss/∂Ĝ for the Euclidean or the cross-entropy comparison."""
    if matching is Matching.EUCLIDEAN:
        return 2.0 * (g_hat - target)

    target_sums = target.sum(axis=1, keepdims=True)
    t_bar = np.divide(target, target_sums, out=np.zeros_like(target), where=target_sums > 0)
    sums = g_hat.sum(axis=1, keepdims=True)
    q = np.divide(g_hat, sums, out=np.zeros_like(g_hat), where=sums > 0)
    live = (t_bar > 0) & (q > eps)
    d_q = np.zeros_like(q)
    d_q[live] = -t_bar[live] / q[live]
    through_norm = d_q - np.sum(d_q * q, axis=1, keepdims=True)
    return np.divide(through_norm, sums, out=np.zeros_like(q), where=sums > 0)


def _estimate_gradient(
    d: NDArray[np.float64],
    g_hat: NDArray[np.float64],
    upstream: NDArray[np.float64],
    cfg: LossConfig,
) -> NDArray[np.float64]:
    """∂loss/∂D through the closed-form graph estimate."""
    tau = cfg.tau
    n = d.shape[0]
    if cfg.regularizer is Regularizer.LOG:
        if cfg.constraint is ConstraintSet.SIMPLE:
            grad = -(g_hat * upstream) / tau
        else:
            row_mean = np.sum(upstream * g_hat, axis=1, keepdims=True)
            grad = -(g_hat * (upstream - row_mean)) / tau
    else:
        active = frobenius_kkt_solution(d, tau, cfg.constraint) > 0
        passed = np.where(active, upstream, 0.0)
        if cfg.constraint is ConstraintSet.SIMPLE:
            grad = -passed / tau
        else:
            grad = -(passed - passed.sum(axis=1, keepdims=True) / (n - 1)) / tau
    np.fill_diagonal(grad, 0.0)
    return grad


def _distance_gradient(
    z: NDArray[np.float64],
    d: NDArray[np.float64],
    upstream: NDArray[np.float64],
    cfg: LossConfig,
) -> NDArray[np.float64]:
    """∂loss/∂Z through the pairwise distance matrix."""
    coupling = upstream + upstream.T
    np.fill_diagonal(coupling, 0.0)

    if cfg.metric is Metric.L2_SQUARED:
        return 2.0 * (coupling.sum(axis=1, keepdims=True) * z - coupling @ z)
    if cfg.metric is Metric.L2:
        scaled = np.divide(coupling, d, out=np.zeros_like(coupling), where=d > 0)
        return scaled.sum(axis=1, keepdims=True) * z - scaled @ z

    # cosine: D_ij = 1 − u_i·u_j with u = z / (||z|| + eps)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    denom = norms + cfg.eps
    unit = z / denom
    grad_unit = -coupling @ unit
    radial = np.sum(z * grad_unit, axis=1, keepdims=True)
    return grad_unit / denom - z * radial / (norms * denom**2)


def grad_simclr(
    z: ArrayLike,
    g: RelationGraph,
    cfg: LossConfig,
    matching: Matching | str = Matching.CROSS_ENTROPY,
) -> NDArray[np.float64]:
    """Gradient of simclr_loss with respect to Z.

    Chains the matching loss through the graph estimate and the pairwise
    distances. The cosine clip to [0, 2] is treated as the identity.

    Raises:
        ShapeMismatchError: If Z does not have one row per node
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    d = pairwise_distance(z, cfg.metric, cfg.eps)
    g_hat = estimate_graph(d, cfg.tau, cfg.regularizer, cfg.constraint)
    target = matching_target(g, cfg.constraint)
    upstream = _match_gradient(target, g_hat, Matching.from_string(matching), cfg.eps)
    return _distance_gradient(z, d, _estimate_gradient(d, g_hat, upstream, cfg), cfg)


# =============================================================================
# BarlowTwins
# =============================================================================


def grad_barlow_twins(
    z_left: ArrayLike, z_right: ArrayLike, cfg: LossConfig
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gradients of barlow_twins_loss with respect to both views.

    Returns:
        (∂loss/∂z_left, ∂loss/∂z_right)
    """
    c = cross_correlation(z_left, z_right, cfg.eps)
    a = np.asarray(z_left, dtype=float)
    b = np.asarray(z_right, dtype=float)
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    norm_a = np.linalg.norm(a, axis=0)
    norm_b = np.linalg.norm(b, axis=0)
    denom = np.outer(norm_a, norm_b) + cfg.eps

    k = c.shape[0]
    d_c = 2.0 * cfg.alpha_bt * c
    d_c[np.diag_indices(k)] = 2.0 * (np.diag(c) - 1.0)

    d_inner = d_c / denom
    weighted = d_c * c / denom
    d_norm_a = -(weighted @ norm_b)
    d_norm_b = -(weighted.T @ norm_a)

    grad_a = b @ d_inner.T + a * np.divide(
        d_norm_a, norm_a, out=np.zeros_like(norm_a), where=norm_a > 0
    )
    grad_b = a @ d_inner + b * np.divide(
        d_norm_b, norm_b, out=np.zeros_like(norm_b), where=norm_b > 0
    )
    return grad_a - grad_a.mean(axis=0), grad_b - grad_b.mean(axis=0)


def grad_barlow_twins_embedding(
    z: ArrayLike, g: RelationGraph, cfg: LossConfig
) -> NDArray[np.float64]:
    """Gradient of barlow_twins_embedding_loss with respect to Z.

    View gradients of the pair-expanded rows are scattered back to the rows
    of Z they were gathered from.
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    left, right = pair_indices(g)
    grad_left, grad_right = grad_barlow_twins(z[left], z[right], cfg)
    return _scatter_rows(left, grad_left, z.shape[0]) + _scatter_rows(right, grad_right, z.shape[0])


def _scatter_rows(index: NDArray[np.int64], rows: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    """Sum rows[m] into row index[m] of an n-row result."""
    gather = sparse.csr_array((np.ones(index.size), (index, np.arange(index.size))), shape=(n, index.size))
    return np.asarray(gather @ rows)
