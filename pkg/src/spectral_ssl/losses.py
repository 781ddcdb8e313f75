"""VICReg, SimCLR/infoNCE and BarlowTwins losses on embedding matrices."""

import logging
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special
from scipy.spatial.distance import cdist

from .config import DEFAULT_EPS, LossConfig
from .exceptions import ShapeMismatchError, ValidationError
from .graph import invariance_sum, pair_indices, row_normalize
from .graph_estimation import estimate_graph, normalize_rows, pairwise_distance
from .models.graph import RelationGraph
from .options import ConstraintSet, Matching, Metric, VarianceMode
from .validators import validate_embedding, validate_matrix

logger = logging.getLogger(__name__)


class VicregTerms(NamedTuple):
    """Unweighted VICReg components."""

    variance: float
    covariance: float
    invariance: float

    def weighted(self, cfg: LossConfig) -> float:
        """Return α·variance + β·covariance + γ·invariance."""
        return (
            cfg.alpha * self.variance
            + cfg.beta * self.covariance
            + cfg.gamma * self.invariance
        )


# =============================================================================
# VICReg
# =============================================================================


def covariance(z: ArrayLike) -> NDArray[np.float64]:
    """Return (1/N)·(Z − mean)ᵀ(Z − mean), no Bessel correction.

    Raises:
        ValidationError: If Z has no rows
    """
    z = validate_embedding(z)
    if z.shape[0] == 0:
        raise ValidationError("Covariance of an empty embedding is undefined.")
    centered = z - z.mean(axis=0)
    cov = centered.T @ centered / z.shape[0]
    return 0.5 * (cov + cov.T)


def variance_term(cov: NDArray[np.float64], mode: VarianceMode | str) -> float:
    """Σ_k max(0, 1 − √C_kk) in hinge mode, Σ_k (1 − C_kk)² in squared mode.

    A collapsed dimension (C_kk = 0) scores exactly 1 in hinge mode; the
    eps guard on √C_kk applies only to the gradient.
    """
    diag = np.diag(cov)
    if VarianceMode.from_string(mode) is VarianceMode.HINGE:
        return float(np.sum(np.maximum(0.0, 1.0 - np.sqrt(np.maximum(diag, 0.0)))))
    return float(np.sum((1.0 - diag) ** 2))


def vicreg_terms(z: ArrayLike, g: RelationGraph, cfg: LossConfig) -> VicregTerms:
    """Return the variance, covariance and invariance terms of VICReg.

    Raises:
        ShapeMismatchError: If Z does not have one row per node
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    cov = covariance(z)
    off_diagonal = float(np.sum(cov**2) - np.sum(np.diag(cov) ** 2))
    return VicregTerms(
        variance=variance_term(cov, cfg.variance_mode),
        covariance=off_diagonal,
        invariance=invariance_sum(z, g) / z.shape[0],
    )


def vicreg_loss(z: ArrayLike, g: RelationGraph, cfg: LossConfig) -> float:
    """VICReg loss of Z on relation graph G.

    α·Σ_k var-term + β·Σ_{j≠k} C²_jk + (γ/N)·Σ_{i,j} G_ij·||Z_i − Z_j||².
    """
    return vicreg_terms(z, g, cfg).weighted(cfg)


# =============================================================================
# SimCLR
# =============================================================================


def _similarity_logits(
    z: NDArray[np.float64], tau: float, metric: Metric, eps: float
) -> NDArray[np.float64]:
    if metric is Metric.COSINE:
        unit = normalize_rows(z, eps)
        logits = unit @ unit.T / tau
    elif metric is Metric.L2:
        logits = -cdist(z, z, "euclidean") / tau
    else:
        logits = -cdist(z, z, "sqeuclidean") / tau
    np.fill_diagonal(logits, -np.inf)
    return logits


def simclr_estimate(
    z: ArrayLike,
    tau: float,
    metric: Metric | str = Metric.COSINE,
    eps: float = DEFAULT_EPS,
) -> NDArray[np.float64]:
    """SimCLR's softmax relation estimate Ĝ(Z).

    Row i is the softmax over k ≠ i of cos(z_i, z_k)/τ (cosine) or of
    −||z_i − z_k||/τ (l2); the diagonal is zero.

    Raises:
        ValidationError: If N < 2 or tau is not positive
    """
    z = validate_embedding(z)
    if z.shape[0] < 2:
        raise ValidationError("simclr_estimate needs at least two rows.")
    if tau <= 0:
        raise ValidationError("tau must be positive.")
    return special.softmax(_similarity_logits(z, tau, Metric.from_string(metric), eps), axis=1)


def infonce_loss(g: RelationGraph, z: ArrayLike, cfg: LossConfig) -> float:
    """Cross-entropy −Σ Ḡ_ij·log Ĝ(Z)_ij with Ḡ the row-normalized graph.

    Entries with Ḡ_ij = 0 contribute nothing.

    Raises:
        DegenerateGraphError: If G has an isolated node
        ShapeMismatchError: If Z does not have one row per node
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    target = row_normalize(g)
    log_estimate = special.log_softmax(
        _similarity_logits(z, cfg.tau, cfg.metric, cfg.eps), axis=1
    )
    support = target > 0
    return float(-np.sum(target[support] * log_estimate[support]))


def euclidean_match_loss(g: RelationGraph | ArrayLike, g_hat: ArrayLike) -> float:
    """Return ||G − Ĝ||²_F.

    Raises:
        ShapeMismatchError: If the matrices differ in shape
    """
    target = _dense_target(g)
    g_hat = validate_matrix(g_hat, "g_hat")
    if target.shape != g_hat.shape:
        raise ShapeMismatchError(target.shape, g_hat.shape)
    return float(np.sum((target - g_hat) ** 2))


def cross_entropy_match_loss(
    g: RelationGraph | ArrayLike, g_hat: ArrayLike, eps: float = DEFAULT_EPS
) -> float:
    """Row-wise cross-entropy between row-normalized G and Ĝ.

    log is taken of max(Ĝ_ij, eps) so clamped estimates stay finite.

    Raises:
        ShapeMismatchError: If the matrices differ in shape
    """
    target = _row_stochastic(_dense_target(g))
    estimate = _row_stochastic(validate_matrix(g_hat, "g_hat"))
    if target.shape != estimate.shape:
        raise ShapeMismatchError(target.shape, estimate.shape)
    support = target > 0
    return float(-np.sum(target[support] * np.log(np.maximum(estimate[support], eps))))


def _dense_target(g: RelationGraph | ArrayLike) -> NDArray[np.float64]:
    if isinstance(g, RelationGraph):
        return g.to_dense()
    return validate_matrix(g, "g")


def _row_stochastic(m: NDArray[np.float64]) -> NDArray[np.float64]:
    sums = m.sum(axis=1, keepdims=True)
    return np.divide(m, sums, out=np.zeros_like(m), where=sums > 0)


def matching_target(g: RelationGraph, constraint: ConstraintSet) -> NDArray[np.float64]:
    """G itself for the simple set, D⁻¹G for the right-stochastic set."""
    if constraint is ConstraintSet.RIGHT_STOCHASTIC:
        return row_normalize(g)
    return g.to_dense()


def simclr_loss(
    z: ArrayLike,
    g: RelationGraph,
    cfg: LossConfig,
    matching: Matching | str = Matching.CROSS_ENTROPY,
) -> float:
    """SimCLR family loss: estimate Ĝ(Z) from distances, then match it to G.

    Ĝ comes from estimate_graph with cfg's metric, regularizer, constraint
    and τ. With the log regularizer, the right-stochastic set and
    cross-entropy matching this is infonce_loss.
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    distance = pairwise_distance(z, cfg.metric, cfg.eps)
    g_hat = estimate_graph(distance, cfg.tau, cfg.regularizer, cfg.constraint)
    target = matching_target(g, cfg.constraint)
    if Matching.from_string(matching) is Matching.EUCLIDEAN:
        return euclidean_match_loss(target, g_hat)
    return cross_entropy_match_loss(target, g_hat, cfg.eps)


# =============================================================================
# BarlowTwins
# =============================================================================


def cross_correlation(
    z_left: ArrayLike, z_right: ArrayLike, eps: float = DEFAULT_EPS
) -> NDArray[np.float64]:
    """Cosine cross-correlation of column-centered views.

    C_ij = ⟨a_i, b_j⟩ / (||a_i||·||b_j|| + eps).

    Raises:
        ShapeMismatchError: If the views differ in shape
    """
    z_left = validate_embedding(z_left, "z_left")
    z_right = validate_embedding(z_right, "z_right")
    if z_left.shape != z_right.shape:
        raise ShapeMismatchError(z_left.shape, z_right.shape)
    a = z_left - z_left.mean(axis=0)
    b = z_right - z_right.mean(axis=0)
    norms = np.outer(np.linalg.norm(a, axis=0), np.linalg.norm(b, axis=0))
    return a.T @ b / (norms + eps)


def barlow_twins_loss(z_left: ArrayLike, z_right: ArrayLike, cfg: LossConfig) -> float:
    """BarlowTwins loss Σ_k (C_kk − 1)² + α_bt·Σ_{k≠k'} C²_kk'."""
    c = cross_correlation(z_left, z_right, cfg.eps)
    diag = np.diag(c)
    off_diagonal = float(np.sum(c**2) - np.sum(diag**2))
    return float(np.sum((diag - 1.0) ** 2) + cfg.alpha_bt * off_diagonal)


def barlow_twins_embedding_loss(z: ArrayLike, g: RelationGraph, cfg: LossConfig) -> float:
    """BarlowTwins loss of one embedding, viewed through G's positive pairs.

    Row m of the two views holds Z_i and Z_j for the m-th nonzero (i, j) of G.

    Raises:
        ValidationError: If g has non-binary weights
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    left, right = pair_indices(g)
    return barlow_twins_loss(z[left], z[right], cfg)
