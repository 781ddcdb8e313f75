"""Least-squares linear probes on frozen embeddings.

The probe min_W ½||Y − ZW||²_F is solved through the SVD of Z. Its minimum
depends only on how the column space of Z covers the left singular vectors
of Y, which is what the span condition and the rank bounds measure.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from .closed_form import simclr_optimal, vicreg_optimal
from .config import RANK_TOL, SMALL_GAMMA, SPAN_ANGLE_TOL
from .eigensolver import numerical_rank, svd
from .exceptions import ShapeMismatchError
from .graph import relation_rank
from .messages import LogMessages
from .models.graph import RelationGraph
from .models.results import ProbeResult, RankBoundGap, SpanCheck
from .validators import validate_embedding, validate_matrix, validate_same_rows

logger = logging.getLogger(__name__)


def _with_bias(z: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.hstack([z, np.ones((z.shape[0], 1))])


def _prepared(
    z: ArrayLike, y: ArrayLike, with_bias: bool
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    z = validate_embedding(z)
    y = validate_matrix(y, "y")
    validate_same_rows(z, y, "z", "y")
    return (_with_bias(z) if with_bias else z), y


def _column_basis(m: NDArray[np.float64], rank_tol: float) -> NDArray[np.float64]:
    """Orthonormal basis Û of col(M) from singular values above rank_tol."""
    triplets = svd(m)
    return triplets.u[:, : numerical_rank(triplets.s, rank_tol)]


def least_squares_probe(
    z: ArrayLike,
    y: ArrayLike,
    with_bias: bool = False,
    rank_tol: float = RANK_TOL,
) -> ProbeResult:
    """Minimum-norm least-squares probe W* = V_z·Σ_z⁺·U_zᵀ·Y.

    Args:
        z: N×K frozen embedding
        y: N×C targets
        with_bias: Append a constant-1 feature (W then has K+1 rows)
        rank_tol: Relative cutoff for nonzero singular values of Z

    Returns:
        ProbeResult: Weights, minimal and achieved losses, rank of Z

    Raises:
        ShapeMismatchError: If Z and Y have different row counts
    """
    z, y = _prepared(z, y, with_bias)
    triplets = svd(z)
    rank = numerical_rank(triplets.s, rank_tol)
    u, s, v = triplets.u[:, :rank], triplets.s[:rank], triplets.v[:, :rank]
    w_star = (v / s) @ (u.T @ y)
    residual = y - z @ w_star
    return ProbeResult(
        w_star=w_star,
        min_loss=minimal_probe_loss(z, y, rank_tol=rank_tol),
        achieved_loss=0.5 * float(np.sum(residual**2)),
        rank_z=rank,
    )


def minimal_probe_loss(
    z: ArrayLike,
    y: ArrayLike,
    with_bias: bool = False,
    rank_tol: float = RANK_TOL,
) -> float:
    """Return ½||Y||²_F − ½||Û_zᵀ·U_y·Σ_y||²_F."""
    z, y = _prepared(z, y, with_bias)
    basis = _column_basis(z, rank_tol)
    y_triplets = svd(y)
    scaled = y_triplets.u * y_triplets.s
    covered = float(np.sum((basis.T @ scaled) ** 2))
    return max(0.5 * (float(np.sum(y**2)) - covered), 0.0)


def probe_null_space(
    z: ArrayLike, with_bias: bool = False, rank_tol: float = RANK_TOL
) -> NDArray[np.float64]:
    """Orthonormal basis V̄_z of the null space of Z (K × (K − rank))."""
    z = validate_embedding(z)
    if with_bias:
        z = _with_bias(z)
    return linalg.null_space(z, rcond=rank_tol)


def probe_solution_family(
    z: ArrayLike,
    y: ArrayLike,
    m: ArrayLike,
    with_bias: bool = False,
    rank_tol: float = RANK_TOL,
) -> NDArray[np.float64]:
    """Member (V_z·Σ_z⁻¹·U_zᵀ + V̄_z·M)·Y of the optimal probe family.

    Every member attains minimal_probe_loss.

    Args:
        z: N×K embedding
        y: N×C targets
        m: (K − rank)×N free parameter
        with_bias: Append a constant-1 feature
        rank_tol: Relative cutoff for nonzero singular values of Z

    Raises:
        ShapeMismatchError: If M does not match the null space and N
    """
    result = least_squares_probe(z, y, with_bias=with_bias, rank_tol=rank_tol)
    null = probe_null_space(z, with_bias=with_bias, rank_tol=rank_tol)
    y = validate_matrix(y, "y")
    m = validate_matrix(m, "m")
    expected = (null.shape[1], y.shape[0])
    if m.shape != expected:
        raise ShapeMismatchError(expected, m.shape)
    return result.w_star + null @ m @ y


def span_condition(
    z: ArrayLike,
    y: ArrayLike,
    angle_tol: float = SPAN_ANGLE_TOL,
    with_bias: bool = False,
    rank_tol: float = RANK_TOL,
) -> SpanCheck:
    """Test col(Û_y) ⊆ col(Û_z) through the largest principal angle.

    The angle between col(Û_y) and its projection onto col(Û_z) is
    arcsin ||(I − Û_z·Û_zᵀ)·Û_y||₂.

    Returns:
        SpanCheck: (holds, max_angle) with max_angle in radians
    """
    z, y = _prepared(z, y, with_bias)
    target = _column_basis(y, rank_tol)
    if target.shape[1] == 0:
        return SpanCheck(True, 0.0)
    basis = _column_basis(z, rank_tol)
    outside = target - basis @ (basis.T @ target)
    sine = float(np.linalg.norm(outside, 2))
    angle = float(np.arcsin(min(sine, 1.0)))
    return SpanCheck(angle <= angle_tol, angle)


def probe_accuracy(z: ArrayLike, y: ArrayLike, with_bias: bool = False) -> float:
    """Fraction of rows where argmax of Z·W* matches argmax of Y.

    Ties go to the lowest index on both sides.
    """
    result = least_squares_probe(z, y, with_bias=with_bias)
    z, y = _prepared(z, y, with_bias)
    if y.shape[0] == 0:
        return 0.0
    predicted = np.argmax(z @ result.w_star, axis=1)
    return float(np.mean(predicted == np.argmax(y, axis=1)))


def rank_bound_gap(
    g: RelationGraph,
    y: ArrayLike,
    k: int,
    alpha: float = 1.0,
    gamma: float = SMALL_GAMMA,
    rank_tol: float = RANK_TOL,
) -> RankBoundGap:
    """Probe-loss gap between the SimCLR and VICReg optima on task Y.

    Both optima are probed with a bias feature; losses are unhalved
    ||Y − ZW||². With R = rank(G + I) and σ_y descending,
    lower = Σ_{R < i ≤ K} σ²_y,i and upper = ||Y||²_F.

    Args:
        g: Relation graph
        y: N×C targets
        k: Embedding dimension of both optima
        alpha: VICReg variance/covariance weight
        gamma: VICReg invariance weight, small so VICReg stays full rank
        rank_tol: Relative rank cutoff

    Returns:
        RankBoundGap: Bounds, both probe losses and the ranks involved
    """
    y = validate_matrix(y, "y")
    relation = relation_rank(g, rank_tol)
    sigma_y = svd(y).s
    target_rank = numerical_rank(sigma_y, rank_tol)
    if target_rank > k:
        logger.warning(LogMessages.TARGET_RANK_EXCEEDS_K, target_rank, k)

    simclr_z = simclr_optimal(g, k).z_star
    vicreg_z = vicreg_optimal(g, alpha, gamma, k).z_star
    simclr_loss = 2.0 * minimal_probe_loss(simclr_z, y, with_bias=True, rank_tol=rank_tol)
    vicreg_loss = 2.0 * minimal_probe_loss(vicreg_z, y, with_bias=True, rank_tol=rank_tol)

    return RankBoundGap(
        lower=float(np.sum(sigma_y[relation:k] ** 2)),
        upper=float(np.sum(y**2)),
        simclr_loss=simclr_loss,
        vicreg_loss=vicreg_loss,
        relation_rank=relation,
        target_rank=target_rank,
        k=k,
    )
