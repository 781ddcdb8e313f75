"""Closed-form graph estimates from pairwise distances.

Solves min_W Tr(D·W) + R(W) over the simple or right-stochastic graph sets
for the entropic regularizer R_log = τ·Σ W(log W − 1) and the Frobenius
regularizer R_F = τ·Σ W(W/2 − 1). The entropic right-stochastic solution is
SimCLR's softmax similarity; the Frobenius ones are its ReLU variants.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize, special
from scipy.spatial.distance import cdist

from .config import DEFAULT_EPS, DEFAULT_TAU
from .exceptions import ValidationError
from .messages import ErrorMessages
from .options import ConstraintSet, Metric, Regularizer
from .validators import validate_embedding, validate_positive, validate_square

logger = logging.getLogger(__name__)

# Bracket for the scalar oracle; every closed-form entry lies in [0, 1]
_ORACLE_UPPER = 2.0


def normalize_rows(z: NDArray[np.float64], eps: float = DEFAULT_EPS) -> NDArray[np.float64]:
    """Scale rows to unit norm with an eps-guarded denominator."""
    return z / (np.linalg.norm(z, axis=1, keepdims=True) + eps)


def pairwise_distance(
    z: ArrayLike, metric: Metric | str = Metric.COSINE, eps: float = DEFAULT_EPS
) -> NDArray[np.float64]:
    """Pairwise distances between embedding rows.

    Args:
        z: N×K embedding
        metric: "cosine" (1 − cos, in [0, 2]), "l2" or "l2_squared"
        eps: Normalization guard for cosines

    Returns:
        Symmetric nonnegative N×N matrix with zero diagonal

    Raises:
        ValidationError: If a row has zero norm under the cosine metric
    """
    z = validate_embedding(z)
    metric = Metric.from_string(metric)
    if metric is Metric.COSINE:
        norms = np.linalg.norm(z, axis=1)
        zero_rows = np.flatnonzero(norms == 0)
        if zero_rows.size:
            raise ValidationError(ErrorMessages.ZERO_NORM_ROW.format(row=int(zero_rows[0])))
        unit = normalize_rows(z, eps)
        distance = np.clip(1.0 - unit @ unit.T, 0.0, 2.0)
        distance = 0.5 * (distance + distance.T)
    elif metric is Metric.L2:
        distance = cdist(z, z, "euclidean")
    else:
        distance = cdist(z, z, "sqeuclidean")
    np.fill_diagonal(distance, 0.0)
    return distance


def _validated_distance(d: ArrayLike) -> NDArray[np.float64]:
    d = validate_square(d, "d")
    if np.any(d < 0):
        raise ValidationError("Distances must be nonnegative.")
    return d


def _off_diagonal(n: int) -> NDArray[np.bool_]:
    return ~np.eye(n, dtype=bool)


def estimate_graph_log(
    d: ArrayLike,
    tau: float = DEFAULT_TAU,
    constraint: ConstraintSet | str = ConstraintSet.RIGHT_STOCHASTIC,
) -> NDArray[np.float64]:
    """Entropy-regularized graph estimate.

    Simple → exp(−D/τ) off the diagonal; right-stochastic → the row softmax
    of −D/τ over j ≠ i.
    """
    d = _validated_distance(d)
    tau = validate_positive(tau, "tau")
    constraint = ConstraintSet.from_string(constraint)
    if constraint is ConstraintSet.SIMPLE:
        weights = np.exp(-d / tau)
        np.fill_diagonal(weights, 0.0)
        return weights
    logits = np.where(_off_diagonal(d.shape[0]), -d / tau, -np.inf)
    return special.softmax(logits, axis=1)


def frobenius_kkt_solution(
    d: ArrayLike,
    tau: float | None = None,
    constraint: ConstraintSet | str = ConstraintSet.SIMPLE,
) -> NDArray[np.float64]:
    """Stationary point of the Frobenius program before the nonnegativity clamp.

    Simple → 11ᵀ − I − D/τ; right-stochastic →
    (11ᵀ − I)/(N−1) − (D − D·11ᵀ/(N−1))/τ with the diagonal set to zero.
    Right-stochastic rows sum to exactly 1 before clamping.
    """
    d = _validated_distance(d)
    tau = default_frobenius_tau(d) if tau is None else validate_positive(tau, "tau")
    constraint = ConstraintSet.from_string(constraint)
    n = d.shape[0]
    off = _off_diagonal(n).astype(float)
    if constraint is ConstraintSet.SIMPLE:
        return off * (1.0 - d / tau)
    if n < 2:
        raise ValidationError("Right-stochastic estimates need N >= 2.")
    row_means = d.sum(axis=1, keepdims=True) / (n - 1)
    return off * (1.0 / (n - 1) - (d - row_means) / tau)


def estimate_graph_frobenius(
    d: ArrayLike,
    tau: float | None = None,
    constraint: ConstraintSet | str = ConstraintSet.SIMPLE,
) -> NDArray[np.float64]:
    """Frobenius-regularized graph estimate, relu of the KKT solution.

    τ defaults to max(D) so every simple-set entry stays in [0, 1].
    Right-stochastic rows may stop summing to 1 once clamped; see
    row_sum_gap.
    """
    return np.maximum(frobenius_kkt_solution(d, tau, constraint), 0.0)


def default_frobenius_tau(d: NDArray[np.float64]) -> float:
    """Return max(D), or 1 when all distances vanish."""
    top = float(np.max(d)) if d.size else 0.0
    return top if top > 0 else 1.0


def estimate_graph(
    d: ArrayLike,
    tau: float | None = None,
    regularizer: Regularizer | str = Regularizer.LOG,
    constraint: ConstraintSet | str = ConstraintSet.RIGHT_STOCHASTIC,
) -> NDArray[np.float64]:
    """Dispatch to the estimator of the given regularizer."""
    if Regularizer.from_string(regularizer) is Regularizer.LOG:
        return estimate_graph_log(d, DEFAULT_TAU if tau is None else tau, constraint)
    return estimate_graph_frobenius(d, tau, constraint)


def row_sum_gap(w: ArrayLike) -> NDArray[np.float64]:
    """Per-row |Σ_j W[i, j] − 1|, the right-stochastic feasibility gap."""
    return np.abs(np.asarray(w, dtype=float).sum(axis=1) - 1.0)


def graph_estimation_objective(
    w: ArrayLike,
    d: ArrayLike,
    tau: float,
    regularizer: Regularizer | str = Regularizer.LOG,
) -> float:
    """Evaluate Tr(D·W) + R(W) over the off-diagonal entries (0·log 0 = 0)."""
    w = np.asarray(w, dtype=float)
    d = np.asarray(d, dtype=float)
    mask = _off_diagonal(w.shape[0])
    return _objective_terms(w[mask], d[mask], tau, Regularizer.from_string(regularizer))


def _objective_terms(
    w: NDArray[np.float64], d: NDArray[np.float64], tau: float, regularizer: Regularizer
) -> float:
    if regularizer is Regularizer.LOG:
        penalty = special.xlogy(w, w) - w
    else:
        penalty = w * (0.5 * w - 1.0)
    return float(np.sum(d * w) + tau * np.sum(penalty))


def numerical_graph_estimate(
    d: ArrayLike,
    tau: float,
    regularizer: Regularizer | str = Regularizer.LOG,
    constraint: ConstraintSet | str = ConstraintSet.SIMPLE,
) -> NDArray[np.float64]:
    """Solve the estimation program numerically, row by row.

    The program separates over entries (simple set) or rows (right-stochastic
    set). Entries and two-entry rows are solved with bounded Brent search;
    longer rows with SLSQP on the simplex. Meant for small N.
    """
    d = _validated_distance(d)
    tau = validate_positive(tau, "tau")
    regularizer = Regularizer.from_string(regularizer)
    constraint = ConstraintSet.from_string(constraint)
    n = d.shape[0]
    weights = np.zeros((n, n))

    def scalar_min(fun, upper: float = _ORACLE_UPPER) -> float:
        result = optimize.minimize_scalar(
            fun, bounds=(0.0, upper), method="bounded", options={"xatol": 1e-12}
        )
        return float(result.x)

    for i in range(n):
        others = np.flatnonzero(np.arange(n) != i)
        row = d[i, others]
        if constraint is ConstraintSet.SIMPLE:
            for index, j in enumerate(others):
                weights[i, j] = scalar_min(
                    lambda t, dij=row[index]: _objective_terms(
                        np.array([t]), np.array([dij]), tau, regularizer
                    )
                )
        elif others.size == 1:
            weights[i, others[0]] = 1.0
        elif others.size == 2:
            t = scalar_min(
                lambda t: _objective_terms(
                    np.array([t, 1.0 - t]), row, tau, regularizer
                ),
                upper=1.0,
            )
            weights[i, others] = [t, 1.0 - t]
        else:
            start = np.full(others.size, 1.0 / others.size)
            result = optimize.minimize(
                lambda v, row=row: _objective_terms(v, row, tau, regularizer),
                start,
                method="SLSQP",
                bounds=[(0.0, 1.0)] * others.size,
                constraints=[{"type": "eq", "fun": lambda v: np.sum(v) - 1.0}],
                options={"ftol": 1e-15, "maxiter": 1000},
            )
            weights[i, others] = result.x
    return weights
