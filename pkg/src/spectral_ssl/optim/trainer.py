"""First-order training of embeddings and linear weights.

Runs plain gradient descent or RMSProp on the full objective (no
minibatching) and records a Trajectory whose squared gap to the
closed-form optimum shows convergence.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..closed_form import vicreg_linear_optimum, vicreg_optimal
from ..config import (
    CONVERGENCE_GAP_SQ,
    DIVERGENCE_CHECK_EVERY,
    DIVERGENCE_LOSS,
    LossConfig,
    OptimizerConfig,
)
from ..eigensolver import svd
from ..exceptions import DivergenceError, ShapeMismatchError
from ..graph import laplacian
from ..losses import barlow_twins_embedding_loss, simclr_loss, vicreg_loss
from ..messages import LogMessages
from ..models.graph import RelationGraph
from ..models.results import Trajectory
from ..options import LossKind, Matching, OptimizerKind, VarianceMode
from ..validators import validate_embedding, validate_matrix
from .gradients import grad_barlow_twins_embedding, grad_simclr, grad_vicreg

logger = logging.getLogger(__name__)

Params = NDArray[np.float64]


# =============================================================================
# Optimizers
# =============================================================================


class Optimizer(ABC):
    """Update rule params ← params − step(grad)."""

    def __init__(self, learning_rate: float) -> None:
        """Initialize the optimizer.

        Args:
            learning_rate: Step size
        """
        self.learning_rate = learning_rate

    @abstractmethod
    def step(self, params: Params, grad: Params) -> Params:
        """Return the updated parameters; the inputs are left untouched."""
        ...  # pragma: no cover


class SGD(Optimizer):
    """Plain gradient descent."""

    def step(self, params: Params, grad: Params) -> Params:
        """Return params − lr·grad."""
        return params - self.learning_rate * grad


class RMSProp(Optimizer):
    """RMSProp without momentum.

    v ← decay·v + (1 − decay)·g², params ← params − lr·g / (√v + eps).
    """

    def __init__(self, learning_rate: float, decay: float, eps: float) -> None:
        """Initialize the optimizer.

        Args:
            learning_rate: Step size
            decay: Second-moment EMA decay
            eps: Denominator guard
        """
        super().__init__(learning_rate)
        self.decay = decay
        self.eps = eps
        self._second_moment: Params | None = None

    def step(self, params: Params, grad: Params) -> Params:
        """Return the RMSProp update of params."""
        if self._second_moment is None:
            self._second_moment = np.zeros_like(grad)
        self._second_moment = self.decay * self._second_moment + (1.0 - self.decay) * grad**2
        return params - self.learning_rate * grad / (np.sqrt(self._second_moment) + self.eps)


def make_optimizer(cfg: OptimizerConfig) -> Optimizer:
    """Build a fresh optimizer from its config."""
    if cfg.kind is OptimizerKind.SGD:
        return SGD(cfg.learning_rate)
    return RMSProp(cfg.learning_rate, cfg.decay, cfg.eps)


# =============================================================================
# Objectives
# =============================================================================


@dataclass(frozen=True)
class Objective:
    """Loss and gradient of one trainable parameter matrix.

    Attributes:
        loss: Parameters → loss value
        grad: Parameters → gradient of the same shape
        represent: Parameters → the N×K embedding they define
    """

    loss: Callable[[Params], float]
    grad: Callable[[Params], Params]
    represent: Callable[[Params], Params]


def embedding_objective(
    loss_kind: LossKind | str,
    g: RelationGraph,
    cfg: LossConfig,
    matching: Matching | str = Matching.CROSS_ENTROPY,
) -> Objective:
    """Objective over a free N×K embedding; the Laplacian is built once."""
    loss_kind = LossKind.from_string(loss_kind)
    if loss_kind is LossKind.VICREG:
        lap = laplacian(g)
        return Objective(
            loss=lambda z: vicreg_loss(z, g, cfg),
            grad=lambda z: grad_vicreg(z, g, cfg, lap),
            represent=lambda z: z,
        )
    if loss_kind is LossKind.SIMCLR:
        matching = Matching.from_string(matching)
        return Objective(
            loss=lambda z: simclr_loss(z, g, cfg, matching),
            grad=lambda z: grad_simclr(z, g, cfg, matching),
            represent=lambda z: z,
        )
    return Objective(
        loss=lambda z: barlow_twins_embedding_loss(z, g, cfg),
        grad=lambda z: grad_barlow_twins_embedding(z, g, cfg),
        represent=lambda z: z,
    )


def linear_objective(
    loss_kind: LossKind | str,
    x: ArrayLike,
    g: RelationGraph,
    cfg: LossConfig,
    matching: Matching | str = Matching.CROSS_ENTROPY,
) -> Objective:
    """Objective over D×K weights W with embedding Z = X·W."""
    x = validate_matrix(x, "x")
    inner = embedding_objective(loss_kind, g, cfg, matching)
    return Objective(
        loss=lambda w: inner.loss(x @ w),
        grad=lambda w: x.T @ inner.grad(x @ w),
        represent=lambda w: x @ w,
    )


def _has_vicreg_reference(loss_kind: LossKind, cfg: LossConfig) -> bool:
    return (
        loss_kind is LossKind.VICREG
        and cfg.variance_mode is VarianceMode.SQUARED
        and cfg.alpha == cfg.beta
        and cfg.alpha > 0
    )


# =============================================================================
# Training loop
# =============================================================================


def _checked_loss(objective: Objective, params: Params, step: int) -> float:
    loss = float(objective.loss(params))
    if not np.isfinite(loss) or loss > DIVERGENCE_LOSS:
        raise DivergenceError(step, loss)
    return loss


def train_objective(
    loss_kind: LossKind,
    objective: Objective,
    params: Params,
    opt: OptimizerConfig,
    reference_loss: float | None = None,
) -> Trajectory:
    """Run the optimizer on any Objective from params; see train_embedding."""
    logger.info(
        LogMessages.TRAINING_START,
        loss_kind.value,
        opt.max_steps,
        opt.kind.value,
        opt.learning_rate,
    )
    optimizer = make_optimizer(opt)
    trajectory = Trajectory(loss_kind=loss_kind, reference_loss=reference_loss)

    def record(step: int, current: Params) -> None:
        loss = _checked_loss(objective, current, step)
        trajectory.record(step, loss, svd(objective.represent(current)).s)

    record(0, params)
    for step in range(1, opt.max_steps + 1):
        grad = objective.grad(params)
        if not np.all(np.isfinite(grad)):
            raise DivergenceError(step - 1, float(objective.loss(params)))
        optimizer.learning_rate = opt.learning_rate_at(step)
        params = optimizer.step(params, grad)
        if not np.all(np.isfinite(params)):
            raise DivergenceError(step, float("nan"))
        if step % opt.record_every == 0 or step == opt.max_steps:
            record(step, params)
        elif step % DIVERGENCE_CHECK_EVERY == 0:
            _checked_loss(objective, params, step)

    logger.info(LogMessages.TRAINING_DONE, loss_kind.value, trajectory.final.loss)
    return trajectory


def train_embedding(
    loss_kind: LossKind | str,
    g: RelationGraph,
    init_z: ArrayLike,
    cfg: LossConfig,
    opt: OptimizerConfig,
    matching: Matching | str = Matching.CROSS_ENTROPY,
    reference_loss: float | None = None,
) -> Trajectory:
    """Train a free embedding Z on G from init_z.

    Loss and singular values of Z are recorded at step 0, every
    opt.record_every steps and at the last step. For squared-variance
    VICReg with α = β the reference is vicreg_optimal's min_loss unless
    one is given. Between records the loss is checked every
    DIVERGENCE_CHECK_EVERY steps; parameters and gradients every step.

    Args:
        loss_kind: Objective to minimize
        g: Relation graph
        init_z: N×K starting embedding
        cfg: Loss hyperparameters
        opt: Optimizer settings
        matching: SimCLR comparison between G and its estimate
        reference_loss: Closed-form optimum to measure the gap against

    Returns:
        Trajectory: Recorded losses, gaps and singular values

    Raises:
        DivergenceError: If the loss exceeds DIVERGENCE_LOSS or goes non-finite
        ShapeMismatchError: If init_z does not have one row per node
    """
    loss_kind = LossKind.from_string(loss_kind)
    z = validate_embedding(init_z, "init_z").copy()
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    if reference_loss is None and _has_vicreg_reference(loss_kind, cfg):
        reference_loss = vicreg_optimal(g, cfg.alpha, cfg.gamma, z.shape[1]).min_loss
    objective = embedding_objective(loss_kind, g, cfg, matching)
    return train_objective(loss_kind, objective, z, opt, reference_loss)


def train_linear(
    loss_kind: LossKind | str,
    x: ArrayLike,
    g: RelationGraph,
    init_w: ArrayLike,
    cfg: LossConfig,
    opt: OptimizerConfig,
    matching: Matching | str = Matching.CROSS_ENTROPY,
    reference_loss: float | None = None,
) -> Trajectory:
    """Train linear weights W with Z = X·W; see train_embedding.

    The automatic VICReg reference is vicreg_linear_optimum's min_loss.
    """
    loss_kind = LossKind.from_string(loss_kind)
    x = validate_matrix(x, "x")
    w = validate_matrix(init_w, "init_w").copy()
    if w.shape[0] != x.shape[1]:
        raise ShapeMismatchError((x.shape[1],), (w.shape[0],))
    if x.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (x.shape[0],))
    if reference_loss is None and _has_vicreg_reference(loss_kind, cfg):
        reference_loss = vicreg_linear_optimum(
            x, g, cfg.alpha, cfg.gamma, w.shape[1]
        ).min_loss
    objective = linear_objective(loss_kind, x, g, cfg, matching)
    return train_objective(loss_kind, objective, w, opt, reference_loss)


def converged(trajectory: Trajectory, threshold: float = CONVERGENCE_GAP_SQ) -> bool:
    """True iff the final squared gap to the reference is at most threshold."""
    if not trajectory.points:
        return False
    gap_sq = trajectory.final.gap_sq
    return gap_sq is not None and gap_sq <= threshold
