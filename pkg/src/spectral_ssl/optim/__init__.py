"""Gradients, finite-difference checks and first-order trainers."""

from .finite_difference import central_difference, gradient_check
from .gradients import (
    grad_barlow_twins,
    grad_barlow_twins_embedding,
    grad_simclr,
    grad_vicreg,
    grad_vicreg_linear,
)
from .trainer import (
    SGD,
    Objective,
    Optimizer,
    RMSProp,
    converged,
    embedding_objective,
    linear_objective,
    make_optimizer,
    train_embedding,
    train_linear,
    train_objective,
)

__all__ = [
    "SGD",
    "Objective",
    "Optimizer",
    "RMSProp",
    "central_difference",
    "converged",
    "embedding_objective",
    "grad_barlow_twins",
    "grad_barlow_twins_embedding",
    "grad_simclr",
    "grad_vicreg",
    "grad_vicreg_linear",
    "gradient_check",
    "linear_objective",
    "make_optimizer",
    "train_embedding",
    "train_linear",
    "train_objective",
]
