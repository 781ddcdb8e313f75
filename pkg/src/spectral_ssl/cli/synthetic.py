"""Synthetic datasets, relation graphs and targets for the experiments."""

from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from ..exceptions import ValidationError
from ..graph import build_clique_graph, clique_labels
from ..models.graph import RelationGraph, Storage
from ..validators import validate_dimension

# Distance scale between class means, in units of the within-class std
DEFAULT_SEPARATION = 4.0


class SyntheticTask(NamedTuple):
    """Gaussian class blobs with their labels and one-hot targets."""

    x: NDArray[np.float64]
    labels: NDArray[np.int64]
    y: NDArray[np.float64]


class RelationTask(NamedTuple):
    """A relation graph, a target matrix and the embedding dimension to probe."""

    graph: RelationGraph
    y: NDArray[np.float64]
    k: int


def one_hot(labels: NDArray[np.int64], classes: int) -> NDArray[np.float64]:
    """N×classes indicator matrix of integer labels."""
    y = np.zeros((labels.size, classes))
    y[np.arange(labels.size), labels] = 1.0
    return y


def make_synthetic_task(
    n: int,
    classes: int,
    dim: int,
    seed: int,
    separation: float = DEFAULT_SEPARATION,
) -> SyntheticTask:
    """Balanced Gaussian blobs in `dim` dimensions.

    Labels are contiguous blocks (clique_labels), class means are drawn
    with standard deviation `separation` and points have unit noise.

    Raises:
        ValidationError: If classes > n or a size is not positive
    """
    n = validate_dimension(n, "n", 1, np.iinfo(np.int32).max)
    classes = validate_dimension(classes, "classes", 1, n)
    dim = validate_dimension(dim, "dim", 1, np.iinfo(np.int32).max)
    rng = np.random.default_rng(seed)
    labels = clique_labels(n, classes)
    means = separation * rng.standard_normal((classes, dim))
    x = means[labels] + rng.standard_normal((n, dim))
    return SyntheticTask(x, labels, one_hot(labels, classes))


def make_relation_task(
    n: int, classes: int, k: int, storage: Storage | None = None
) -> RelationTask:
    """Clique graph with one-hot targets of the same cliques.

    The graph's eigenvectors are aligned with the targets' singular vectors.
    """
    graph = build_clique_graph(n, classes, storage=storage)
    validate_dimension(k, "k", 1, n)
    return RelationTask(graph, one_hot(clique_labels(n, classes), classes), k)


def make_adversarial_task(n: int, target_rank: int) -> RelationTask:
    """Weighted pair graph whose positive eigenspace misses the targets.

    Node c is paired with c + n/2 with weight 1.5 + 0.1·c. G + I is then
    positive exactly on the symmetric vectors e_c + e_{c+n/2}, while the
    targets e_c − e_{c+n/2} (c < target_rank) are antisymmetric. VICReg at
    small γ ranks the antisymmetric modes of the lightest pairs right after
    the symmetric ones, so K = n/2 + target_rank − 1 reaches them.

    Raises:
        ValidationError: If n is odd or target_rank is out of 1..n/2
    """
    if n < 2 or n % 2:
        raise ValidationError("Adversarial task needs an even n >= 2.")
    half = n // 2
    target_rank = validate_dimension(target_rank, "target_rank", 1, half)
    first = np.arange(half)
    graph = RelationGraph.from_edges(
        n, first, first + half, values=1.5 + 0.1 * first, storage="dense"
    )
    y = np.zeros((n, target_rank))
    y[np.arange(target_rank), np.arange(target_rank)] = 1.0
    y[np.arange(target_rank) + half, np.arange(target_rank)] = -1.0
    return RelationTask(graph, y, half + target_rank - 1)
