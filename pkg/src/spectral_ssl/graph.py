"""Relation graph construction, Laplacians and the Dirichlet energy."""

import logging
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, sparse

from .config import RANK_TOL
from .exceptions import DegenerateGraphError, ShapeMismatchError, ValidationError
from .messages import ErrorMessages
from .models.graph import Laplacian, RelationGraph, Storage
from .validators import (
    validate_dimension,
    validate_embedding,
    validate_labels,
    validate_matrix,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Construction
# =============================================================================


def build_view_graph(
    n_base: int, views: int, storage: Storage | None = None
) -> RelationGraph:
    """Connect every view of a base sample to all its other views.

    Node v·n_base + n is view v of base sample n.

    Args:
        n_base: Number of base samples
        views: Number of views per sample (at least 2)
        storage: Force "dense" or "sparse"; auto by size when None

    Returns:
        RelationGraph: Binary graph on n_base·views nodes with degree views−1

    Raises:
        ValidationError: If n_base < 1 or views < 2
    """
    if isinstance(n_base, bool) or not isinstance(n_base, int) or n_base < 1:
        raise ValidationError("n_base must be a positive integer.")
    if isinstance(views, bool) or not isinstance(views, int) or views < 2:
        raise ValidationError("views must be an integer >= 2.")

    first, second = np.triu_indices(views, k=1)
    base = np.arange(n_base)
    rows = (first[:, None] * n_base + base[None, :]).ravel()
    cols = (second[:, None] * n_base + base[None, :]).ravel()
    return RelationGraph.from_edges(n_base * views, rows, cols, storage=storage)


def build_supervised_graph(
    labels: ArrayLike, storage: Storage | None = None
) -> RelationGraph:
    """Connect every pair of distinct samples sharing a label.

    Args:
        labels: Length-N integer labels
        storage: Force "dense" or "sparse"; auto by size when None

    Returns:
        RelationGraph: Binary graph with G[i, j] = 1 iff labels match and i ≠ j
    """
    labels = validate_labels(labels)
    rows: list[NDArray[np.int64]] = []
    cols: list[NDArray[np.int64]] = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        first, second = np.triu_indices(members.size, k=1)
        rows.append(members[first])
        cols.append(members[second])
    empty = np.zeros(0, dtype=np.int64)
    return RelationGraph.from_edges(
        labels.size,
        np.concatenate(rows) if rows else empty,
        np.concatenate(cols) if cols else empty,
        storage=storage,
    )


def clique_labels(n: int, cliques: int) -> NDArray[np.int64]:
    """Balanced contiguous labels 0..cliques−1 over n samples."""
    validate_dimension(n, "n", 1, np.iinfo(np.int32).max)
    validate_dimension(cliques, "cliques", 1, n)
    return (np.arange(n) * cliques // n).astype(np.int64)


def build_clique_graph(
    n: int, cliques: int, storage: Storage | None = None
) -> RelationGraph:
    """Union of balanced disjoint cliques; rank(G + I) equals cliques."""
    return build_supervised_graph(clique_labels(n, cliques), storage=storage)


# =============================================================================
# Degrees and Laplacians
# =============================================================================


def degree(g: RelationGraph) -> NDArray[np.float64]:
    """Return the row sums of G.

    Both storage backends accumulate the same row-major nonzeros, so the
    result is bit-identical for dense and sparse copies of a graph.
    """
    rows, _, values = g.triplets()
    return np.bincount(rows, weights=values, minlength=g.n).astype(float)


def laplacian(g: RelationGraph) -> Laplacian:
    """Return L = diag(degree(g)) − G in the graph's storage."""
    degrees = degree(g)
    if g.is_sparse:
        matrix = sparse.csr_array(sparse.diags_array(degrees, format="csr") - g.weights)
        matrix.sort_indices()
        return Laplacian(matrix)
    matrix = -g.to_dense()
    matrix[np.diag_indices(g.n)] = degrees
    return Laplacian(matrix)


def dirichlet_energy(z: ArrayLike, l: Laplacian) -> float:  # noqa: E741
    """Return Tr(ZᵀLZ), the smoothness of Z as a signal on the graph.

    Raises:
        ShapeMismatchError: If Z does not have one row per node
    """
    z = validate_embedding(z)
    if z.shape[0] != l.n:
        raise ShapeMismatchError((l.n,), (z.shape[0],))
    return max(float(np.sum(z * l.dot(z))), 0.0)


def invariance_sum(z: ArrayLike, g: RelationGraph) -> float:
    """Return Σ_{i,j} G[i,j]·||Z_i − Z_j||² over both triangles.

    Raises:
        ShapeMismatchError: If Z does not have one row per node
    """
    z = validate_embedding(z)
    if z.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (z.shape[0],))
    rows, cols, values = g.triplets()
    diff = z[rows] - z[cols]
    return float(np.sum(values * np.einsum("ij,ij->i", diff, diff)))


def row_normalize(g: RelationGraph) -> NDArray[np.float64]:
    """Return the dense right-stochastic matrix D⁻¹G.

    Raises:
        DegenerateGraphError: If some node has zero degree
    """
    degrees = degree(g)
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise DegenerateGraphError(node=int(isolated[0]))
    return g.to_dense() / degrees[:, None]


def relation_rank(g: RelationGraph, tol_rel: float = RANK_TOL) -> int:
    """Numerical rank of G + I, the rank governing SimCLR-type collapse.

    For a union of cliques this is the number of cliques.
    """
    eigenvalues = linalg.eigvalsh(g.to_dense() + np.eye(g.n))
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    if scale == 0:
        return 0
    return int(np.sum(np.abs(eigenvalues) > tol_rel * scale))


# =============================================================================
# Pair expansion
# =============================================================================


def pair_indices(
    g: RelationGraph, include_self: bool = False
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Return (left, right) node indices of G's nonzeros in row-major order.

    Args:
        g: Binary relation graph
        include_self: Also emit the (i, i) self pairs

    Raises:
        ValidationError: If g has non-binary weights
    """
    if not g.is_binary:
        raise ValidationError(ErrorMessages.NOT_BINARY)
    rows, cols, _ = g.triplets()
    if include_self:
        nodes = np.arange(g.n, dtype=np.int64)
        rows = np.concatenate([rows, nodes])
        cols = np.concatenate([cols, nodes])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
    return rows, cols


def pair_expand(
    g: RelationGraph, x: ArrayLike, include_self: bool = False
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Stack the two sides of every positive pair as two data matrices.

    Row m of the outputs holds samples i and j of the m-th nonzero (i, j).

    Args:
        g: Binary relation graph
        x: N×D data
        include_self: Also pair every sample with itself

    Returns:
        (X_left, X_right), each M×D

    Raises:
        ShapeMismatchError: If x does not have one row per node
        ValidationError: If g has non-binary weights
    """
    x = validate_matrix(x, "x")
    if x.shape[0] != g.n:
        raise ShapeMismatchError((g.n,), (x.shape[0],))
    left, right = pair_indices(g, include_self=include_self)
    return x[left], x[right]


# =============================================================================
# Persistence
# =============================================================================


def save_graph(g: RelationGraph, path: Path) -> Path:
    """Write a graph as JSON and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(g.to_json(), encoding="utf-8")
    return path


def load_graph(path: Path, storage: Storage | None = None) -> RelationGraph:
    """Load a graph written by save_graph."""
    return RelationGraph.from_json(Path(path).read_text(encoding="utf-8"), storage)
