"""Relation graph and Laplacian models."""

import json
import logging
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse

from ..config import DENSE_GRAPH_LIMIT, SYMMETRY_TOL
from ..exceptions import GraphFormatError, ValidationError
from ..messages import ErrorMessages
from ..validators import validate_square

logger = logging.getLogger(__name__)

Storage = Literal["dense", "sparse"]


def choose_storage(n: int, storage: Storage | None = None) -> Storage:
    """Pick dense storage up to DENSE_GRAPH_LIMIT nodes, sparse above."""
    if storage is not None:
        if storage not in ("dense", "sparse"):
            raise ValidationError(f"Unknown storage '{storage}'.")
        return storage
    return "dense" if n <= DENSE_GRAPH_LIMIT else "sparse"


@dataclass(frozen=True, eq=False)
class RelationGraph:
    """Symmetric nonnegative relation matrix with a zero diagonal.

    Dense weights are held as a read-only ndarray; sparse weights as a CSR
    array with sorted indices and no explicit zeros, so iterating its
    nonzeros is row-major in both backends.

    Attributes:
        weights: N×N weights, dense ndarray or scipy CSR array
    """

    weights: NDArray[np.float64] | sparse.csr_array

    def __post_init__(self) -> None:
        """Validate and normalize the weight matrix.

        Raises:
            ValidationError: If weights are not square, finite, symmetric,
                nonnegative with a zero diagonal
        """
        if sparse.issparse(self.weights):
            weights = _validated_sparse(self.weights)
        else:
            weights = _validated_dense(self.weights)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        """Number of nodes."""
        return int(self.weights.shape[0])

    @property
    def is_sparse(self) -> bool:
        """Whether the weights are stored as a sparse array."""
        return sparse.issparse(self.weights)

    @property
    def storage(self) -> Storage:
        """Storage backend name."""
        return "sparse" if self.is_sparse else "dense"

    @property
    def nnz(self) -> int:
        """Number of nonzero entries (both triangles)."""
        if self.is_sparse:
            return int(self.weights.nnz)
        return int(np.count_nonzero(self.weights))

    @property
    def is_binary(self) -> bool:
        """Whether every nonzero weight equals 1."""
        _, _, values = self.triplets()
        return bool(np.all(values == 1.0))

    def triplets(self) -> tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.float64]]:
        """Return (rows, cols, values) of the nonzeros in row-major order."""
        if self.is_sparse:
            indptr = self.weights.indptr
            rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(indptr))
            cols = self.weights.indices.astype(np.int64)
            return rows, cols, self.weights.data.astype(float)
        rows, cols = np.nonzero(self.weights)
        return rows.astype(np.int64), cols.astype(np.int64), self.weights[rows, cols]

    def to_dense(self) -> NDArray[np.float64]:
        """Return a writable dense copy of the weights."""
        if self.is_sparse:
            return self.weights.toarray()
        return np.array(self.weights)

    def to_sparse(self) -> sparse.csr_array:
        """Return the weights as a CSR array."""
        if self.is_sparse:
            return self.weights.copy()
        return sparse.csr_array(self.weights)

    def with_storage(self, storage: Storage) -> "RelationGraph":
        """Return the same graph in the requested backend."""
        if storage == self.storage:
            return self
        if storage == "sparse":
            return RelationGraph(self.to_sparse())
        return RelationGraph(self.to_dense())

    @classmethod
    def from_edges(
        cls,
        n: int,
        rows: ArrayLike,
        cols: ArrayLike,
        values: ArrayLike | None = None,
        storage: Storage | None = None,
    ) -> "RelationGraph":
        """Build a graph from one-sided edge lists.

        Each (row, col) pair is mirrored to (col, row); duplicate pairs are
        summed.

        Args:
            n: Number of nodes
            rows: Edge source indices
            cols: Edge target indices
            values: Edge weights (defaults to 1)
            storage: Force "dense" or "sparse"; auto by size when None

        Returns:
            RelationGraph: The symmetric graph
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = (
            np.ones(rows.shape[0])
            if values is None
            else np.asarray(values, dtype=float)
        )
        if np.any(rows == cols):
            raise ValidationError(ErrorMessages.NONZERO_DIAGONAL)
        coo = sparse.coo_array(
            (
                np.concatenate([values, values]),
                (np.concatenate([rows, cols]), np.concatenate([cols, rows])),
            ),
            shape=(n, n),
        )
        csr = coo.tocsr()
        if choose_storage(n, storage) == "sparse":
            return cls(csr)
        return cls(csr.toarray())

    def to_json(self) -> str:
        """Serialize as {"n": N, "edges": [[i, j, w], ...]} with i < j."""
        rows, cols, values = self.triplets()
        upper = rows < cols
        edges = [
            [int(i), int(j), float(w)]
            for i, j, w in zip(rows[upper], cols[upper], values[upper], strict=True)
        ]
        return json.dumps({"n": self.n, "edges": edges})

    @classmethod
    def from_json(cls, text: str, storage: Storage | None = None) -> "RelationGraph":
        """Load a graph from its JSON edge-list form.

        Args:
            text: JSON document
            storage: Force "dense" or "sparse"; auto by size when None

        Returns:
            RelationGraph: The loaded graph

        Raises:
            GraphFormatError: If the document is malformed or an edge is on
                the diagonal, negative, out of range, duplicated or has i > j
        """
        try:
            payload: Any = json.loads(text)
        except json.JSONDecodeError as e:
            raise GraphFormatError(f"Invalid graph JSON: {e}") from e
        if not isinstance(payload, dict) or "n" not in payload or "edges" not in payload:
            raise GraphFormatError('Graph JSON must contain "n" and "edges".')
        n = payload["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise GraphFormatError('"n" must be a nonnegative integer.')

        rows: list[int] = []
        cols: list[int] = []
        values: list[float] = []
        seen: set[tuple[int, int]] = set()
        for edge in payload["edges"]:
            i, j, w = _parse_edge(edge, n)
            if (i, j) in seen:
                raise GraphFormatError(
                    ErrorMessages.BAD_EDGE.format(edge=edge, reason="duplicate")
                )
            seen.add((i, j))
            if w == 0:
                continue
            rows.append(i)
            cols.append(j)
            values.append(w)
        return cls.from_edges(n, rows, cols, values, storage=storage)


def _parse_edge(edge: Any, n: int) -> tuple[int, int, float]:
    if not isinstance(edge, list | tuple) or len(edge) != 3:
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="expected [i, j, w]")
        )
    i, j, w = edge
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="indices must be integers")
        )
    if not (0 <= i < n and 0 <= j < n):
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="index out of range")
        )
    if i == j:
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="diagonal entry")
        )
    if i > j:
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="edges must have i < j")
        )
    try:
        weight = float(w)
    except (TypeError, ValueError) as e:
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="weight is not a number")
        ) from e
    if not np.isfinite(weight) or weight < 0:
        raise GraphFormatError(
            ErrorMessages.BAD_EDGE.format(edge=edge, reason="negative or non-finite")
        )
    return i, j, weight


def _validated_dense(weights: ArrayLike) -> NDArray[np.float64]:
    array = validate_square(weights, "weights")
    if np.any(array < 0):
        raise ValidationError(ErrorMessages.NEGATIVE_WEIGHTS)
    if np.any(np.diag(array) != 0):
        raise ValidationError(ErrorMessages.NONZERO_DIAGONAL)
    if array.size:
        asymmetry = float(np.max(np.abs(array - array.T)))
        if asymmetry > SYMMETRY_TOL * max(1.0, float(array.max())):
            raise ValidationError(
                ErrorMessages.NOT_SYMMETRIC.format(name="weights", asymmetry=asymmetry)
            )
    array = 0.5 * (array + array.T)
    array.flags.writeable = False
    return array


def _validated_sparse(weights: sparse.sparray | sparse.spmatrix) -> sparse.csr_array:
    csr = sparse.csr_array(weights, dtype=float)
    if csr.shape[0] != csr.shape[1]:
        raise ValidationError(ErrorMessages.NOT_SQUARE.format(name="weights", shape=csr.shape))
    csr.sum_duplicates()
    csr.eliminate_zeros()
    if not np.all(np.isfinite(csr.data)):
        raise ValidationError(ErrorMessages.NOT_FINITE.format(name="weights"))
    if np.any(csr.data < 0):
        raise ValidationError(ErrorMessages.NEGATIVE_WEIGHTS)
    if np.any(csr.diagonal() != 0):
        raise ValidationError(ErrorMessages.NONZERO_DIAGONAL)
    if csr.nnz:
        asymmetry = float(abs(csr - csr.T).max())
        if asymmetry > SYMMETRY_TOL * max(1.0, float(csr.data.max())):
            raise ValidationError(
                ErrorMessages.NOT_SYMMETRIC.format(name="weights", asymmetry=asymmetry)
            )
    csr = sparse.csr_array(0.5 * (csr + csr.T))
    csr.eliminate_zeros()
    csr.sort_indices()
    return csr


@dataclass(frozen=True, eq=False)
class Laplacian:
    """Graph Laplacian L = D − G in the storage of its graph.

    Attributes:
        matrix: N×N Laplacian, dense ndarray or CSR array
    """

    matrix: NDArray[np.float64] | sparse.csr_array

    @property
    def n(self) -> int:
        """Matrix dimension."""
        return int(self.matrix.shape[0])

    @property
    def storage(self) -> Storage:
        """Storage backend name."""
        return "sparse" if sparse.issparse(self.matrix) else "dense"

    def dot(self, z: NDArray[np.float64]) -> NDArray[np.float64]:
        """Return L·Z as a dense array."""
        return np.asarray(self.matrix @ z)

    def to_dense(self) -> NDArray[np.float64]:
        """Return a dense copy of the Laplacian."""
        if sparse.issparse(self.matrix):
            return self.matrix.toarray()
        return np.array(self.matrix)
