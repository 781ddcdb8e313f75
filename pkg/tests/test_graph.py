"""Tests for relation graph construction, Laplacians and pair expansion."""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spectral_ssl.exceptions import DegenerateGraphError, ShapeMismatchError, ValidationError
from spectral_ssl.graph import (
    build_clique_graph,
    build_supervised_graph,
    build_view_graph,
    clique_labels,
    degree,
    dirichlet_energy,
    invariance_sum,
    laplacian,
    load_graph,
    pair_expand,
    pair_indices,
    relation_rank,
    row_normalize,
    save_graph,
)
from spectral_ssl.models.graph import RelationGraph
from tests.conftest import CLIQUES, SMALL_N, TIGHT_TOL


@st.composite
def graph_and_embedding(draw: st.DrawFn) -> tuple[RelationGraph, np.ndarray]:
    """Draw a random weighted graph with N <= 16 and a matching embedding."""
    n = draw(st.integers(min_value=2, max_value=16))
    k = draw(st.integers(min_value=1, max_value=4))
    unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
    raw = draw(arrays(np.float64, (n, n), elements=unit))
    mask = draw(arrays(np.bool_, (n, n)))
    upper = np.triu(raw * mask, 1)
    coords = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
    z = draw(arrays(np.float64, (n, k), elements=coords))
    storage = draw(st.sampled_from(["dense", "sparse"]))
    return RelationGraph(upper + upper.T).with_storage(storage), z


class TestBuilders:
    """Tests for graph constructors."""

    def test_view_graph_degrees(self) -> None:
        """Test the view graph connects every view of a sample.

        Verifies degree views − 1 and the node layout v·n_base + n.
        """
        g = build_view_graph(4, 3)
        dense = g.to_dense()

        np.testing.assert_array_equal(degree(g), np.full(12, 2.0))
        assert dense[1, 5] == dense[1, 9] == dense[5, 9] == 1.0
        assert dense[1, 2] == 0.0

    @pytest.mark.parametrize(("n_base", "views"), [(0, 2), (3, 1), (2.5, 2)])
    def test_view_graph_invalid(self, n_base: object, views: object) -> None:
        """Test invalid view-graph sizes.

        Verifies ValidationError for empty bases and single views.
        """
        with pytest.raises(ValidationError):
            build_view_graph(n_base, views)

    def test_supervised_graph(self) -> None:
        """Test same-label samples are connected.

        Verifies edges exactly between equal labels.
        """
        labels = np.array([0, 1, 0, 2, 1])
        dense = build_supervised_graph(labels).to_dense()

        expected = (labels[:, None] == labels[None, :]).astype(float) - np.eye(5)
        np.testing.assert_array_equal(dense, expected)

    def test_clique_labels_balanced(self) -> None:
        """Test clique labels are contiguous and balanced.

        Verifies 12 samples in 3 cliques give blocks of 4.
        """
        np.testing.assert_array_equal(clique_labels(12, 3), np.repeat([0, 1, 2], 4))

    def test_clique_relation_rank(self, clique_graph: RelationGraph) -> None:
        """Test rank(G + I) equals the number of cliques.

        Verifies relation_rank on the fixture graph.
        """
        assert relation_rank(clique_graph) == CLIQUES

    def test_relation_rank_counts_negative_eigenvalues(self) -> None:
        """Test pairs joined with weight 2, where G + I has eigenvalues 3 and −1.

        Verifies both signs count, matching numpy's matrix rank.
        """
        g = RelationGraph.from_edges(8, [0, 2, 4, 6], [1, 3, 5, 7], [2.0, 2.0, 2.0, 2.0])

        assert relation_rank(g) == 8
        assert relation_rank(g) == np.linalg.matrix_rank(g.to_dense() + np.eye(8))

    def test_save_and_load(self, tmp_path: Path, clique_graph: RelationGraph) -> None:
        """Test graph persistence.

        Verifies the loaded graph matches the saved one in sparse storage.
        """
        path = save_graph(clique_graph, tmp_path / "graphs" / "g.json")
        loaded = load_graph(path, storage="sparse")

        assert loaded.is_sparse
        np.testing.assert_array_equal(loaded.to_dense(), clique_graph.to_dense())


class TestLaplacian:
    """Tests for degrees, Laplacians and the Dirichlet energy."""

    def test_laplacian_rows_sum_to_zero(self, weighted_graph: RelationGraph) -> None:
        """Test L = D − G annihilates constants.

        Verifies L·1 = 0 and the diagonal equals the degrees.
        """
        lap = laplacian(weighted_graph)

        np.testing.assert_allclose(lap.dot(np.ones((SMALL_N, 1))), 0.0, atol=TIGHT_TOL)
        np.testing.assert_allclose(np.diag(lap.to_dense()), degree(weighted_graph))

    def test_backends_agree_exactly(self, weighted_graph: RelationGraph) -> None:
        """Test dense and sparse Laplacians are bit-identical.

        Verifies degrees and Laplacian entries for both storages.
        """
        sparse_graph = weighted_graph.with_storage("sparse")

        np.testing.assert_array_equal(degree(weighted_graph), degree(sparse_graph))
        np.testing.assert_array_equal(
            laplacian(weighted_graph).to_dense(), laplacian(sparse_graph).to_dense()
        )
        assert laplacian(sparse_graph).storage == "sparse"

    @settings(max_examples=100, deadline=None)
    @given(graph_and_embedding())
    def test_dirichlet_identity(self, case: tuple[RelationGraph, np.ndarray]) -> None:
        """Test 2·Tr(ZᵀLZ) equals the pairwise invariance sum.

        Verifies the identity on random weighted graphs up to 1e-10·scale.
        """
        g, z = case
        lhs = 2.0 * dirichlet_energy(z, laplacian(g))
        rhs = invariance_sum(z, g)
        scale = max(1.0, float(np.sum(g.to_dense())) * float(np.max(z**2, initial=0.0)))

        assert abs(lhs - rhs) <= 1e-10 * scale

    def test_dirichlet_shape_mismatch(self, clique_graph: RelationGraph) -> None:
        """Test the energy rejects embeddings with the wrong row count.

        Verifies ShapeMismatchError.
        """
        with pytest.raises(ShapeMismatchError):
            dirichlet_energy(np.zeros((SMALL_N + 1, 2)), laplacian(clique_graph))

    def test_row_normalize(self, weighted_graph: RelationGraph) -> None:
        """Test D⁻¹G is right-stochastic.

        Verifies rows sum to one.
        """
        np.testing.assert_allclose(row_normalize(weighted_graph).sum(axis=1), 1.0)

    def test_row_normalize_isolated_node(self) -> None:
        """Test an isolated node makes row normalization fail.

        Verifies DegenerateGraphError names the node.
        """
        g = RelationGraph.from_edges(3, [0], [1])
        with pytest.raises(DegenerateGraphError) as exc_info:
            row_normalize(g)
        assert exc_info.value.node == 2


class TestPairExpansion:
    """Tests for pair_indices and pair_expand."""

    def test_pairs_are_row_major(self, view_graph: RelationGraph) -> None:
        """Test one row per nonzero in row-major order.

        Verifies both directions of every pair appear.
        """
        left, right = pair_indices(view_graph)
        half = SMALL_N // 2

        assert left.size == SMALL_N
        np.testing.assert_array_equal(left, np.arange(SMALL_N))
        np.testing.assert_array_equal(right, (np.arange(SMALL_N) + half) % SMALL_N)

    def test_include_self(self, view_graph: RelationGraph) -> None:
        """Test self pairs are merged in row-major order.

        Verifies the count and that (i, i) precedes (i, j) for j > i.
        """
        left, right = pair_indices(view_graph, include_self=True)

        assert left.size == 2 * SMALL_N
        assert (left[0], right[0]) == (0, 0)
        assert np.all(np.diff(left) >= 0)

    def test_pair_expand_rows(self, view_graph: RelationGraph) -> None:
        """Test expanded views hold the data rows of each pair.

        Verifies X_left[m] = X[i] and X_right[m] = X[j].
        """
        x = np.arange(SMALL_N * 2, dtype=float).reshape(SMALL_N, 2)
        x_left, x_right = pair_expand(view_graph, x)
        left, right = pair_indices(view_graph)

        np.testing.assert_array_equal(x_left, x[left])
        np.testing.assert_array_equal(x_right, x[right])

    def test_weighted_graph_rejected(self, weighted_graph: RelationGraph) -> None:
        """Test pair expansion requires a binary graph.

        Verifies ValidationError for weights other than 1.
        """
        with pytest.raises(ValidationError, match="binary"):
            pair_indices(weighted_graph)
