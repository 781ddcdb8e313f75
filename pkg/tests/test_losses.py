"""Tests for the VICReg, SimCLR and BarlowTwins losses."""

import numpy as np
import pytest
from scipy import special

from spectral_ssl.config import LossConfig
from spectral_ssl.exceptions import ShapeMismatchError, ValidationError
from spectral_ssl.graph import invariance_sum, row_normalize
from spectral_ssl.losses import (
    barlow_twins_embedding_loss,
    barlow_twins_loss,
    covariance,
    cross_correlation,
    cross_entropy_match_loss,
    euclidean_match_loss,
    infonce_loss,
    simclr_estimate,
    simclr_loss,
    variance_term,
    vicreg_loss,
    vicreg_terms,
)
from spectral_ssl.models.graph import RelationGraph
from spectral_ssl.options import ConstraintSet, Matching, Metric, Regularizer
from tests.conftest import SMALL_K, SMALL_N, TIGHT_TOL


class TestVicreg:
    """Tests for the VICReg loss and its terms."""

    def test_covariance_is_biased(self, embedding: np.ndarray) -> None:
        """Test covariance divides by N.

        Verifies agreement with numpy's bias=True covariance.
        """
        np.testing.assert_allclose(
            covariance(embedding), np.cov(embedding, rowvar=False, bias=True), atol=TIGHT_TOL
        )

    def test_variance_modes(self) -> None:
        """Test hinge and squared variance penalties.

        Verifies Σ max(0, 1 − √C_kk) and Σ (1 − C_kk)².
        """
        cov = np.diag([0.25, 4.0])

        assert variance_term(cov, "hinge") == pytest.approx(0.5)
        assert variance_term(cov, "squared") == pytest.approx(0.5625 + 9.0)

    def test_collapsed_dimension_hinge(self, clique_graph: RelationGraph) -> None:
        """Test hinge variance of an embedding with constant columns.

        Verifies each collapsed dimension scores exactly 1.
        """
        z = np.ones((clique_graph.n, 3))

        assert variance_term(covariance(z), "hinge") == 3.0
        assert vicreg_terms(z, clique_graph, LossConfig()).variance == 3.0

    def test_terms_combine_with_weights(
        self, embedding: np.ndarray, clique_graph: RelationGraph
    ) -> None:
        """Test vicreg_loss = α·variance + β·covariance + γ·invariance.

        Verifies the weighting and the invariance normalization by N.
        """
        cfg = LossConfig(alpha=2.0, beta=3.0, gamma=0.5)
        terms = vicreg_terms(embedding, clique_graph, cfg)

        assert terms.invariance == pytest.approx(invariance_sum(embedding, clique_graph) / SMALL_N)
        assert vicreg_loss(embedding, clique_graph, cfg) == pytest.approx(
            2.0 * terms.variance + 3.0 * terms.covariance + 0.5 * terms.invariance
        )

    def test_whitened_constant_on_cliques_is_zero(self, clique_graph: RelationGraph) -> None:
        """Test a whitened clique-constant embedding has zero loss.

        Verifies all three terms vanish for Z with unit, uncorrelated columns
        that do not vary within a clique.
        """
        labels = np.repeat(np.arange(3), SMALL_N // 3)
        indicator = np.eye(3)[labels]
        centered = indicator - indicator.mean(axis=0)
        basis, _ = np.linalg.qr(centered)
        z = basis[:, :2] * np.sqrt(SMALL_N)

        assert vicreg_loss(z, clique_graph, LossConfig.analysis(gamma=1.0)) == pytest.approx(0.0, abs=1e-10)

    def test_shape_mismatch(self, clique_graph: RelationGraph) -> None:
        """Test Z must have one row per node.

        Verifies ShapeMismatchError.
        """
        with pytest.raises(ShapeMismatchError):
            vicreg_loss(np.zeros((SMALL_N - 1, 2)), clique_graph, LossConfig())

    def test_empty_embedding(self) -> None:
        """Test covariance of an empty embedding raises.

        Verifies ValidationError.
        """
        with pytest.raises(ValidationError):
            covariance(np.zeros((0, 2)))


class TestSimclr:
    """Tests for the SimCLR estimate, matching losses and infoNCE."""

    def test_estimate_is_row_softmax(self, embedding: np.ndarray) -> None:
        """Test the cosine estimate is a softmax over k ≠ i.

        Verifies a zero diagonal and rows summing to one.
        """
        g_hat = simclr_estimate(embedding, tau=0.5)

        np.testing.assert_allclose(np.diag(g_hat), 0.0)
        np.testing.assert_allclose(g_hat.sum(axis=1), 1.0)

    def test_estimate_l2_orders_by_distance(self) -> None:
        """Test the l2 estimate favours the nearest neighbour.

        Verifies row 0 puts most mass on its nearest point.
        """
        z = np.array([[0.0], [0.1], [5.0]])
        g_hat = simclr_estimate(z, tau=1.0, metric=Metric.L2)

        assert g_hat[0, 1] > g_hat[0, 2]

    def test_estimate_rejects_bad_input(self) -> None:
        """Test the estimate needs two rows and a positive temperature.

        Verifies ValidationError for both.
        """
        with pytest.raises(ValidationError):
            simclr_estimate(np.ones((1, 2)), tau=1.0)
        with pytest.raises(ValidationError):
            simclr_estimate(np.ones((2, 2)), tau=0.0)

    def test_infonce_matches_manual(self, embedding: np.ndarray, clique_graph: RelationGraph) -> None:
        """Test infoNCE against a direct computation.

        Verifies −Σ Ḡ_ij log softmax_ij.
        """
        cfg = LossConfig(tau=0.7)
        unit = embedding / np.linalg.norm(embedding, axis=1, keepdims=True)
        logits = unit @ unit.T / 0.7
        np.fill_diagonal(logits, -np.inf)
        target = row_normalize(clique_graph)
        log_softmax = special.log_softmax(logits, axis=1)
        expected = -np.sum(target[target > 0] * log_softmax[target > 0])

        assert infonce_loss(clique_graph, embedding, cfg) == pytest.approx(expected, rel=1e-9)

    def test_simclr_loss_reduces_to_infonce(
        self, embedding: np.ndarray, clique_graph: RelationGraph
    ) -> None:
        """Test the log / right-stochastic / cross-entropy member is infoNCE.

        Verifies the two evaluations agree.
        """
        cfg = LossConfig(tau=0.5)

        assert simclr_loss(embedding, clique_graph, cfg, Matching.CROSS_ENTROPY) == pytest.approx(
            infonce_loss(clique_graph, embedding, cfg), rel=1e-8
        )

    def test_euclidean_match_loss(self) -> None:
        """Test the Frobenius comparison.

        Verifies ||G − Ĝ||² and the shape check.
        """
        g = np.array([[0.0, 1.0], [1.0, 0.0]])
        g_hat = np.array([[0.0, 0.5], [0.5, 0.0]])

        assert euclidean_match_loss(g, g_hat) == pytest.approx(0.5)
        with pytest.raises(ShapeMismatchError):
            euclidean_match_loss(g, np.zeros((3, 3)))

    def test_cross_entropy_clamps_zero_estimates(self) -> None:
        """Test zero estimate entries stay finite through the eps clamp.

        Verifies the loss is finite and large.
        """
        g = np.array([[0.0, 1.0], [1.0, 0.0]])
        loss = cross_entropy_match_loss(g, np.zeros((2, 2)))

        assert np.isfinite(loss)
        assert loss > 20.0

    @pytest.mark.parametrize("regularizer", list(Regularizer))
    @pytest.mark.parametrize("constraint", list(ConstraintSet))
    def test_simclr_loss_variants_finite(
        self,
        embedding: np.ndarray,
        clique_graph: RelationGraph,
        regularizer: Regularizer,
        constraint: ConstraintSet,
    ) -> None:
        """Test every regularizer × constraint combination evaluates.

        Verifies nonnegative finite losses for both matchings.
        """
        cfg = LossConfig(tau=0.5, regularizer=regularizer, constraint=constraint)
        for matching in Matching:
            loss = simclr_loss(embedding, clique_graph, cfg, matching)
            assert np.isfinite(loss)
            assert loss >= 0.0


class TestBarlowTwins:
    """Tests for the BarlowTwins loss."""

    def test_identical_views_have_unit_diagonal(self, embedding: np.ndarray) -> None:
        """Test C(Z, Z) has a unit diagonal.

        Verifies the diagonal term vanishes for identical views.
        """
        c = cross_correlation(embedding, embedding)

        np.testing.assert_allclose(np.diag(c), 1.0, atol=1e-10)

    def test_loss_of_whitened_identical_views(self, rng: np.random.Generator) -> None:
        """Test identical whitened views give zero loss.

        Verifies both terms vanish for orthogonal centered columns.
        """
        centered = rng.standard_normal((20, SMALL_K))
        centered -= centered.mean(axis=0)
        basis, _ = np.linalg.qr(centered)

        assert barlow_twins_loss(basis, basis, LossConfig()) == pytest.approx(0.0, abs=1e-10)

    def test_off_diagonal_weight(self) -> None:
        """Test the off-diagonal term is weighted by α_bt.

        Verifies the loss for perfectly correlated columns.
        """
        column = np.array([[1.0], [-1.0], [2.0], [-2.0]])
        z = np.hstack([column, column])
        loss = barlow_twins_loss(z, z, LossConfig(alpha_bt=0.25))

        assert loss == pytest.approx(0.25 * 2.0, rel=1e-9)

    def test_view_shapes_must_match(self) -> None:
        """Test views of different shapes are rejected.

        Verifies ShapeMismatchError.
        """
        with pytest.raises(ShapeMismatchError):
            cross_correlation(np.ones((3, 2)), np.ones((4, 2)))

    def test_embedding_loss_uses_pairs(self, embedding: np.ndarray, view_graph: RelationGraph) -> None:
        """Test the graph form equals the loss on pair-expanded views.

        Verifies agreement with barlow_twins_loss on gathered rows.
        """
        half = SMALL_N // 2
        left = np.arange(SMALL_N)
        right = (left + half) % SMALL_N
        cfg = LossConfig()

        assert barlow_twins_embedding_loss(embedding, view_graph, cfg) == pytest.approx(
            barlow_twins_loss(embedding[left], embedding[right], cfg)
        )
