"""Finite-difference checks of the analytic gradients."""

import numpy as np
import pytest

from spectral_ssl.closed_form import vicreg_optimal
from spectral_ssl.config import LossConfig
from spectral_ssl.exceptions import ShapeMismatchError
from spectral_ssl.losses import (
    barlow_twins_embedding_loss,
    barlow_twins_loss,
    simclr_loss,
    vicreg_loss,
)
from spectral_ssl.models.graph import RelationGraph
from spectral_ssl.optim import (
    central_difference,
    grad_barlow_twins,
    grad_barlow_twins_embedding,
    grad_simclr,
    grad_vicreg,
    grad_vicreg_linear,
    gradient_check,
)
from spectral_ssl.options import ConstraintSet, Matching, Metric, Regularizer, VarianceMode
from tests.conftest import FD_TOL, SMALL_N


class TestFiniteDifference:
    """Tests for the finite-difference helpers."""

    def test_quadratic(self) -> None:
        """Test the central difference of a quadratic.

        Verifies ∇(xᵀx) = 2x up to rounding.
        """
        x = np.array([[1.0, -2.0], [0.5, 3.0]])

        np.testing.assert_allclose(central_difference(lambda v: float(np.sum(v**2)), x), 2.0 * x, atol=1e-8)

    def test_check_of_zero_gradients(self) -> None:
        """Test gradient_check when both gradients vanish.

        Verifies a zero relative error.
        """
        assert gradient_check(lambda v: 1.0, np.zeros_like, np.ones(3)) == 0.0

    def test_check_detects_wrong_gradient(self) -> None:
        """Test a wrong gradient gives a large relative error.

        Verifies the error of 3x against ∇(xᵀx) = 2x.
        """
        error = gradient_check(lambda v: float(np.sum(v**2)), lambda v: 3.0 * v, np.ones(4))

        assert error == pytest.approx(1.0 / 3.0, rel=1e-6)


class TestVicregGradient:
    """Tests for grad_vicreg and grad_vicreg_linear."""

    @pytest.mark.parametrize("mode", list(VarianceMode))
    def test_matches_finite_difference(
        self, embedding: np.ndarray, weighted_graph: RelationGraph, mode: VarianceMode
    ) -> None:
        """Test the VICReg gradient in both variance modes.

        Verifies relative error below FD_TOL; the embedding is scaled so the
        hinge stays away from its kink.
        """
        cfg = LossConfig(alpha=1.5, beta=0.7, gamma=0.3, variance_mode=mode)
        z = 0.5 * embedding

        error = gradient_check(
            lambda v: vicreg_loss(v, weighted_graph, cfg),
            lambda v: grad_vicreg(v, weighted_graph, cfg),
            z,
        )

        assert error < FD_TOL

    def test_vanishes_at_optimum(self, weighted_graph: RelationGraph, analysis_config: LossConfig) -> None:
        """Test the gradient is zero at the closed-form optimum.

        Verifies ||∇|| ≈ 0 at Z*.
        """
        optimum = vicreg_optimal(weighted_graph, analysis_config.alpha, analysis_config.gamma, 3)

        grad = grad_vicreg(optimum.z_star, weighted_graph, analysis_config)

        assert np.linalg.norm(grad) < 1e-10

    def test_linear_matches_finite_difference(
        self, rng: np.random.Generator, clique_graph: RelationGraph, analysis_config: LossConfig
    ) -> None:
        """Test the gradient with respect to linear weights.

        Verifies relative error below FD_TOL.
        """
        x = rng.standard_normal((SMALL_N, 4))
        w = rng.standard_normal((4, 2))

        error = gradient_check(
            lambda v: vicreg_loss(x @ v, clique_graph, analysis_config),
            lambda v: grad_vicreg_linear(v, x, clique_graph, analysis_config),
            w,
        )

        assert error < FD_TOL

    def test_shape_mismatch(self, clique_graph: RelationGraph) -> None:
        """Test the gradient rejects a wrong row count.

        Verifies ShapeMismatchError.
        """
        with pytest.raises(ShapeMismatchError):
            grad_vicreg(np.ones((SMALL_N - 2, 2)), clique_graph, LossConfig())


class TestSimclrGradient:
    """Tests for grad_simclr across the estimator family."""

    @pytest.mark.parametrize("matching", list(Matching))
    @pytest.mark.parametrize("constraint", list(ConstraintSet))
    @pytest.mark.parametrize("regularizer", list(Regularizer))
    def test_cosine_family(
        self,
        embedding: np.ndarray,
        clique_graph: RelationGraph,
        matching: Matching,
        constraint: ConstraintSet,
        regularizer: Regularizer,
    ) -> None:
        """Test every regularizer × constraint × matching on cosine distances.

        Verifies relative error below FD_TOL. The Frobenius temperature keeps
        every estimate entry strictly inside the active set.
        """
        tau = 0.5 if regularizer is Regularizer.LOG else 50.0
        cfg = LossConfig(tau=tau, regularizer=regularizer, constraint=constraint)

        error = gradient_check(
            lambda v: simclr_loss(v, clique_graph, cfg, matching),
            lambda v: grad_simclr(v, clique_graph, cfg, matching),
            embedding,
        )

        assert error < FD_TOL

    @pytest.mark.parametrize("metric", [Metric.L2, Metric.L2_SQUARED])
    def test_euclidean_metrics(
        self, embedding: np.ndarray, weighted_graph: RelationGraph, metric: Metric
    ) -> None:
        """Test the infoNCE gradient under the l2 metrics.

        Verifies relative error below FD_TOL.
        """
        cfg = LossConfig(tau=2.0, metric=metric)

        error = gradient_check(
            lambda v: simclr_loss(v, weighted_graph, cfg),
            lambda v: grad_simclr(v, weighted_graph, cfg),
            embedding,
        )

        assert error < FD_TOL


class TestBarlowTwinsGradient:
    """Tests for the BarlowTwins gradients."""

    def test_two_view_gradient(self, rng: np.random.Generator) -> None:
        """Test both view gradients.

        Verifies relative error below FD_TOL for each view.
        """
        cfg = LossConfig(alpha_bt=0.3)
        left = rng.standard_normal((10, 3))
        right = left + 0.5 * rng.standard_normal((10, 3))

        left_error = gradient_check(
            lambda v: barlow_twins_loss(v, right, cfg),
            lambda v: grad_barlow_twins(v, right, cfg)[0],
            left,
        )
        right_error = gradient_check(
            lambda v: barlow_twins_loss(left, v, cfg),
            lambda v: grad_barlow_twins(left, v, cfg)[1],
            right,
        )

        assert left_error < FD_TOL
        assert right_error < FD_TOL

    def test_embedding_gradient(self, embedding: np.ndarray, view_graph: RelationGraph) -> None:
        """Test the gradient through pair expansion.

        Verifies relative error below FD_TOL.
        """
        cfg = LossConfig()

        error = gradient_check(
            lambda v: barlow_twins_embedding_loss(v, view_graph, cfg),
            lambda v: grad_barlow_twins_embedding(v, view_graph, cfg),
            embedding,
        )

        assert error < FD_TOL

    def test_view_gradients_are_centered(self, rng: np.random.Generator) -> None:
        """Test shifting a view leaves the loss unchanged.

        Verifies each gradient column sums to zero.
        """
        left = rng.standard_normal((8, 2))
        right = rng.standard_normal((8, 2))

        grad_left, grad_right = grad_barlow_twins(left, right, LossConfig())

        np.testing.assert_allclose(grad_left.sum(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(grad_right.sum(axis=0), 0.0, atol=1e-12)
