"""Tests for eigensolvers, SVD and numerical rank."""

import numpy as np
import pytest
from scipy import sparse

from spectral_ssl.eigensolver import (
    check_operator_symmetry,
    fix_signs,
    generalized_topk,
    lobpcg_topk,
    max_principal_angle,
    numerical_rank,
    orthonormalize,
    psd_inverse_sqrt,
    psd_sqrt,
    svd,
    sym_eig,
)
from spectral_ssl.exceptions import ValidationError
from spectral_ssl.options import Preconditioner
from tests.conftest import TIGHT_TOL


@pytest.fixture
def symmetric(rng: np.random.Generator) -> np.ndarray:
    """A random 6×6 symmetric matrix."""
    a = rng.standard_normal((6, 6))
    return a + a.T


@pytest.fixture
def spiked_operator() -> sparse.csr_array:
    """A 400×400 sparse diagonal with three well-separated leading values."""
    values = np.linspace(0.0, 1.0, 400)
    values[:3] = [1000.0, 900.0, 800.0]
    return sparse.csr_array(sparse.diags_array(values))


class TestDenseRoutines:
    """Tests for sym_eig, svd and the PSD helpers."""

    def test_sym_eig_canonical(self, symmetric: np.ndarray) -> None:
        """Test eigenvalues descend and eigenvector pivots are positive.

        Verifies the reconstruction and the sign convention.
        """
        spectrum = sym_eig(symmetric)
        pivots = np.argmax(np.abs(spectrum.eigenvectors), axis=0)

        assert np.all(np.diff(spectrum.eigenvalues) <= 0)
        assert np.all(spectrum.eigenvectors[pivots, np.arange(6)] > 0)
        np.testing.assert_allclose(spectrum.reconstruct(), symmetric, atol=1e-10)

    def test_sym_eig_ties_ordered(self) -> None:
        """Test tied eigenvalues keep a deterministic vector order.

        Verifies unit eigenvectors come back ordered within the tie.
        """
        spectrum = sym_eig(np.diag([1.0, 2.0, 1.0]))

        np.testing.assert_array_equal(spectrum.eigenvalues, [2.0, 1.0, 1.0])
        np.testing.assert_allclose(spectrum.eigenvectors, np.eye(3)[:, [1, 0, 2]], atol=1e-12)

    def test_sym_eig_rejects_asymmetric(self) -> None:
        """Test asymmetric input is rejected.

        Verifies ValidationError.
        """
        with pytest.raises(ValidationError, match="not symmetric"):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_fix_signs(self) -> None:
        """Test sign fixing flips columns whose pivot is negative.

        Verifies both columns end up with positive pivots.
        """
        fixed = fix_signs(np.array([[-3.0, 1.0], [1.0, -0.5]]))

        np.testing.assert_array_equal(fixed, [[3.0, 1.0], [-1.0, -0.5]])

    def test_svd(self, rng: np.random.Generator) -> None:
        """Test the thin SVD.

        Verifies descending values and reconstruction.
        """
        m = rng.standard_normal((7, 3))
        u, s, v = svd(m)

        assert u.shape == (7, 3) and v.shape == (3, 3)
        assert np.all(np.diff(s) <= 0)
        np.testing.assert_allclose((u * s) @ v.T, m, atol=1e-12)

    def test_svd_empty(self) -> None:
        """Test an empty matrix has an empty SVD.

        Verifies the shapes of the factors.
        """
        u, s, v = svd(np.zeros((4, 0)))

        assert u.shape == (4, 0) and s.shape == (0,) and v.shape == (0, 0)

    @pytest.mark.parametrize(
        ("values", "expected"),
        [([3.0, 1.0, 1e-11], 2), ([0.0, 0.0], 0), ([], 0), ([-2.0, 1.0], 2)],
    )
    def test_numerical_rank(self, values: list[float], expected: int) -> None:
        """Test counting values above the relative tolerance.

        Verifies zero and empty inputs have rank 0.
        """
        assert numerical_rank(values) == expected

    def test_psd_sqrt(self, rng: np.random.Generator) -> None:
        """Test the principal square root squares back.

        Verifies S·S = A for a PSD matrix.
        """
        m = rng.standard_normal((5, 5))
        a = m @ m.T
        root = psd_sqrt(a)

        np.testing.assert_allclose(root @ root, a, atol=1e-9)

    def test_psd_inverse_sqrt_drops_null_space(self) -> None:
        """Test the pseudo-inverse square root on a singular matrix.

        Verifies the kept mode is inverted and the null mode stays zero.
        """
        result = psd_inverse_sqrt(np.diag([4.0, 0.0]))

        np.testing.assert_allclose(result, np.diag([0.5, 0.0]), atol=TIGHT_TOL)

    def test_principal_angle(self) -> None:
        """Test the largest principal angle.

        Verifies zero for the same span and π/2 for orthogonal spans.
        """
        a = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])

        assert max_principal_angle(a, a @ np.array([[2.0, 1.0], [0.0, 1.0]])) == pytest.approx(0.0, abs=1e-8)
        assert max_principal_angle(a[:, :1], np.array([[0.0], [0.0], [1.0]])) == pytest.approx(np.pi / 2)


class TestOperators:
    """Tests for operator helpers."""

    def test_symmetry_probe_accepts_symmetric(self, symmetric: np.ndarray) -> None:
        """Test a symmetric matrix passes the probe.

        Verifies the reported asymmetry is tiny.
        """
        assert check_operator_symmetry(symmetric) < 1e-12

    def test_symmetry_probe_rejects(self) -> None:
        """Test asymmetric and non-square operators fail.

        Verifies ValidationError for both.
        """
        with pytest.raises(ValidationError, match="not symmetric"):
            check_operator_symmetry(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ValidationError, match="must be square"):
            check_operator_symmetry(np.zeros((2, 3)))

    def test_orthonormalize(self, rng: np.random.Generator) -> None:
        """Test Gram-Schmidt yields orthonormal columns.

        Verifies QᵀQ = I and the span is kept.
        """
        block = rng.standard_normal((10, 4))
        q = orthonormalize(block)

        np.testing.assert_allclose(q.T @ q, np.eye(4), atol=1e-12)
        assert max_principal_angle(q, block) == pytest.approx(0.0, abs=1e-8)

    def test_orthonormalize_dependent(self) -> None:
        """Test dependent columns are rejected.

        Verifies ValidationError on a zero column.
        """
        column = np.array([[1.0], [2.0], [3.0]])
        with pytest.raises(ValidationError, match="linearly dependent"):
            orthonormalize(np.hstack([column, np.zeros_like(column)]))


class TestLobpcg:
    """Tests for the iterative top-k solver."""

    def test_small_problem_falls_back_to_dense(self, symmetric: np.ndarray) -> None:
        """Test small operators are solved densely.

        Verifies agreement with sym_eig and reported residuals.
        """
        result = lobpcg_topk(symmetric, 2)
        dense = sym_eig(symmetric).top(2)

        assert result.converged
        np.testing.assert_allclose(result.eigenvalues, dense.eigenvalues, atol=1e-12)
        assert result.residuals is not None and result.residuals.max() < 1e-10

    def test_sparse_top_k(self, spiked_operator: sparse.csr_array) -> None:
        """Test LOBPCG finds the leading eigenpairs of a sparse operator.

        Verifies eigenvalues and canonical unit eigenvectors.
        """
        result = lobpcg_topk(spiked_operator, 3, seed=7)

        np.testing.assert_allclose(result.eigenvalues, [1000.0, 900.0, 800.0], rtol=1e-8)
        np.testing.assert_allclose(np.abs(result.eigenvectors[:3, :3]), np.eye(3), atol=1e-5)
        assert np.all(result.eigenvectors[np.arange(3), np.arange(3)] > 0)

    def test_jacobi_needs_diagonal(self, spiked_operator: sparse.csr_array) -> None:
        """Test the Jacobi preconditioner requires the diagonal.

        Verifies ValidationError when it is missing.
        """
        with pytest.raises(ValidationError, match="diagonal"):
            lobpcg_topk(spiked_operator, 3, preconditioner=Preconditioner.JACOBI)

    def test_k_out_of_range(self, symmetric: np.ndarray) -> None:
        """Test k must lie in [1, n].

        Verifies ValidationError for k = 0 and k = n + 1.
        """
        with pytest.raises(ValidationError):
            lobpcg_topk(symmetric, 0)
        with pytest.raises(ValidationError):
            lobpcg_topk(symmetric, 7)


class TestGeneralized:
    """Tests for the generalized eigenproblem."""

    def test_pencil_solution(self, rng: np.random.Generator, symmetric: np.ndarray) -> None:
        """Test A·v = λ·B·v with B-orthonormal vectors.

        Verifies the residual and VᵀBV = I.
        """
        m = rng.standard_normal((6, 6))
        b = m @ m.T + 6.0 * np.eye(6)
        result = generalized_topk(symmetric, b, 3)
        v, values = result.eigenvectors, result.eigenvalues

        np.testing.assert_allclose(symmetric @ v, b @ v * values, atol=1e-9)
        np.testing.assert_allclose(v.T @ b @ v, np.eye(3), atol=1e-10)
        assert np.all(np.diff(values) <= 0)

    def test_sparse_left_operand(self, symmetric: np.ndarray) -> None:
        """Test A may be given as a sparse matrix.

        Verifies the result matches the dense call.
        """
        b = np.eye(6)
        dense = generalized_topk(symmetric, b, 2)
        from_sparse = generalized_topk(sparse.csr_array(symmetric), b, 2)

        np.testing.assert_allclose(from_sparse.eigenvalues, dense.eigenvalues, atol=1e-12)

    def test_not_spd(self, symmetric: np.ndarray) -> None:
        """Test an indefinite B is rejected.

        Verifies the NOT_SPD message.
        """
        with pytest.raises(ValidationError, match="positive definite"):
            generalized_topk(symmetric, -np.eye(6), 2)
