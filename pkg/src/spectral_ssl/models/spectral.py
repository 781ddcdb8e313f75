"""Spectral decompositions and closed-form optima."""

from collections.abc import Iterator
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from ..config import RANK_TOL

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]


class SingularTriplets(NamedTuple):
    """Thin SVD M = U·diag(s)·Vᵀ with s descending."""

    u: Matrix
    s: Vector
    v: Matrix


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs ordered by descending eigenvalue.

    Eigenvector columns are orthonormal (B-orthonormal for generalized
    problems), and the largest-magnitude entry of each is positive.

    Attributes:
        eigenvalues: Length-m eigenvalues, descending
        eigenvectors: n×m eigenvector columns
        rank_tol: Relative tolerance defining the numerical rank
        residuals: Per-pair residual norms ||Av − λv|| when computed
        converged: False when an iterative solver stopped early
    """

    eigenvalues: Vector
    eigenvectors: Matrix
    rank_tol: float = RANK_TOL
    residuals: Vector | None = None
    converged: bool = True

    @property
    def k(self) -> int:
        """Number of eigenpairs held."""
        return int(self.eigenvalues.shape[0])

    @property
    def rank(self) -> int:
        """Count of |λ| above rank_tol·max|λ|."""
        magnitudes = np.abs(self.eigenvalues)
        if magnitudes.size == 0 or magnitudes.max() == 0:
            return 0
        return int(np.sum(magnitudes > self.rank_tol * magnitudes.max()))

    def top(self, k: int) -> "SpectralDecomposition":
        """Return the leading k eigenpairs."""
        residuals = None if self.residuals is None else self.residuals[:k]
        return replace(
            self,
            eigenvalues=self.eigenvalues[:k],
            eigenvectors=self.eigenvectors[:, :k],
            residuals=residuals,
        )

    def reconstruct(self) -> Matrix:
        """Return P·diag(λ)·Pᵀ."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


@dataclass(frozen=True, eq=False)
class VicregOptimum:
    """Global minimizer of the squared-variance VICReg loss (β = α).

    Attributes:
        z_star: N×K optimal embedding
        min_loss: α·(K − Σ_{k≤K} max(λ_k, 0)²)
        spectrum: Top-K eigenpairs of the combined matrix
        alpha: Variance/covariance weight
        gamma: Invariance weight
    """

    z_star: Matrix
    min_loss: float
    spectrum: SpectralDecomposition
    alpha: float
    gamma: float


@dataclass(frozen=True, eq=False)
class LinearVicregOptimum:
    """Optimal weights of the linear VICReg model Z = X·W."""

    w_star: Matrix
    min_loss: float
    spectrum: SpectralDecomposition


@dataclass(frozen=True, eq=False)
class SimclrOptimum:
    """Spectral minimizer of the SimCLR matching loss.

    Unpacks as (z_star, min_loss).
    """

    z_star: Matrix
    min_loss: float
    spectrum: SpectralDecomposition

    def __iter__(self) -> Iterator[Matrix | float]:
        yield self.z_star
        yield self.min_loss


@dataclass(frozen=True, eq=False)
class CcaWeights:
    """Canonical directions of two views.

    Attributes:
        w_a: D_a×K unit-norm directions of the first view
        w_b: D_b×K unit-norm directions of the second view
        correlations: Length-K canonical correlations in [0, 1]
    """

    w_a: Matrix
    w_b: Matrix
    correlations: Vector


@dataclass(frozen=True, eq=False)
class LinearProjection:
    """Projection directions from a generalized eigenproblem.

    Attributes:
        weights: D×K unit-norm directions
        eigenvalues: Length-K generalized eigenvalues, descending
    """

    weights: Matrix
    eigenvalues: Vector


@dataclass(frozen=True, eq=False)
class LaplacianEigenmap:
    """Solution of min Tr(ZᵀLZ) subject to ZᵀDZ = I.

    Attributes:
        embedding: N×K D-orthonormal embedding
        eigenvalues: Length-K Laplacian eigenvalues, ascending
    """

    embedding: Matrix
    eigenvalues: Vector
