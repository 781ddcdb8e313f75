"""Pytest fixtures for the spectral-ssl tests."""

import os
from collections.abc import Generator

import numpy as np
import pytest

from spectral_ssl.config import LossConfig
from spectral_ssl.graph import build_clique_graph, build_view_graph
from spectral_ssl.models.graph import RelationGraph

# =============================================================================
# Centralized test constants - import these in test files
# =============================================================================

TEST_SEED = 1234
SMALL_N = 12
SMALL_K = 3
CLIQUES = 3
TIGHT_TOL = 1e-10
FD_TOL = 1e-5
ENV_PREFIX = "SPECTRAL_SSL_"


# =============================================================================
# Random state
# =============================================================================


@pytest.fixture
def rng() -> np.random.Generator:
    """Create a seeded random generator.

    Returns:
        np.random.Generator: Generator seeded with TEST_SEED.
    """
    return np.random.default_rng(TEST_SEED)


# =============================================================================
# Graph fixtures
# =============================================================================


@pytest.fixture
def clique_graph() -> RelationGraph:
    """Create a dense graph of CLIQUES balanced cliques on SMALL_N nodes.

    Returns:
        RelationGraph: Binary graph with relation rank CLIQUES.
    """
    return build_clique_graph(SMALL_N, CLIQUES, storage="dense")


@pytest.fixture
def view_graph() -> RelationGraph:
    """Create a two-view pair graph on SMALL_N nodes.

    Returns:
        RelationGraph: Perfect matching pairing node n with node n + SMALL_N/2.
    """
    return build_view_graph(SMALL_N // 2, 2, storage="dense")


@pytest.fixture
def weighted_graph(rng: np.random.Generator) -> RelationGraph:
    """Create a dense random weighted graph with no isolated node.

    Returns:
        RelationGraph: Symmetric graph with weights in (0, 1) on a ring plus
            random chords.
    """
    chords = rng.random((SMALL_N, SMALL_N)) < 0.3
    upper = np.triu(rng.uniform(0.1, 1.0, (SMALL_N, SMALL_N)) * chords, 1)
    ring = np.arange(SMALL_N)
    upper[ring[:-1], ring[1:]] = 0.5
    return RelationGraph(upper + upper.T)


@pytest.fixture
def embedding(rng: np.random.Generator) -> np.ndarray:
    """Create a random SMALL_N × SMALL_K embedding.

    Returns:
        np.ndarray: Standard normal entries.
    """
    return rng.standard_normal((SMALL_N, SMALL_K))


# =============================================================================
# Config fixtures
# =============================================================================


@pytest.fixture
def analysis_config() -> LossConfig:
    """Create the squared-variance VICReg config with α = β = 1, γ = 0.1.

    Returns:
        LossConfig: Config in which the closed-form optimum applies.
    """
    return LossConfig.analysis(alpha=1.0, gamma=0.1)


@pytest.fixture
def clean_env(monkeypatch: pytest.MonkeyPatch) -> Generator[pytest.MonkeyPatch, None, None]:
    """Remove every SPECTRAL_SSL_ variable from the environment.

    Yields:
        pytest.MonkeyPatch: The monkeypatch used, for further overrides.
    """
    for key in list(os.environ):
        if key.startswith(ENV_PREFIX):
            monkeypatch.delenv(key, raising=False)
    yield monkeypatch
