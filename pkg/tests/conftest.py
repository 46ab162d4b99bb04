"""Shared fixtures: the four-oscillator reference network and random generators."""

from __future__ import annotations

import numpy as np
import pytest

from delaysync import AgentModel, PinnedDigraph, build_pinned_laplacian, pinned_spectrum

# Reference scenario: four harmonic oscillators on a directed graph, two of
# them pinned to the leader.  The gain is a known stabilizing feedback whose
# certified delay bound is ~0.419 s and true margin ~0.4445 s.
OSC_A = np.array([[0.0, 1.0], [-1.0, 0.0]])
OSC_B = np.array([[0.0], [1.0]])
OSC_GAIN = 1.34 * np.array([[0.1, 0.6403]])
OSC_ADJACENCY = np.array(
    [
        [0.0, 1.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
    ]
)
OSC_PINNING = np.array([1.0, 1.0, 0.0, 0.0])
OSC_PINNED_LAPLACIAN = np.array(
    [
        [3.0, -1.0, 0.0, -1.0],
        [0.0, 2.0, -1.0, 0.0],
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, -1.0, 2.0],
    ]
)


@pytest.fixture(scope="session")
def osc_model() -> AgentModel:
    return AgentModel(A=OSC_A, B=OSC_B)


@pytest.fixture(scope="session")
def osc_graph() -> PinnedDigraph:
    return PinnedDigraph(adjacency=OSC_ADJACENCY, pinning=OSC_PINNING)


@pytest.fixture(scope="session")
def osc_spectrum(osc_graph):
    return pinned_spectrum(build_pinned_laplacian(osc_graph))


def random_pinned_digraph(rng: np.random.Generator, n: int) -> PinnedDigraph:
    """Random digraph guaranteed to satisfy the pinned-spanning-tree condition.

    A random directed tree rooted at node 0 (edges parent -> child) is
    decorated with extra random edges; node 0 carries a positive pinning
    gain, other nodes are pinned with probability 1/3.
    """
    adj = np.zeros((n, n))
    for child in range(1, n):
        parent = int(rng.integers(0, child))
        adj[child, parent] = rng.uniform(0.2, 2.0)
    extra = int(rng.integers(0, 2 * n))
    for _ in range(extra):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            adj[i, j] = rng.uniform(0.2, 2.0)
    pinning = np.where(rng.uniform(size=n) < 1.0 / 3.0, rng.uniform(0.5, 2.0, n), 0.0)
    pinning[0] = rng.uniform(0.5, 2.0)
    return PinnedDigraph(adjacency=adj, pinning=pinning)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (M + M.conj().T)
