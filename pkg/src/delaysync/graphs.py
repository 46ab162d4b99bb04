"""Directed weighted graphs with leader pinning: Laplacians and their spectra.

Conventions: ``adjacency[i, j]`` is the weight of the edge from node j into
node i; the in-degree matrix is the diagonal of adjacency row sums; the
Laplacian is in-degree minus adjacency.  Pinning gains couple individual
nodes directly to the leader.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import convex_hull


class GraphAssumptionError(ValueError):
    """The pinned digraph cannot synchronize: no spanning tree with a pinned root."""


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PinnedDigraph:
    """Weighted digraph plus per-node leader pinning gains.

    No self-loops (zero diagonal) and no negative weights are allowed.
    """

    adjacency: np.ndarray
    pinning: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=float)
        pin = np.asarray(self.pinning, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        n = adj.shape[0]
        if pin.shape != (n,):
            raise ValueError(f"pinning must have length {n}, got shape {pin.shape}")
        if np.any(adj < 0) or np.any(pin < 0):
            raise ValueError("adjacency weights and pinning gains must be nonnegative")
        if np.any(np.diag(adj) != 0):
            raise ValueError("adjacency diagonal must be zero (no self-loops)")
        object.__setattr__(self, "adjacency", _as_readonly(adj))
        object.__setattr__(self, "pinning", _as_readonly(pin))

    @classmethod
    def from_edges(
        cls,
        n_agents: int,
        edges: Iterable[tuple[int, int, float]],
        pinning: Sequence[float],
    ) -> "PinnedDigraph":
        """Build from an edge list of (source, target, weight) triples."""
        adj = np.zeros((n_agents, n_agents))
        for src, dst, w in edges:
            if not (0 <= src < n_agents and 0 <= dst < n_agents):
                raise ValueError(f"edge ({src}, {dst}) out of range for {n_agents} nodes")
            adj[dst, src] = w
        return cls(adjacency=adj, pinning=np.asarray(pinning, dtype=float))

    @property
    def n_agents(self) -> int:
        return self.adjacency.shape[0]

    @property
    def in_degree(self) -> np.ndarray:
        return np.diag(self.adjacency.sum(axis=1))

    @property
    def laplacian(self) -> np.ndarray:
        return self.in_degree - self.adjacency


def build_pinned_laplacian(g: PinnedDigraph) -> np.ndarray:
    """Laplacian plus diagonal pinning-gain matrix."""
    return g.laplacian + np.diag(g.pinning)


def has_spanning_tree_with_pinned_root(g: PinnedDigraph) -> bool:
    """Check the synchronizability condition on the pinned digraph.

    True iff some node reaches every other node along directed edges (a
    spanning-tree root) and at least one such root carries a positive
    pinning gain.
    """
    n = g.n_agents
    succ: list[list[int]] = [
        [i for i in range(n) if g.adjacency[i, j] > 0] for j in range(n)
    ]

    def reaches_all(root: int) -> bool:
        seen = [False] * n
        seen[root] = True
        stack = [root]
        count = 1
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == n

    return any(g.pinning[r] > 0 and reaches_all(r) for r in range(n))


@dataclass(frozen=True, eq=False)
class PinnedSpectrum:
    """Eigenvalues of a pinned Laplacian, sorted by (real, imaginary) part."""

    eigenvalues: tuple[complex, ...]
    min_real: float
    max_real: float


def pinned_spectrum(m: np.ndarray) -> PinnedSpectrum:
    """Dense eigensolve of the (real, nonsymmetric) pinned Laplacian.

    Raises ``numpy.linalg.LinAlgError`` when the eigenvalue iteration fails
    to converge, which signals numerically pathological input.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    eig = np.linalg.eigvals(m)
    ordered = sorted((complex(z) for z in eig), key=lambda z: (z.real, z.imag))
    reals = [z.real for z in ordered]
    return PinnedSpectrum(
        eigenvalues=tuple(ordered), min_real=min(reals), max_real=max(reals)
    )


def eigenvalue_hull(s: PinnedSpectrum) -> list[complex]:
    """Convex hull of the spectrum in the complex plane (counterclockwise)."""
    if not s.eigenvalues:
        raise ValueError("empty spectrum")
    return convex_hull(s.eigenvalues)
