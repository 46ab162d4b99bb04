"""Ground-truth characteristic roots of the delayed closed loop.

Discretizes the solution-operator generator of
``x'(t) = A x(t) + sigma A_d x(t - tau)`` on [-tau, 0] by Chebyshev
collocation; the eigenvalues of the resulting finite matrix approximate the
rightmost characteristic roots with spectral accuracy.  Used to measure how
conservative the Lyapunov-Krasovskii certificates are, independently of any
conic solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lmi import AgentModel

MAX_LEADING_ROOTS = 40


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Leading characteristic roots, rightmost first."""

    rightmost_root: complex
    roots: tuple[complex, ...]
    discretization_order: int


def chebyshev_grid(order: int, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev points on [-tau, 0] (first node at 0) and the differentiation matrix."""
    N = order
    k = np.arange(N + 1)
    theta = tau * (np.cos(np.pi * k / N) - 1.0) / 2.0
    c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** k
    X = np.tile(theta, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return theta, D


def rightmost_root(
    model: AgentModel,
    A_d: np.ndarray,
    sigma: complex,
    tau: float,
    order: int = 20,
) -> SpectralResult:
    """Rightmost characteristic roots at the given collocation order.

    At ``tau = 0`` the roots are exactly the eigenvalues of ``A + sigma A_d``.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if order < 8:
        raise ValueError(f"order must be at least 8, got {order}")
    A = model.A
    A_d = np.asarray(A_d, dtype=float)
    n = model.n
    if A_d.shape != (n, n):
        raise ValueError(f"A_d must be {n} x {n}, got shape {A_d.shape}")
    if tau == 0.0:
        w = np.linalg.eigvals(A + complex(sigma) * A_d)
    else:
        _, D = chebyshev_grid(order, tau)
        dim = n * (order + 1)
        M = np.zeros((dim, dim), dtype=complex)
        M[n:, :] = np.kron(D[1:, :], np.eye(n))
        M[:n, :n] = A
        M[:n, n * order :] += complex(sigma) * A_d
        w = np.linalg.eigvals(M)
    w = w[np.argsort(-w.real)]
    leading = tuple(complex(z) for z in w[:MAX_LEADING_ROOTS])
    return SpectralResult(
        rightmost_root=leading[0], roots=leading, discretization_order=order
    )


def _stabilized_rightmost(
    model: AgentModel,
    A_d: np.ndarray,
    sigma: complex,
    tau: float,
    start_order: int = 20,
    rtol: float = 1e-8,
    max_order: int = 160,
) -> complex:
    """Rightmost root with the order doubled until its real part stabilizes."""
    order = start_order
    root = rightmost_root(model, A_d, sigma, tau, order).rightmost_root
    while order < max_order:
        order *= 2
        nxt = rightmost_root(model, A_d, sigma, tau, order).rightmost_root
        if abs(nxt.real - root.real) < rtol:
            return nxt
        root = nxt
    return root


def true_delay_margin(
    model: AgentModel,
    A_d: np.ndarray,
    sigmas: Sequence[complex],
    tol: float,
    tau_cap: float = 100.0,
) -> float:
    """Smallest delay at which any of the parameterized loops loses stability.

    Bisects the sign of the rightmost root's real part per sigma and returns
    the minimum crossing, to width ``tol``.  Returns 0 when some loop is
    already unstable at zero delay, and ``inf`` when every loop stays stable
    up to ``tau_cap`` (a delay-independent configuration).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    margins = []
    for sigma in sigmas:
        root0 = rightmost_root(model, A_d, sigma, 0.0).rightmost_root
        if root0.real >= 0:
            return 0.0
        lo, hi = 0.0, max(tol, 1e-3)
        unstable_found = False
        while hi <= tau_cap:
            if _stabilized_rightmost(model, A_d, sigma, hi).real >= 0:
                unstable_found = True
                break
            lo = hi
            hi *= 2.0
        if not unstable_found:
            margins.append(math.inf)
            continue
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _stabilized_rightmost(model, A_d, sigma, mid).real < 0:
                lo = mid
            else:
                hi = mid
        margins.append(0.5 * (lo + hi))
    return min(margins)
