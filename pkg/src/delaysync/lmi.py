"""Affine symmetric matrix pencils for delay-dependent analysis and design.

Three pencil families are built here: the Lyapunov-Krasovskii delay-dependent
stability condition for the complex parameterized system
``x'(t) = A x(t) + sigma A_d x(t - tau)``, its real symmetric embedding, and
the descriptor-method synthesis condition whose solution yields a
state-feedback gain.  Each builder returns an :class:`LmiProblem` whose
constraint callable accepts either plain numpy arrays (for verification) or
cvxpy variables (for solving), and is affine in every decision-block entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import cvxpy as cp
import numpy as np

MARGIN_SCALE = 1e-7

BlockMap = Mapping[str, Any]


def _is_expr(x: Any) -> bool:
    return isinstance(x, cp.Expression)


def _re(M: Any) -> Any:
    return cp.real(M) if _is_expr(M) else np.real(M)


def _im(M: Any) -> Any:
    return cp.imag(M) if _is_expr(M) else np.imag(M)


def _ct(M: Any) -> Any:
    """Conjugate transpose for numpy arrays and cvxpy expressions alike."""
    return cp.conj(M).T if _is_expr(M) else np.conj(M).T


def _bmat(grid: Sequence[Sequence[Any]]) -> Any:
    if any(_is_expr(b) for row in grid for b in row):
        return cp.bmat(grid)
    return np.block([[np.asarray(b) for b in row] for row in grid])


def block_diag(mats: Sequence[Any]) -> Any:
    """Block-diagonal stacking, usable on numpy arrays or cvxpy expressions."""
    sizes = [m.shape[0] for m in mats]
    grid = []
    for i, m in enumerate(mats):
        row: list[Any] = []
        for j, sz in enumerate(sizes):
            row.append(m if i == j else np.zeros((sizes[i], sz)))
        grid.append(row)
    return _bmat(grid)


def realify(M: Any) -> Any:
    """Real symmetric embedding ``[[Re M, -Im M], [Im M, Re M]]``.

    For Hermitian M the embedding is symmetric, it is negative definite
    exactly when M is, and every eigenvalue of M appears twice.
    """
    re, im = _re(M), _im(M)
    return _bmat([[re, -im], [im, re]])


@dataclass(frozen=True, eq=False)
class AgentModel:
    """Single-agent LTI pair: drift A (n x n) and input map B (n x m)."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if B.ndim != 2 or B.shape[0] != A.shape[0]:
            raise ValueError(f"B must be {A.shape[0]} x m, got shape {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class BlockSpec:
    """One named decision block with its cone tag."""

    name: str
    rows: int
    cols: int
    kind: str  # "pos_def" | "symmetric" | "free"


@dataclass(frozen=True, eq=False)
class LmiProblem:
    """Feasibility problem: ``constraint(blocks)`` required negative definite.

    ``constraint`` is affine in every block entry and returns a real symmetric
    ``dim x dim`` matrix (numpy array or cvxpy expression, matching its
    input).  ``margin`` is the strictness offset used to encode the strict
    inequalities.
    """

    blocks: tuple[BlockSpec, ...]
    constraint: Callable[[BlockMap], Any]
    dim: int
    margin: float
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class LmiWitness:
    """Concrete assignment of every decision block, with its verified slack."""

    assignment: dict[str, np.ndarray]
    max_eig: float


def _margin_for(model: AgentModel) -> float:
    return MARGIN_SCALE * max(1.0, float(np.linalg.norm(model.A, 2)))


def stability_hermitian(
    model: AgentModel, A_d: np.ndarray, sigma: complex, h: float
) -> Callable[[BlockMap], Any]:
    """Hermitian stability pencil in blocks P, S, R for the delayed system."""
    A = model.A
    sig = complex(sigma)
    sig_c = sig.conjugate()

    def build(blocks: BlockMap) -> Any:
        P, S, R = blocks["P"], blocks["S"], blocks["R"]
        m11 = A.T @ P + P @ A + S - R
        m12 = sig * (P @ A_d) + R
        m13 = h * (A.T @ R)
        m22 = -S - R
        m23 = sig_c * h * (A_d.T @ R)
        m33 = -R
        return _bmat(
            [
                [m11, m12, m13],
                [_ct(m12), m22, m23],
                [_ct(m13), _ct(m23), m33],
            ]
        )

    return build


def stability_lmi(
    model: AgentModel, A_d: np.ndarray, sigma: complex, h: float
) -> LmiProblem:
    """Delay-dependent stability condition, realified to a real pencil.

    Feasibility with P, S, R positive definite certifies asymptotic stability
    of ``x' = A x + sigma A_d x(t - tau)`` for every delay in [0, h].
    """
    if h < 0:
        raise ValueError(f"h must be nonnegative, got {h}")
    A_d = np.asarray(A_d, dtype=float)
    n = model.n
    if A_d.shape != (n, n):
        raise ValueError(f"A_d must be {n} x {n}, got shape {A_d.shape}")
    herm = stability_hermitian(model, A_d, sigma, h)
    blocks = tuple(BlockSpec(name, n, n, "pos_def") for name in ("P", "S", "R"))
    return LmiProblem(
        blocks=blocks,
        constraint=lambda b: realify(herm(b)),
        dim=6 * n,
        margin=_margin_for(model),
        meta={"kind": "stability", "sigma": complex(sigma), "h": float(h)},
    )


def descriptor_hermitian(
    model: AgentModel, sigma: complex, h: float, epsilon: float
) -> Callable[[BlockMap], Any]:
    """Hermitian synthesis pencil in blocks P, S, R, Y, X (descriptor method)."""
    A, B = model.A, model.B
    sig = complex(sigma)
    sig_c = sig.conjugate()

    def build(blocks: BlockMap) -> Any:
        P, S, R = blocks["P"], blocks["S"], blocks["R"]
        Y, X = blocks["Y"], blocks["X"]
        BX = B @ X
        m11 = Y @ A.T + A @ Y + S - R
        m12 = -sig * BX + R
        m13 = P - Y.T + epsilon * (Y @ A.T)
        m22 = -(S + R)
        m23 = -sig_c * epsilon * _ct(BX)
        m33 = -2.0 * epsilon * Y + (h * h) * R
        return _bmat(
            [
                [m11, m12, m13],
                [_ct(m12), m22, m23],
                [_ct(m13), _ct(m23), m33],
            ]
        )

    return build


def descriptor_design_lmi(
    model: AgentModel, sigma: complex, h: float, epsilon: float
) -> LmiProblem:
    """Descriptor-method synthesis condition, realified to a real pencil.

    The change of variables makes the gain enter affinely: a feasible point
    recovers the state feedback as ``K = X Y^{-1}``.  Y is symmetric and its
    invertibility is enforced a posteriori by the solver layer.
    """
    if h < 0:
        raise ValueError(f"h must be nonnegative, got {h}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n, m = model.n, model.m
    herm = descriptor_hermitian(model, sigma, h, epsilon)
    blocks = (
        BlockSpec("P", n, n, "pos_def"),
        BlockSpec("S", n, n, "pos_def"),
        BlockSpec("R", n, n, "pos_def"),
        BlockSpec("Y", n, n, "symmetric"),
        BlockSpec("X", m, n, "free"),
    )
    return LmiProblem(
        blocks=blocks,
        constraint=lambda b: realify(herm(b)),
        dim=6 * n,
        margin=_margin_for(model),
        meta={
            "kind": "design",
            "sigma": complex(sigma),
            "h": float(h),
            "epsilon": float(epsilon),
        },
    )


def common_blocks_problem(problems: Sequence[LmiProblem]) -> LmiProblem:
    """Conjunction of several pencils sharing one set of decision blocks.

    The stacked constraint is the block diagonal of the members' constraints,
    so feasibility means every member is simultaneously negative definite at
    a common block assignment.
    """
    if not problems:
        raise ValueError("need at least one problem")
    specs = problems[0].blocks
    for p in problems[1:]:
        if p.blocks != specs:
            raise ValueError("problems do not share identical decision-block specs")
    if len(problems) == 1:
        return problems[0]
    members = tuple(problems)

    def build(blocks: BlockMap) -> Any:
        return block_diag([p.constraint(blocks) for p in members])

    return LmiProblem(
        blocks=specs,
        constraint=build,
        dim=sum(p.dim for p in members),
        margin=max(p.margin for p in members),
        meta={
            "kind": "stacked",
            "sigma": tuple(p.meta.get("sigma") for p in members),
            "h": members[0].meta.get("h"),
            "members": len(members),
        },
    )
