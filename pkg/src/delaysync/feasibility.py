"""Conic feasibility gateway for the matrix pencils.

A pencil is decided by one semidefinite program: minimize t subject to
``constraint(blocks) <= t I`` with the blocks in their tagged cones.  Both
pencil families are homogeneous in their blocks, so the program is
normalized by fixing the total trace of the positive-definite blocks (any
strict witness rescales onto that slice).  Every "feasible" verdict is
re-checked by a dense eigensolve on the returned assignment, independent of
solver internals; a verdict is never feasible on the solver's word alone.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Optional

import cvxpy as cp
import numpy as np

from .lmi import LmiProblem, LmiWitness

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SolverSettings:
    """Knobs shared by every solve; defaults are fine for desk-scale pencils."""

    solver: str = "CLARABEL"
    block_cap: float = 1e6  # norm bound on free/symmetric blocks
    verbose: bool = False


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True, eq=False)
class FeasibilityVerdict:
    status: str
    witness: Optional[LmiWitness]
    slack: float  # -max eigenvalue of the constraint at the witness
    objective: float  # solver's optimal t (conservatism diagnostic)
    iterations: int
    runtime: float

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def _inconclusive(objective: float = float("nan"), runtime: float = 0.0) -> FeasibilityVerdict:
    return FeasibilityVerdict(INCONCLUSIVE, None, float("nan"), objective, 0, runtime)


def check_feasible(
    problem: LmiProblem,
    tol: float = 1e-8,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> FeasibilityVerdict:
    """Decide strict feasibility of the pencil at its margin.

    ``tol`` is the solver convergence tolerance.  Solver failures surface as
    an inconclusive verdict, never as feasible.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    mu = problem.margin
    variables: dict[str, cp.Variable] = {}
    constraints = []
    pd_traces = []
    pd_dim = 0
    for spec in problem.blocks:
        if spec.kind in ("pos_def", "symmetric"):
            v = cp.Variable((spec.rows, spec.cols), symmetric=True, name=spec.name)
        else:
            v = cp.Variable((spec.rows, spec.cols), name=spec.name)
        variables[spec.name] = v
        eye = np.eye(spec.rows)
        if spec.kind == "pos_def":
            constraints.append(v >> mu * eye)
            pd_traces.append(cp.trace(v))
            pd_dim += spec.rows
        elif spec.kind == "symmetric":
            constraints.append(v << settings.block_cap * eye)
            constraints.append(v >> -settings.block_cap * eye)
        else:
            constraints.append(cp.abs(v) <= settings.block_cap)
    if pd_traces:
        constraints.append(cp.sum(pd_traces) == float(pd_dim))

    t = cp.Variable()
    constraints.append(problem.constraint(variables) << t * np.eye(problem.dim))
    prob = cp.Problem(cp.Minimize(t), constraints)

    start = time.perf_counter()
    try:
        with warnings.catch_warnings():
            # inaccurate-solution warnings are handled through the verdict
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver=settings.solver, verbose=settings.verbose)
    except (cp.SolverError, cp.DCPError):
        return _inconclusive(runtime=time.perf_counter() - start)
    runtime = time.perf_counter() - start

    iters = getattr(prob.solver_stats, "num_iters", 0) or 0
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or prob.value is None:
        return _inconclusive(runtime=runtime)
    objective = float(prob.value)

    assignment = {}
    for spec in problem.blocks:
        val = variables[spec.name].value
        if val is None:
            return _inconclusive(objective, runtime)
        val = np.asarray(val, dtype=float)
        if spec.kind in ("pos_def", "symmetric"):
            val = 0.5 * (val + val.T)
        assignment[spec.name] = val

    max_eig = float(np.max(np.linalg.eigvalsh(_evaluate(problem, assignment))))
    witness = LmiWitness(assignment=assignment, max_eig=max_eig)

    if objective <= -mu and verify_witness(problem, witness):
        return FeasibilityVerdict(FEASIBLE, witness, -max_eig, objective, iters, runtime)
    if prob.status == cp.OPTIMAL and objective > -mu:
        return FeasibilityVerdict(INFEASIBLE, None, float("nan"), objective, iters, runtime)
    return _inconclusive(objective, runtime)


def _evaluate(problem: LmiProblem, assignment: dict[str, np.ndarray]) -> np.ndarray:
    out = np.asarray(problem.constraint(assignment), dtype=float)
    return 0.5 * (out + out.T)


def verify_witness(problem: LmiProblem, witness: LmiWitness) -> bool:
    """Trusted check: dense eigensolve on the assignment, no solver involved.

    Confirms the constraint is below ``-margin/2`` and every
    positive-definite block clears ``margin/2``.
    """
    half = problem.margin / 2.0
    for spec in problem.blocks:
        val = witness.assignment.get(spec.name)
        if val is None or val.shape != (spec.rows, spec.cols):
            return False
        if spec.kind in ("pos_def", "symmetric"):
            if not np.allclose(val, val.T, atol=1e-9 * (1.0 + np.abs(val).max())):
                return False
        if spec.kind == "pos_def":
            if float(np.min(np.linalg.eigvalsh(val))) < half:
                return False
    max_eig = float(np.max(np.linalg.eigvalsh(_evaluate(problem, witness.assignment))))
    return max_eig < -half
