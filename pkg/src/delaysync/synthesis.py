"""State-feedback synthesis for delay-robust synchronization.

Two routes: a direct design solving the descriptor pencil at every hull
vertex with one common set of decision blocks, and a scaling design that
synthesizes a base gain at a single real center point, estimates that gain's
synchronizing region, and then scales the graph eigenvalues into it with a
coupling gain.  Every returned design is independently re-verified through
the analysis pencil before it is handed back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .analysis import SyncRegionEstimate, estimate_dsr, robust_sync_check
from .feasibility import DEFAULT_SETTINGS, SolverSettings, check_feasible
from .geometry import point_in_hull
from .graphs import PinnedSpectrum
from .lmi import AgentModel, common_blocks_problem, descriptor_design_lmi

Y_CONDITION_LIMIT = 1e10
C_PROBE_LO = 1e-3
C_PROBE_HI = 1e3
C_BISECT_TOL = 1e-3

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True, eq=False)
class DesignCertificate:
    h: float
    epsilon: float
    method: str
    vertices: tuple[complex, ...]
    hull: tuple[complex, ...] = ()


@dataclass(frozen=True, eq=False)
class ControllerDesign:
    """Base gain, coupling gain and the certificate they were proven under."""

    base_gain: np.ndarray
    coupling: float
    c_range: tuple[float, float]
    certificate: DesignCertificate

    @property
    def gain(self) -> np.ndarray:
        return self.coupling * self.base_gain


@dataclass(frozen=True, eq=False)
class DesignResult:
    """Explicit verdict: infeasibility is an expected outcome, not an error."""

    status: str
    design: Optional[ControllerDesign]
    detail: str = ""

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def _solve_design_problem(
    model: AgentModel,
    sigmas: Sequence[complex],
    h: float,
    epsilon: float,
    settings: SolverSettings,
) -> tuple[str, Optional[np.ndarray], str]:
    """Solve the (possibly stacked) descriptor pencil; recover K = X Y^-1.

    Witnesses with ill-conditioned Y are rejected and re-solved once with a
    mildly perturbed normalization, since generic witnesses are
    well-conditioned.
    """
    problem = common_blocks_problem(
        [descriptor_design_lmi(model, s, h, epsilon) for s in sigmas]
    )
    verdict = check_feasible(problem, settings=settings)
    if verdict.status == "infeasible":
        return INFEASIBLE, None, "design pencil infeasible"
    if verdict.status == "inconclusive" or verdict.witness is None:
        return INDETERMINATE, None, "solver inconclusive on design pencil"
    Y = verdict.witness.assignment["Y"]
    X = verdict.witness.assignment["X"]
    if np.linalg.cond(Y) > Y_CONDITION_LIMIT:
        jitter = SolverSettings(
            solver=settings.solver,
            block_cap=settings.block_cap * 0.5,
            verbose=settings.verbose,
        )
        verdict = check_feasible(problem, settings=jitter)
        if not verdict.feasible or verdict.witness is None:
            return INDETERMINATE, None, "ill-conditioned Y and re-solve failed"
        Y = verdict.witness.assignment["Y"]
        X = verdict.witness.assignment["X"]
        if np.linalg.cond(Y) > Y_CONDITION_LIMIT:
            return INDETERMINATE, None, "ill-conditioned Y persists"
    return FEASIBLE, X @ np.linalg.inv(Y), ""


def design_common_lkf(
    model: AgentModel,
    hull_vertices: Sequence[complex],
    h: float,
    epsilon: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
    scale_range: bool = False,
    delta: float = 0.05,
) -> DesignResult:
    """Direct design: one common block set across every hull vertex.

    On success the gain is re-verified through the analysis pencil at every
    vertex.  With ``scale_range`` the design's own synchronizing region is
    estimated and the admissible coupling interval around c = 1 is attached.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    vertices = tuple(complex(v) for v in hull_vertices)
    status, K, detail = _solve_design_problem(model, vertices, h, epsilon, settings)
    if status != FEASIBLE:
        return DesignResult(status=status, design=None, detail=detail)

    check = _verify_gain(model, K, vertices, h, settings)
    if check is not None:
        return check

    c_range = (1.0, 1.0)
    hull: tuple[complex, ...] = ()
    if scale_range:
        region = estimate_dsr(model, K, h, delta, settings=settings)
        if not region.empty:
            spectrum_like = _SpectrumView(vertices)
            rng = coupling_range(region.hull, spectrum_like)
            if rng is not None:
                c_range = rng
                hull = region.hull
    design = ControllerDesign(
        base_gain=K,
        coupling=1.0,
        c_range=c_range,
        certificate=DesignCertificate(
            h=h, epsilon=epsilon, method="common", vertices=vertices, hull=hull
        ),
    )
    return DesignResult(status=FEASIBLE, design=design)


class _SpectrumView:
    """Minimal spectrum-shaped wrapper for plain eigenvalue sequences."""

    def __init__(self, eigenvalues: Sequence[complex]) -> None:
        self.eigenvalues = tuple(complex(z) for z in eigenvalues)


def coupling_range(
    hull: Sequence[complex],
    spectrum,
    tol: float = C_BISECT_TOL,
    lo_probe: float = C_PROBE_LO,
    hi_probe: float = C_PROBE_HI,
) -> Optional[tuple[float, float]]:
    """Maximal interval of couplings keeping every scaled eigenvalue in the hull.

    The admissible set is an interval (each scaled ray meets the convex hull
    in an interval); its ends are located by bisection.  Returns None when no
    probed coupling is admissible.  Ends that extend past the probe bounds
    are reported at the probe bounds.
    """
    hull = list(hull)
    if not hull:
        return None
    eigs = [complex(z) for z in spectrum.eigenvalues]

    def ok(c: float) -> bool:
        return all(point_in_hull(hull, c * z) for z in eigs)

    seed = None
    if ok(1.0):
        seed = 1.0
    else:
        for c in np.geomspace(lo_probe, hi_probe, 61):
            if ok(float(c)):
                seed = float(c)
                break
    if seed is None:
        return None

    hi = seed
    if ok(hi_probe):
        hi = hi_probe
    else:
        lo, up = seed, hi_probe
        while up - lo > tol:
            mid = 0.5 * (lo + up)
            if ok(mid):
                lo = mid
            else:
                up = mid
        hi = lo

    lo = seed
    if ok(lo_probe):
        lo = lo_probe
    else:
        dn, up = lo_probe, seed
        while up - dn > tol:
            mid = 0.5 * (dn + up)
            if ok(mid):
                up = mid
            else:
                dn = mid
        lo = up
    return (lo, hi)


def design_scaled(
    model: AgentModel,
    spectrum: PinnedSpectrum,
    h: float,
    epsilon: float,
    delta: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
    jobs: int = 1,
) -> DesignResult:
    """Scaling design: base gain at the real center point, then couple.

    Steps: synthesize at the midpoint of the spectrum's real-part extremes;
    estimate the base gain's synchronizing region at the target bound; find
    the admissible coupling interval and pick c = 1 when admissible (the
    interval midpoint otherwise).  The effective gain is re-verified through
    the analysis pencil over the spectrum hull.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    sigma_r = complex(0.5 * (spectrum.min_real + spectrum.max_real), 0.0)
    status, K_bar, detail = _solve_design_problem(
        model, [sigma_r], h, epsilon, settings
    )
    if status != FEASIBLE:
        return DesignResult(
            status=status, design=None,
            detail=f"center-point design at sigma = {sigma_r.real:g} failed: {detail}",
        )

    region = estimate_dsr(model, K_bar, h, delta, settings=settings, jobs=jobs)
    if region.empty:
        return DesignResult(
            status=INFEASIBLE, design=None,
            detail="synchronizing-region estimate is empty for the base gain",
        )
    rng = coupling_range(region.hull, spectrum)
    if rng is None:
        outside = max(
            spectrum.eigenvalues, key=lambda z: 0 if region.contains(z) else abs(z)
        )
        return DesignResult(
            status=INFEASIBLE, design=None,
            detail=f"no coupling scales the spectrum into the region "
            f"(offending eigenvalue {outside})",
        )
    c_min, c_max = rng
    c = 1.0 if c_min <= 1.0 <= c_max else 0.5 * (c_min + c_max)

    K = c * K_bar
    check = _verify_gain(model, K, None, h, settings, spectrum=spectrum)
    if check is not None:
        return check
    design = ControllerDesign(
        base_gain=K_bar,
        coupling=c,
        c_range=(c_min, c_max),
        certificate=DesignCertificate(
            h=h,
            epsilon=epsilon,
            method="scaled",
            vertices=(sigma_r,),
            hull=region.hull,
        ),
    )
    return DesignResult(status=FEASIBLE, design=design)


def _verify_gain(
    model: AgentModel,
    K: np.ndarray,
    vertices: Optional[Sequence[complex]],
    h: float,
    settings: SolverSettings,
    spectrum: Optional[PinnedSpectrum] = None,
) -> Optional[DesignResult]:
    """Re-verify a synthesized gain via the analysis pencil; None when it passes."""
    view = spectrum if spectrum is not None else _SpectrumView(vertices)
    result = robust_sync_check(model, K, view, h, settings=settings)
    if result.certified:
        return None
    status = INDETERMINATE if result.indeterminate else INFEASIBLE
    return DesignResult(
        status=status, design=None,
        detail="synthesized gain failed analysis re-verification",
    )
