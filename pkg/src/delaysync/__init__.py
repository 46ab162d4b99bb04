"""Delay-robust cooperative synchronization toolkit.

Analysis and design of distributed state-feedback controllers that
synchronize identical LTI agents over directed graphs under a uniform
communication/input delay: Lyapunov-Krasovskii certificates as semidefinite
feasibility problems, delay-bound optimization, synchronizing-region
estimation, two synthesis routes, a delay-differential simulator and a
characteristic-root oracle for ground truth.
"""

__version__ = "0.1.0"

from .analysis import (
    DelayBoundError,
    DelayBoundResult,
    RobustSyncResult,
    SyncRegionEstimate,
    estimate_dsr,
    max_delay_bound,
    robust_sync_check,
)
from .config import ConfigError, ProblemConfig, load_config, parse_config
from .feasibility import (
    FeasibilityVerdict,
    SolverSettings,
    check_feasible,
    verify_witness,
)
from .geometry import boundary_distance, conjugate_closure, convex_hull, point_in_hull
from .graphs import (
    GraphAssumptionError,
    PinnedDigraph,
    PinnedSpectrum,
    build_pinned_laplacian,
    eigenvalue_hull,
    has_spanning_tree_with_pinned_root,
    pinned_spectrum,
)
from .lmi import (
    AgentModel,
    BlockSpec,
    LmiProblem,
    LmiWitness,
    common_blocks_problem,
    descriptor_design_lmi,
    realify,
    stability_lmi,
)
from .oracle import SpectralResult, rightmost_root, true_delay_margin
from .simulation import (
    SimulationConfig,
    SimulationDiverged,
    Trajectory,
    convergence_order_check,
    simulate,
    simulate_agentwise,
)
from .synthesis import (
    ControllerDesign,
    DesignCertificate,
    DesignResult,
    coupling_range,
    design_common_lkf,
    design_scaled,
)

__all__ = [
    "AgentModel",
    "BlockSpec",
    "ConfigError",
    "ControllerDesign",
    "DelayBoundError",
    "DelayBoundResult",
    "DesignCertificate",
    "DesignResult",
    "FeasibilityVerdict",
    "GraphAssumptionError",
    "LmiProblem",
    "LmiWitness",
    "PinnedDigraph",
    "PinnedSpectrum",
    "ProblemConfig",
    "RobustSyncResult",
    "SimulationConfig",
    "SimulationDiverged",
    "SolverSettings",
    "SpectralResult",
    "SyncRegionEstimate",
    "Trajectory",
    "boundary_distance",
    "build_pinned_laplacian",
    "check_feasible",
    "common_blocks_problem",
    "conjugate_closure",
    "convergence_order_check",
    "convex_hull",
    "coupling_range",
    "descriptor_design_lmi",
    "design_common_lkf",
    "design_scaled",
    "eigenvalue_hull",
    "estimate_dsr",
    "has_spanning_tree_with_pinned_root",
    "load_config",
    "max_delay_bound",
    "parse_config",
    "pinned_spectrum",
    "point_in_hull",
    "realify",
    "rightmost_root",
    "robust_sync_check",
    "simulate",
    "simulate_agentwise",
    "stability_lmi",
    "true_delay_margin",
    "verify_witness",
]
