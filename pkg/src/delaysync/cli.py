"""Command-line pipeline: analysis, region estimation, design, simulation, audit.

Exit codes: 0 success; 2 infeasible (a valid mathematical outcome); 3
validation error; 4 solver inconclusive; 5 graph-assumption violation (no
spanning tree with a pinned root).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (
    DelayBoundError,
    estimate_dsr,
    max_delay_bound,
    robust_sync_check,
)
from .config import ConfigError, ProblemConfig, load_config
from .feasibility import DEFAULT_SETTINGS, SolverSettings
from .geometry import boundary_distance, point_in_hull
from .graphs import (
    build_pinned_laplacian,
    eigenvalue_hull,
    has_spanning_tree_with_pinned_root,
    pinned_spectrum,
)
from .lmi import MARGIN_SCALE
from .oracle import true_delay_margin
from .output import RunManifest, error_svg, fmt, region_svg, trajectory_svg, write_csv
from .simulation import SimulationConfig, simulate
from .synthesis import design_common_lkf, design_scaled

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_VALIDATION = 3
EXIT_INCONCLUSIVE = 4
EXIT_ASSUMPTION = 5

EPSILON_SCAN_GRID = (0.01, 0.1, 1.0)


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(args) -> tuple[ProblemConfig, Path]:
    cfg = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return cfg, out_dir


def _manifest(args, cfg: ProblemConfig, command: str, **extra) -> RunManifest:
    return RunManifest(
        command=command,
        config=cfg.raw,
        version=__version__,
        solver_settings={
            "solver": DEFAULT_SETTINGS.solver,
            "margin_scale": MARGIN_SCALE,
            "tolerance": cfg.analysis.tolerance,
            "delta": args.delta if getattr(args, "delta", None) else cfg.analysis.delta,
        },
        extra=extra,
    )


def _require_assumption(cfg: ProblemConfig) -> Optional[int]:
    if not has_spanning_tree_with_pinned_root(cfg.graph):
        return _fail(
            EXIT_ASSUMPTION,
            "graph has no directed spanning tree with a pinned root; "
            "synchronization analysis does not apply",
        )
    return None


def _analysis_gain(cfg: ProblemConfig) -> np.ndarray:
    if cfg.analysis.gain is None:
        raise ConfigError("this command needs 'gain' in [analysis]")
    return cfg.analysis.gain


def cmd_delay_bound(args) -> int:
    cfg, out_dir = _load(args)
    bad = _require_assumption(cfg)
    if bad is not None:
        return bad
    gain = _analysis_gain(cfg)
    tol = args.tolerance or cfg.analysis.tolerance
    manifest = _manifest(args, cfg, "delay-bound")

    spectrum = pinned_spectrum(build_pinned_laplacian(cfg.graph))
    vertices = eigenvalue_hull(spectrum)
    try:
        result = max_delay_bound(
            cfg.model, gain, vertices, tol, h_cap=cfg.analysis.h_cap
        )
    except DelayBoundError as exc:
        return _fail(EXIT_INFEASIBLE, str(exc))

    flag = " (unbounded: growth capped)" if result.unbounded else ""
    print(f"h_max = {result.h_max:.4f} +/- {tol:g}{flag}")
    for v, h_ok in result.per_vertex_feasibility.items():
        print(f"  vertex {v.real:+.4f}{v.imag:+.4f}j: feasible at h = {h_ok:.4f}")

    csv_path = out_dir / "delay_bound.csv"
    write_csv(
        csv_path,
        ["vertex_re", "vertex_im", "h_confirmed"],
        [(v.real, v.imag, h) for v, h in result.per_vertex_feasibility.items()],
    )
    manifest.outputs.append(str(csv_path))
    manifest.extra["h_max"] = result.h_max
    manifest.extra["unbounded"] = result.unbounded
    manifest.finish(out_dir)
    return EXIT_OK


def cmd_sync_region(args) -> int:
    cfg, out_dir = _load(args)
    bad = _require_assumption(cfg)
    if bad is not None:
        return bad
    gain = _analysis_gain(cfg)
    delta = args.delta or cfg.analysis.delta
    h_values = cfg.analysis.h or (0.419,)
    manifest = _manifest(args, cfg, "sync-region")

    spectrum = pinned_spectrum(build_pinned_laplacian(cfg.graph))
    regions = []
    for h in h_values:
        est = estimate_dsr(cfg.model, gain, h, delta, jobs=args.jobs)
        if est.empty:
            return _fail(
                EXIT_INFEASIBLE,
                f"no feasible grid point found at h = {h:g} with delta = {delta:g}",
            )
        regions.append((f"h = {h:g}", est))
        print(f"h = {h:g}: {len(est.boundary_vertices)} boundary vertices, "
              f"hull of {len(est.hull)} points"
              + (" [truncated]" if est.truncated else ""))
        for lam in spectrum.eigenvalues:
            inside = point_in_hull(est.hull, lam)
            dist = boundary_distance(est.hull, lam)
            print(f"  eigenvalue {lam.real:+.4f}{lam.imag:+.4f}j: "
                  f"{'inside' if inside else 'outside'}, "
                  f"boundary distance {dist:.4f}")

    for label, est in regions:
        tag = label.replace(" ", "").replace("=", "_")
        csv_path = out_dir / f"sync_region_{tag}.csv"
        write_csv(csv_path, ["re", "im"], [(v.real, v.imag) for v in est.hull])
        manifest.outputs.append(str(csv_path))
    svg_path = out_dir / "sync_region.svg"
    region_svg(
        svg_path,
        [(label, est.hull) for label, est in regions],
        list(spectrum.eigenvalues),
    )
    manifest.outputs.append(str(svg_path))
    manifest.finish(out_dir)
    return EXIT_OK


def cmd_design(args) -> int:
    cfg, out_dir = _load(args)
    bad = _require_assumption(cfg)
    if bad is not None:
        return bad
    method = args.method or cfg.design.method
    epsilon = args.epsilon or cfg.design.epsilon
    h = cfg.design.h
    delta = cfg.design.delta
    manifest = _manifest(args, cfg, "design", method=method, epsilon=epsilon, h=h)

    spectrum = pinned_spectrum(build_pinned_laplacian(cfg.graph))
    if method == "common":
        result = design_common_lkf(
            cfg.model, eigenvalue_hull(spectrum), h, epsilon
        )
    else:
        result = design_scaled(
            cfg.model, spectrum, h, epsilon, delta, jobs=args.jobs
        )

    if result.status == "infeasible":
        manifest.extra["status"] = "infeasible"
        manifest.finish(out_dir)
        return _fail(EXIT_INFEASIBLE, f"{method} design infeasible at h = {h:g}: {result.detail}")
    if result.status == "indeterminate":
        manifest.extra["status"] = "indeterminate"
        manifest.finish(out_dir)
        return _fail(EXIT_INCONCLUSIVE, f"design inconclusive: {result.detail}")

    design = result.design
    print(f"method = {method}, h = {h:g}, epsilon = {epsilon:g}")
    print(f"base gain = {np.array2string(design.base_gain, precision=6)}")
    print(f"coupling c = {design.coupling:.4f}, "
          f"admissible range [{design.c_range[0]:.4f}, {design.c_range[1]:.4f}]")
    print(f"effective gain = {np.array2string(design.gain, precision=6)}")

    design_path = out_dir / "design.json"
    design_path.write_text(json.dumps({
        "method": method,
        "h": h,
        "epsilon": epsilon,
        "base_gain": design.base_gain.tolist(),
        "coupling": design.coupling,
        "c_range": list(design.c_range),
        "gain": design.gain.tolist(),
        "certificate": {
            "h": design.certificate.h,
            "epsilon": design.certificate.epsilon,
            "method": design.certificate.method,
            "vertices": [[v.real, v.imag] for v in design.certificate.vertices],
            "hull": [[v.real, v.imag] for v in design.certificate.hull],
        },
    }, indent=2) + "\n")
    manifest.outputs.append(str(design_path))

    if args.epsilon_scan:
        rows = []
        vertices = eigenvalue_hull(spectrum)
        for eps in EPSILON_SCAN_GRID:
            if method == "common":
                r = design_common_lkf(cfg.model, vertices, h, eps)
            else:
                r = design_scaled(cfg.model, spectrum, h, eps, delta, jobs=args.jobs)
            if not r.feasible:
                print(f"epsilon = {eps:g}: infeasible")
                continue
            bound = max_delay_bound(
                cfg.model, r.design.gain, vertices, cfg.analysis.tolerance,
                h_cap=cfg.analysis.h_cap,
            )
            rows.append((eps, bound.h_max))
            print(f"epsilon = {eps:g}: achieved h_max = {bound.h_max:.4f}")
        scan_path = out_dir / "epsilon_scan.csv"
        write_csv(scan_path, ["epsilon", "h_max"], rows)
        manifest.outputs.append(str(scan_path))

    manifest.extra["status"] = "feasible"
    manifest.finish(out_dir)
    return EXIT_OK


def _resolve_simulation_inputs(cfg: ProblemConfig, args) -> SimulationConfig:
    gain = None
    if args.design:
        data = json.loads(Path(args.design).read_text())
        gain = np.array(data["gain"], dtype=float)
    elif cfg.analysis.gain is not None:
        gain = cfg.analysis.gain
    if gain is None:
        raise ConfigError("simulate needs --design or 'gain' in [analysis]")

    sim = cfg.simulation
    tau = args.tau if args.tau is not None else sim.tau
    if tau is None:
        raise ConfigError("simulate needs --tau or 'tau' in [simulation]")
    leader_x0 = sim.leader_x0
    if leader_x0 is None:
        leader_x0 = np.zeros(cfg.model.n)
    agent_x0 = sim.agent_x0
    if agent_x0 is None:
        lo, hi = sim.agent_x0_range or (-2.0, 2.0)
        seed = args.seed if args.seed is not None else sim.seed
        rng = np.random.default_rng(seed)
        agent_x0 = rng.uniform(lo, hi, size=(cfg.graph.n_agents, cfg.model.n))
    return SimulationConfig(
        model=cfg.model,
        graph=cfg.graph,
        gain=gain,
        tau=float(tau),
        leader_x0=leader_x0,
        agent_x0=agent_x0,
        t_final=sim.t_final,
        dt=sim.dt,
    )


def cmd_simulate(args) -> int:
    cfg, out_dir = _load(args)
    sim_cfg = _resolve_simulation_inputs(cfg, args)
    manifest = _manifest(args, cfg, "simulate", tau=sim_cfg.tau)

    traj = simulate(sim_cfg)
    final_err = float(traj.sync_error_norm[-1])
    if traj.diverged:
        print(f"tau = {sim_cfg.tau:g}: DIVERGED at t = {traj.times[-1]:.3f} s")
    else:
        print(f"tau = {sim_cfg.tau:g}: final sync error at t = {traj.times[-1]:.1f} s "
              f"is {final_err:.3e}")

    n, N = cfg.model.n, cfg.graph.n_agents
    header = ["t"] + [f"leader_x{i + 1}" for i in range(n)]
    for a in range(N):
        header += [f"agent{a + 1}_x{i + 1}" for i in range(n)]
    header.append("sync_error_norm")
    stride = max(1, len(traj.times) // 6000)
    rows = []
    for k in range(0, len(traj.times), stride):
        row = [traj.times[k], *traj.leader_states[k]]
        for a in range(N):
            row.extend(traj.agent_states[a, k])
        row.append(traj.sync_error_norm[k])
        rows.append(row)
    csv_path = out_dir / "trajectory.csv"
    write_csv(csv_path, header, rows)

    svg_path = out_dir / "trajectory.svg"
    trajectory_svg(svg_path, traj.times, traj.leader_states, traj.agent_states,
                   title=f"States, tau = {sim_cfg.tau:g} s")
    err_path = out_dir / "sync_error.svg"
    error_svg(err_path, traj.times, traj.sync_error_norm)

    manifest.outputs += [str(csv_path), str(svg_path), str(err_path)]
    manifest.extra["diverged"] = traj.diverged
    manifest.extra["final_error"] = final_err
    manifest.finish(out_dir)
    return EXIT_OK


def cmd_audit(args) -> int:
    cfg, out_dir = _load(args)
    bad = _require_assumption(cfg)
    if bad is not None:
        return bad
    gain = None
    if args.design:
        data = json.loads(Path(args.design).read_text())
        gain = np.array(data["gain"], dtype=float)
    else:
        gain = _analysis_gain(cfg)
    manifest = _manifest(args, cfg, "audit")

    spectrum = pinned_spectrum(build_pinned_laplacian(cfg.graph))
    vertices = eigenvalue_hull(spectrum)
    A_d = -cfg.model.B @ gain
    if not np.any(A_d):
        print("closed loop has no delayed term: delay-independent "
              "(audit gap undefined)")
        manifest.extra["delay_independent"] = True
        manifest.finish(out_dir)
        return EXIT_OK

    tol = args.tolerance or cfg.analysis.tolerance
    try:
        bound = max_delay_bound(cfg.model, gain, vertices, tol,
                                h_cap=cfg.analysis.h_cap)
    except DelayBoundError as exc:
        return _fail(EXIT_INFEASIBLE, str(exc))
    margin = true_delay_margin(
        cfg.model, A_d, vertices, cfg.analysis.oracle_tolerance
    )
    if margin == float("inf"):
        print(f"certified bound h_max = {bound.h_max:.4f}; spectral margin "
              "exceeds the search cap (delay-independent)")
        manifest.extra["delay_independent"] = True
    else:
        gap = margin - bound.h_max
        print(f"certified bound  h_max = {bound.h_max:.4f}")
        print(f"spectral margin  tau_m = {margin:.4f}")
        print(f"conservatism gap       = {gap:.4f}")
        manifest.extra.update(h_max=bound.h_max, tau_m=margin, gap=gap)
    manifest.finish(out_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delaysync",
        description="Delay-robust synchronization analysis and design "
                    "for LTI multi-agent systems on directed graphs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, tau: bool = False, design: bool = False,
               scan: bool = False) -> None:
        p.add_argument("--config", required=True, help="TOML problem configuration")
        p.add_argument("--out-dir", default="out", help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel feasibility workers")
        p.add_argument("--delta", type=float, default=None,
                       help="grid resolution override")
        p.add_argument("--tolerance", type=float, default=None,
                       help="bisection tolerance override")
        p.add_argument("--epsilon", type=float, default=None,
                       help="design tuning scalar override")
        p.add_argument("--method", choices=("common", "scaled"), default=None,
                       help="design method override")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for random initial conditions")
        if tau:
            p.add_argument("--tau", type=float, default=None,
                           help="simulation delay override")
        if design:
            p.add_argument("--design", default=None,
                           help="design JSON produced by the design command")
        if scan:
            p.add_argument("--epsilon-scan", action="store_true",
                           help="tabulate achieved h_max over an epsilon grid")

    p = sub.add_parser("delay-bound", help="largest certifiable delay bound")
    common(p)
    p.set_defaults(func=cmd_delay_bound)
    p = sub.add_parser("sync-region", help="synchronizing-region estimate")
    common(p)
    p.set_defaults(func=cmd_sync_region)
    p = sub.add_parser("design", help="synthesize a state-feedback gain")
    common(p, scan=True)
    p.set_defaults(func=cmd_design)
    p = sub.add_parser("simulate", help="integrate the delayed closed loop")
    common(p, tau=True, design=True)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("audit", help="certified bound vs spectral ground truth")
    common(p, design=True)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        return _fail(EXIT_VALIDATION, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
