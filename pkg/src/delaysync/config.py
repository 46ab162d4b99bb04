"""TOML problem configurations.

One file describes a scenario in up to five sections: [model] (matrices A
and B), [graph] (adjacency matrix or edge list, plus pinning), [analysis]
(gain, delay bound(s), grid resolution, tolerance), [design] (method, h,
epsilon, delta) and [simulation] (tau, horizon, step, initial states).
Matrices are nested row arrays.  See the README for the full grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .graphs import PinnedDigraph
from .lmi import AgentModel


class ConfigError(ValueError):
    """Malformed or inconsistent configuration file."""


@dataclass(frozen=True, eq=False)
class AnalysisParams:
    gain: Optional[np.ndarray] = None
    h: tuple[float, ...] = ()
    delta: float = 0.05
    tolerance: float = 0.005
    h_cap: float = 100.0
    oracle_tolerance: float = 0.002


@dataclass(frozen=True, eq=False)
class DesignParams:
    method: str = "common"
    h: float = 0.6
    epsilon: float = 0.1
    delta: float = 0.05


@dataclass(frozen=True, eq=False)
class SimulationParams:
    tau: Optional[float] = None
    t_final: float = 60.0
    dt: float = 1e-3
    leader_x0: Optional[np.ndarray] = None
    agent_x0: Optional[np.ndarray] = None
    agent_x0_range: Optional[tuple[float, float]] = None
    seed: int = 0


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    model: AgentModel
    graph: PinnedDigraph
    analysis: AnalysisParams
    design: DesignParams
    simulation: SimulationParams
    raw: dict = field(default_factory=dict)


def _matrix(section: dict, key: str, where: str) -> np.ndarray:
    try:
        return np.array(section[key], dtype=float)
    except KeyError:
        raise ConfigError(f"missing '{key}' in [{where}]") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{key}' in [{where}] is not a numeric matrix: {exc}") from None


def _positive(value: float, name: str) -> float:
    value = float(value)
    if value <= 0:
        raise ConfigError(f"'{name}' must be positive, got {value}")
    return value


def load_config(path: str | Path) -> ProblemConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from None
    return parse_config(raw)


def parse_config(raw: dict[str, Any]) -> ProblemConfig:
    if "model" not in raw:
        raise ConfigError("missing [model] section")
    if "graph" not in raw:
        raise ConfigError("missing [graph] section")

    A = _matrix(raw["model"], "A", "model")
    B = _matrix(raw["model"], "B", "model")
    try:
        model = AgentModel(A=A, B=B)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    gsec = raw["graph"]
    try:
        if "adjacency" in gsec:
            graph = PinnedDigraph(
                adjacency=_matrix(gsec, "adjacency", "graph"),
                pinning=_matrix(gsec, "pinning", "graph"),
            )
        elif "edges" in gsec:
            n = int(gsec.get("n", 0))
            if n <= 0:
                raise ConfigError("[graph] with an edge list needs a positive 'n'")
            edges = [(int(e[0]), int(e[1]), float(e[2])) for e in gsec["edges"]]
            graph = PinnedDigraph.from_edges(
                n, edges, _matrix(gsec, "pinning", "graph")
            )
        else:
            raise ConfigError("[graph] needs either 'adjacency' or 'edges'")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if graph.n_agents > 0 and graph.adjacency.shape[0] != graph.n_agents:
        raise ConfigError("inconsistent graph dimensions")

    asec = raw.get("analysis", {})
    gain = None
    if "gain" in asec:
        gain = _matrix(asec, "gain", "analysis")
        if gain.ndim == 1:
            gain = gain.reshape(1, -1)
        if gain.shape != (model.m, model.n):
            raise ConfigError(
                f"analysis gain must be {model.m} x {model.n}, got {gain.shape}"
            )
    h_raw = asec.get("h", [])
    h_values = tuple(float(v) for v in (h_raw if isinstance(h_raw, list) else [h_raw]))
    for h in h_values:
        if h < 0:
            raise ConfigError(f"analysis h must be nonnegative, got {h}")
    analysis = AnalysisParams(
        gain=gain,
        h=h_values,
        delta=_positive(asec.get("delta", 0.05), "delta"),
        tolerance=_positive(asec.get("tolerance", 0.005), "tolerance"),
        h_cap=_positive(asec.get("h_cap", 100.0), "h_cap"),
        oracle_tolerance=_positive(
            asec.get("oracle_tolerance", 0.002), "oracle_tolerance"
        ),
    )

    dsec = raw.get("design", {})
    method = str(dsec.get("method", "common"))
    if method not in ("common", "scaled"):
        raise ConfigError(f"design method must be 'common' or 'scaled', got '{method}'")
    design = DesignParams(
        method=method,
        h=_positive(dsec.get("h", 0.6), "design h"),
        epsilon=_positive(dsec.get("epsilon", 0.1), "epsilon"),
        delta=_positive(dsec.get("delta", 0.05), "design delta"),
    )

    ssec = raw.get("simulation", {})
    tau = ssec.get("tau")
    if tau is not None:
        tau = float(tau)
        if tau < 0:
            raise ConfigError(f"simulation tau must be nonnegative, got {tau}")
    leader_x0 = None
    if "leader_x0" in ssec:
        leader_x0 = _matrix(ssec, "leader_x0", "simulation").reshape(-1)
        if leader_x0.shape != (model.n,):
            raise ConfigError(f"leader_x0 must have length {model.n}")
    agent_x0 = None
    if "agent_x0" in ssec:
        agent_x0 = np.atleast_2d(_matrix(ssec, "agent_x0", "simulation"))
        if agent_x0.shape != (graph.n_agents, model.n):
            raise ConfigError(
                f"agent_x0 must be {graph.n_agents} x {model.n}, got {agent_x0.shape}"
            )
    rng = ssec.get("agent_x0_range")
    agent_range = None
    if rng is not None:
        if len(rng) != 2 or float(rng[0]) >= float(rng[1]):
            raise ConfigError("agent_x0_range must be [low, high] with low < high")
        agent_range = (float(rng[0]), float(rng[1]))
    simulation = SimulationParams(
        tau=tau,
        t_final=_positive(ssec.get("t_final", 60.0), "t_final"),
        dt=_positive(ssec.get("dt", 1e-3), "dt"),
        leader_x0=leader_x0,
        agent_x0=agent_x0,
        agent_x0_range=agent_range,
        seed=int(ssec.get("seed", 0)),
    )

    return ProblemConfig(
        model=model,
        graph=graph,
        analysis=analysis,
        design=design,
        simulation=simulation,
        raw=raw,
    )
