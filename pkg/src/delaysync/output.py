"""File emission: full-precision CSV, self-contained SVG, run manifests."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FLOAT_FMT = "%.17g"

_PALETTE = (
    "#1f6feb", "#d73a49", "#2da44e", "#bf5af2",
    "#e36209", "#0a9396", "#6e7781", "#9a6700",
)


def fmt(value: float) -> str:
    return FLOAT_FMT % value


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


@dataclass
class RunManifest:
    """Reproducibility record emitted alongside every command's outputs."""

    command: str
    config: dict
    version: str
    solver_settings: dict
    outputs: list[str] = field(default_factory=list)
    wall_clock_s: float = 0.0
    extra: dict = field(default_factory=dict)
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def finish(self, out_dir: Path) -> Path:
        self.wall_clock_s = time.perf_counter() - self._start
        path = out_dir / "manifest.json"
        payload = {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "solver_settings": self.solver_settings,
            "outputs": self.outputs,
            "wall_clock_s": self.wall_clock_s,
        }
        payload.update(self.extra)
        path.write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")
        return path


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


class SvgCanvas:
    """Minimal standalone SVG plot surface with linear data-to-pixel mapping."""

    def __init__(
        self,
        xlim: tuple[float, float],
        ylim: tuple[float, float],
        width: int = 640,
        height: int = 480,
        title: str = "",
        xlabel: str = "",
        ylabel: str = "",
    ) -> None:
        self.margin = 54
        self.width = width
        self.height = height
        pad_x = 0.05 * (xlim[1] - xlim[0] or 1.0)
        pad_y = 0.05 * (ylim[1] - ylim[0] or 1.0)
        self.xlim = (xlim[0] - pad_x, xlim[1] + pad_x)
        self.ylim = (ylim[0] - pad_y, ylim[1] + pad_y)
        self.parts: list[str] = []
        self._frame(title, xlabel, ylabel)

    def _px(self, x: float) -> float:
        frac = (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0])
        return self.margin + frac * (self.width - 2 * self.margin)

    def _py(self, y: float) -> float:
        frac = (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0])
        return self.height - self.margin - frac * (self.height - 2 * self.margin)

    def _frame(self, title: str, xlabel: str, ylabel: str) -> None:
        m, w, h = self.margin, self.width, self.height
        self.parts.append(
            f'<rect x="{m}" y="{m}" width="{w - 2 * m}" height="{h - 2 * m}" '
            'fill="white" stroke="#444" stroke-width="1"/>'
        )
        if title:
            self.parts.append(
                f'<text x="{w / 2}" y="{m - 16}" text-anchor="middle" '
                f'font-size="14">{title}</text>'
            )
        if xlabel:
            self.parts.append(
                f'<text x="{w / 2}" y="{h - 10}" text-anchor="middle" '
                f'font-size="12">{xlabel}</text>'
            )
        if ylabel:
            self.parts.append(
                f'<text x="14" y="{h / 2}" text-anchor="middle" font-size="12" '
                f'transform="rotate(-90 14 {h / 2})">{ylabel}</text>'
            )
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            x = self.xlim[0] + frac * (self.xlim[1] - self.xlim[0])
            y = self.ylim[0] + frac * (self.ylim[1] - self.ylim[0])
            self.parts.append(
                f'<text x="{self._px(x):.1f}" y="{h - m + 16}" text-anchor="middle" '
                f'font-size="10">{x:.3g}</text>'
            )
            self.parts.append(
                f'<text x="{m - 6}" y="{self._py(y):.1f}" text-anchor="end" '
                f'font-size="10" dominant-baseline="middle">{y:.3g}</text>'
            )

    def polyline(self, xs: Sequence[float], ys: Sequence[float], color: str,
                 width: float = 1.5, dashed: bool = False) -> None:
        pts = " ".join(f"{self._px(x):.2f},{self._py(y):.2f}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash}/>'
        )

    def polygon(self, vertices: Sequence[complex], color: str) -> None:
        pts = " ".join(
            f"{self._px(v.real):.2f},{self._py(v.imag):.2f}" for v in vertices
        )
        self.parts.append(
            f'<polygon points="{pts}" fill="{color}" fill-opacity="0.12" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )

    def marker(self, x: float, y: float, color: str, label: str = "") -> None:
        px, py = self._px(x), self._py(y)
        self.parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="{color}" '
            'stroke="#222" stroke-width="0.8"/>'
        )
        if label:
            self.parts.append(
                f'<text x="{px + 7:.2f}" y="{py - 5:.2f}" font-size="10">{label}</text>'
            )

    def legend(self, entries: Sequence[tuple[str, str]]) -> None:
        x = self.width - self.margin - 150
        y = self.margin + 14
        for i, (label, color) in enumerate(entries):
            yy = y + 16 * i
            self.parts.append(
                f'<line x1="{x}" y1="{yy}" x2="{x + 22}" y2="{yy}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            self.parts.append(
                f'<text x="{x + 28}" y="{yy + 4}" font-size="11">{label}</text>'
            )

    def save(self, path: Path) -> None:
        body = "\n".join(self.parts)
        path.write_text(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )


def region_svg(
    path: Path,
    regions: Sequence[tuple[str, Sequence[complex]]],
    eigenvalues: Sequence[complex],
    title: str = "Synchronizing region estimate",
) -> None:
    """Hull polygon(s) with eigenvalue markers in the complex plane."""
    xs = [v.real for _, hull in regions for v in hull] + [z.real for z in eigenvalues]
    ys = [v.imag for _, hull in regions for v in hull] + [z.imag for z in eigenvalues]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    canvas = SvgCanvas(
        (min(xs), max(xs)), (min(ys), max(ys)),
        title=title, xlabel="Re", ylabel="Im",
    )
    entries = []
    for i, (label, hull) in enumerate(regions):
        color = _PALETTE[i % len(_PALETTE)]
        if hull:
            canvas.polygon(list(hull), color)
        entries.append((label, color))
    for z in eigenvalues:
        canvas.marker(z.real, z.imag, "#111", f"{z.real:.3g}{z.imag:+.3g}j")
    if entries:
        canvas.legend(entries)
    canvas.save(path)


def trajectory_svg(
    path: Path,
    times: np.ndarray,
    leader_states: np.ndarray,
    agent_states: np.ndarray,
    title: str = "Leader and agent states",
) -> None:
    """Per-component state traces: leader dashed, agents solid."""
    n = leader_states.shape[1]
    lo = min(float(leader_states.min()), float(agent_states.min()))
    hi = max(float(leader_states.max()), float(agent_states.max()))
    canvas = SvgCanvas(
        (float(times[0]), float(times[-1])), (lo, hi),
        title=title, xlabel="t [s]", ylabel="state",
    )
    stride = max(1, len(times) // 2000)
    t = times[::stride]
    for comp in range(n):
        color = _PALETTE[comp % len(_PALETTE)]
        for a in range(agent_states.shape[0]):
            canvas.polyline(t, agent_states[a, ::stride, comp], color, width=1.0)
        canvas.polyline(t, leader_states[::stride, comp], "#111", width=1.8, dashed=True)
    canvas.legend(
        [(f"component {i + 1}", _PALETTE[i % len(_PALETTE)]) for i in range(n)]
        + [("leader", "#111")]
    )
    canvas.save(path)


def error_svg(path: Path, times: np.ndarray, error_norm: np.ndarray,
              title: str = "Synchronization error") -> None:
    canvas = SvgCanvas(
        (float(times[0]), float(times[-1])),
        (0.0, float(np.max(error_norm))),
        title=title, xlabel="t [s]", ylabel="error norm",
    )
    stride = max(1, len(times) // 2000)
    canvas.polyline(times[::stride], error_norm[::stride], _PALETTE[0])
    canvas.save(path)
