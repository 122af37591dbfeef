"""Trajectory and report emitters: CSV, static SVG line plots, JSON.

The CSV schema is versioned through the config schema: columns are
``t,x_1..x_n,segment,is_impulse_node`` with 17 significant digits and '.'
decimal separators; impulse instants produce two rows (left then right
limit).  SVG plots are deliberately minimal static line charts: axes,
ticks, one polyline per component, impulse markers as vertical dashed
lines, and a legend.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fode import Trajectory
from .stability import CertificateReport

CSV_COLUMNS_FIXED = ("segment", "is_impulse_node")
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")


def _g17(v: float) -> str:
    return f"{float(v):.17g}"


def csv_header(dimension: int) -> list[str]:
    return ["t"] + [f"x_{i + 1}" for i in range(dimension)] + list(CSV_COLUMNS_FIXED)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per node; impulse nodes emit a left row then a right row."""
    impulse_set = set(traj.impulse_indices)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_header(traj.dimension))
        for i, t in enumerate(traj.times):
            seg = traj.segment_of_node(i)
            is_imp = 1 if i in impulse_set else 0
            writer.writerow(
                [_g17(t)] + [_g17(v) for v in traj.left[i]] + [seg, is_imp]
            )
            if is_imp:
                writer.writerow(
                    [_g17(t)] + [_g17(v) for v in traj.right[i]] + [seg + 1, is_imp]
                )


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def write_trajectory_svg(traj: Trajectory, path, title: str = "") -> None:
    """Static SVG line chart of every state component against time."""
    width, height = 860, 480
    ml, mr, mt, mb = 62.0, 150.0, 34.0, 48.0
    plot_w, plot_h = width - ml - mr, height - mt - mb

    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    lo = min(float(traj.left.min()), float(traj.right.min()))
    hi = max(float(traj.left.max()), float(traj.right.max()))
    pad = 0.05 * max(hi - lo, 1e-12)
    lo, hi = lo - pad, hi + pad

    def sx(t):
        return ml + (t - t0) / (t1 - t0) * plot_w

    def sy(v):
        return mt + (hi - v) / (hi - lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{ml}" y="20" font-family="sans-serif" font-size="14">'
            f"{title}</text>"
        )
    # axes
    parts.append(
        f'<line x1="{ml}" y1="{mt + plot_h:.2f}" x2="{ml + plot_w:.2f}" '
        f'y2="{mt + plot_h:.2f}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + plot_h:.2f}" '
        f'stroke="black"/>'
    )
    for tv in _ticks(t0, t1):
        x = sx(tv)
        parts.append(
            f'<line x1="{x:.2f}" y1="{mt + plot_h:.2f}" x2="{x:.2f}" '
            f'y2="{mt + plot_h + 5:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{mt + plot_h + 18:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tv:.4g}</text>'
        )
    for vv in _ticks(lo, hi):
        y = sy(vv)
        parts.append(
            f'<line x1="{ml - 5:.2f}" y1="{y:.2f}" x2="{ml}" y2="{y:.2f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{ml - 8:.2f}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{vv:.4g}</text>'
        )
    parts.append(
        f'<text x="{ml + plot_w / 2:.2f}" y="{height - 10}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">t</text>'
    )
    # impulse markers
    for idx in traj.impulse_indices:
        x = sx(float(traj.times[idx]))
        parts.append(
            f'<line x1="{x:.2f}" y1="{mt}" x2="{x:.2f}" y2="{mt + plot_h:.2f}" '
            f'stroke="#888888" stroke-dasharray="5,4"/>'
        )
    # one polyline per component, broken at impulse nodes
    impulse_set = set(traj.impulse_indices)
    for comp in range(traj.dimension):
        color = _PALETTE[comp % len(_PALETTE)]
        d = [f"M {sx(float(traj.times[0])):.2f},{sy(float(traj.left[0, comp])):.2f}"]
        for i in range(1, len(traj.times)):
            d.append(
                f"L {sx(float(traj.times[i])):.2f},"
                f"{sy(float(traj.left[i, comp])):.2f}"
            )
            if i in impulse_set:
                d.append(
                    f"M {sx(float(traj.times[i])):.2f},"
                    f"{sy(float(traj.right[i, comp])):.2f}"
                )
        parts.append(
            f'<path d="{" ".join(d)}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        # legend entry
        y = mt + 16 + 18 * comp
        x = ml + plot_w + 14
        parts.append(
            f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x + 22:.2f}" y2="{y:.2f}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{x + 28:.2f}" y="{y + 4:.2f}" font-family="sans-serif" '
            f'font-size="12">x_{comp + 1}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def report_to_dict(report: CertificateReport) -> dict:
    return {
        "theorem": report.theorem,
        "pass": report.passed,
        "margins": {k: float(v) for k, v in report.margins.items()},
        "computed": {
            k: np.asarray(v).tolist() for k, v in report.computed.items()
        },
        "decay_rate": None if report.decay_rate is None else float(report.decay_rate),
        "notes": list(report.notes),
    }


def write_report_json(report: CertificateReport, path) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
    )


def format_report(report: CertificateReport, color: bool = False) -> str:
    """Human-readable certificate report for the terminal."""
    verdict = "PASS" if report.passed else "FAIL"
    if color:
        code = "32" if report.passed else "31"
        verdict = f"\x1b[{code}m{verdict}\x1b[0m"
    lines = [f"certificate: {report.theorem}", f"verdict: {verdict}", "margins:"]
    for name, value in report.margins.items():
        lines.append(f"  {name} = {value:.10g}")
    for name, mat in report.computed.items():
        rows = np.asarray(mat)
        lines.append(f"{name}:")
        for row in rows:
            lines.append("  [" + ", ".join(f"{v: .10g}" for v in row) + "]")
    if report.decay_rate is not None:
        lines.append(f"decay rate: {report.decay_rate:.10g}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines)


@dataclass(frozen=True)
class RunManifest:
    """What a command run produced; every listed output exists on success."""

    config_digest: str
    solver_settings: dict
    outputs: tuple
    certificate_summaries: tuple = ()
    duration_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "solver_settings": dict(self.solver_settings),
            "outputs": list(self.outputs),
            "certificate_summaries": [dict(s) for s in self.certificate_summaries],
            "duration_seconds": self.duration_seconds,
        }


def write_manifest(manifest: RunManifest, path) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
