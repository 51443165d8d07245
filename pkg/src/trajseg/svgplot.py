"""Deterministic SVG figures: raw tracks, segmented summaries, heatmaps.

Plain text-template SVG (no plotting dependency) so outputs are byte-stable
across runs and platforms, diffable, and trivially countable in tests: raw
and segmented layers draw one <polyline> per trajectory and the segmented
layer adds one <circle> per summary (local summaries enlarged and red).
"""

from __future__ import annotations

import zlib
from typing import Mapping, Sequence

import numpy as np

from .model import LOCAL, Rect, SampledTrajectory, SegmentSummary

LOCAL_COLOR = "#d62728"


def color_for(traj_id: str) -> str:
    """Stable per-id color: identity persists across runs and sessions."""
    hue = zlib.crc32(traj_id.encode("utf-8")) % 360
    return f"hsl({hue},65%,42%)"


class _Frame:
    """World-to-pixel mapping with a margin and the SVG y-flip."""

    def __init__(self, bounds: Rect, width: int):
        span = max(bounds.width, bounds.height, 1e-9)
        self.scale = (width - 20) / span
        self.bounds = bounds
        self.w = int(bounds.width * self.scale) + 20
        self.h = int(bounds.height * self.scale) + 20

    def px(self, x: float, y: float) -> tuple[float, float]:
        return (10 + (x - self.bounds.xmin) * self.scale,
                10 + (self.bounds.ymax - y) * self.scale)

    def header(self) -> str:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.w}" height="{self.h}" '
                f'viewBox="0 0 {self.w} {self.h}">\n'
                f'<rect width="{self.w}" height="{self.h}" fill="white"/>\n')


def _pool_bounds(trajs: Sequence[SampledTrajectory]) -> Rect:
    xs = np.concatenate([tr.xy[:, 0] for tr in trajs])
    ys = np.concatenate([tr.xy[:, 1] for tr in trajs])
    return Rect(float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max()))


def _polyline(points: list[tuple[float, float]], color: str, width: float) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}" stroke-opacity="0.85"/>\n')


def plot_raw(trajs: Sequence[SampledTrajectory], width: int = 900) -> str:
    """Every raw vertex, one polyline per trajectory (the clutter figure)."""
    if not trajs:
        raise ValueError("nothing to plot")
    frame = _Frame(_pool_bounds(trajs), width)
    parts = [frame.header()]
    for tr in trajs:
        pts = [frame.px(float(x), float(y)) for x, y in tr.xy]
        parts.append(_polyline(pts, color_for(tr.traj_id), 0.6))
    parts.append("</svg>\n")
    return "".join(parts)


def plot_segmented(per_traj: Mapping[str, Sequence[SegmentSummary]],
                   width: int = 900) -> str:
    """Summary view: centroid polylines plus one circle per summary.

    Local summaries follow the red-dot convention; marker count equals the
    total summary count exactly.
    """
    if not per_traj:
        raise ValueError("nothing to plot")
    xs, ys = [], []
    for summaries in per_traj.values():
        for s in summaries:
            xs.append(s.centroid[0])
            ys.append(s.centroid[1])
    frame = _Frame(Rect(min(xs), min(ys), max(xs), max(ys)), width)
    parts = [frame.header()]
    for traj_id in sorted(per_traj):
        summaries = per_traj[traj_id]
        color = color_for(traj_id)
        pts = [frame.px(*s.centroid) for s in summaries]
        if len(pts) > 1:
            parts.append(_polyline(pts, color, 1.0))
        for s, (px, py) in zip(summaries, pts):
            if s.kind == LOCAL:
                parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" '
                             f'fill="{LOCAL_COLOR}"/>\n')
            else:
                parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="1.5" '
                             f'fill="{color}"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def plot_heatmap(counts: np.ndarray, bounds: Rect, width: int = 900) -> str:
    """Cell-count heatmap; opacity scales with count, empty cells invisible."""
    if counts.size == 0 or counts.sum() == 0:
        raise ValueError("empty grid")
    frame = _Frame(bounds, width)
    ny, nx = counts.shape
    cw = bounds.width / nx * frame.scale
    ch = bounds.height / ny * frame.scale
    peak = float(counts.max())
    parts = [frame.header()]
    for iy, ix in zip(*np.nonzero(counts)):
        x = bounds.xmin + ix * bounds.width / nx
        y = bounds.ymin + (iy + 1) * bounds.height / ny
        px, py = frame.px(float(x), float(y))
        opacity = (counts[iy, ix] / peak) ** 0.5  # sqrt: lift faint cells
        parts.append(f'<rect x="{px:.2f}" y="{py:.2f}" '
                     f'width="{cw:.2f}" height="{ch:.2f}" '
                     f'fill="#08306b" fill-opacity="{opacity:.3f}"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)
