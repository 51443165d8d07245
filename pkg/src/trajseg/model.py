"""Core data model: sample points, trajectories, segmentations, summaries.

All types here are plain values, immutable after construction, and shared by
every other module. Positions are abstract planar coordinates; geographic
input must be projected at ingestion (see trajseg.store).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Literal, Sequence

import numpy as np

Kind = Literal["local", "locomotive"]
LOCAL: Kind = "local"
LOCOMOTIVE: Kind = "locomotive"

T_REP_MODES = ("mean_time", "start_time")


class TimestampRegressionError(ValueError):
    """A point arrived with a timestamp older than its trajectory's last."""


class DisjointTimeError(ValueError):
    """Two trajectories share no time overlap; carries both spans."""

    def __init__(self, span_a: tuple[float, float], span_b: tuple[float, float]):
        self.span_a = span_a
        self.span_b = span_b
        super().__init__(
            f"no temporal overlap: spans {span_a} and {span_b}")


@dataclass(frozen=True, slots=True)
class SamplePoint:
    """One (trajectory id, timestamp, planar position) observation."""

    traj_id: str
    t: float
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)
                and math.isfinite(self.y)):
            raise ValueError(f"non-finite sample for {self.traj_id!r}")

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)


class SampledTrajectory:
    """A time-ordered sequence of samples of one moving entity.

    Backed by contiguous float64 arrays (t of shape (n,), xy of shape
    (n, 2)) so the segmenter and the query metrics can work on them
    directly. Non-empty, timestamps non-decreasing.
    """

    __slots__ = ("traj_id", "t", "xy")

    def __init__(self, traj_id: str, t: np.ndarray, xy: np.ndarray):
        t = np.ascontiguousarray(t, dtype=np.float64)
        xy = np.ascontiguousarray(xy, dtype=np.float64)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("trajectory must contain at least one point")
        if xy.shape != (t.size, 2):
            raise ValueError(f"xy shape {xy.shape} does not match {t.size} timestamps")
        if not (np.isfinite(t).all() and np.isfinite(xy).all()):
            raise ValueError("trajectory contains non-finite values")
        if t.size > 1 and np.any(np.diff(t) < 0):
            raise ValueError("timestamps must be non-decreasing")
        self.traj_id = traj_id
        self.t = t
        self.xy = xy
        t.setflags(write=False)
        xy.setflags(write=False)

    @classmethod
    def from_points(cls, points: Sequence[SamplePoint]) -> "SampledTrajectory":
        if not points:
            raise ValueError("trajectory must contain at least one point")
        traj_id = points[0].traj_id
        if any(p.traj_id != traj_id for p in points):
            raise ValueError("all points must share one traj_id")
        t = np.array([p.t for p in points], dtype=np.float64)
        xy = np.array([[p.x, p.y] for p in points], dtype=np.float64)
        return cls(traj_id, t, xy)

    def __len__(self) -> int:
        return self.t.size

    def __iter__(self) -> Iterator[SamplePoint]:
        for i in range(self.t.size):
            yield SamplePoint(self.traj_id, float(self.t[i]),
                              float(self.xy[i, 0]), float(self.xy[i, 1]))

    def __repr__(self) -> str:
        return f"SampledTrajectory({self.traj_id!r}, n={len(self)})"

    def bounds(self) -> "Rect":
        return Rect(float(self.xy[:, 0].min()), float(self.xy[:, 1].min()),
                    float(self.xy[:, 0].max()), float(self.xy[:, 1].max()))


@dataclass(frozen=True)
class Segmentation:
    """Cutoff indexes partitioning a trajectory into half-open segments.

    cutoffs run 0 = c_0 < c_1 < ... < c_k = n; segment j covers point
    indexes [c_j, c_{j+1}). Each point belongs to exactly one segment.
    """

    cutoffs: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cutoffs) - 1

    def segments(self) -> Iterator[tuple[int, int]]:
        for a, b in zip(self.cutoffs, self.cutoffs[1:]):
            yield (a, b)


def validate_segmentation(traj: SampledTrajectory, seg: Segmentation) -> bool:
    """True iff cutoffs strictly increase from 0 to len(traj)."""
    c = seg.cutoffs
    if len(c) < 2 or c[0] != 0 or c[-1] != len(traj):
        return False
    return all(a < b for a, b in zip(c, c[1:]))


@dataclass(frozen=True)
class SegmenterParams:
    """Segmenter knobs: minimum segment radius, density floor, t_rep mode.

    min_r sets the spatial granularity kept for locomotive stretches;
    min_density lets dense local bouts grow past min_r as one segment.
    """

    min_r: float
    min_density: float
    t_rep_mode: str = "mean_time"

    def __post_init__(self):
        if not (self.min_r > 0):
            raise ValueError("min_r must be > 0")
        if not (self.min_density > 0):
            raise ValueError("min_density must be > 0")
        if self.t_rep_mode not in T_REP_MODES:
            raise ValueError(f"t_rep_mode must be one of {T_REP_MODES}")


@dataclass(frozen=True, slots=True)
class SegmentSummary:
    """One closed segment: centroid, representative time, extent, bounds.

    kind is "local" for segments that grew past min_r while dense (dense
    bouts of space use) and "locomotive" otherwise. Index bounds are
    half-open: the segment owns points [start_idx, end_idx).
    """

    traj_id: str
    centroid: tuple[float, float]
    t_rep: float
    radius: float
    n_points: int
    start_idx: int
    end_idx: int
    t_start: float
    t_end: float
    kind: str

    def __post_init__(self):
        if self.end_idx <= self.start_idx:
            raise ValueError("end_idx must exceed start_idx")
        if self.n_points != self.end_idx - self.start_idx:
            raise ValueError("n_points must equal end_idx - start_idx")
        if not (self.t_start <= self.t_rep <= self.t_end):
            raise ValueError("t_rep must lie within [t_start, t_end]")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if self.kind not in (LOCAL, LOCOMOTIVE):
            raise ValueError(f"unknown kind {self.kind!r}")


# JSON-lines field order for segment export; fixed so output is diffable.
_SUMMARY_FIELDS = ("traj_id", "centroid", "t_rep", "radius", "n_points",
                   "start_idx", "end_idx", "t_start", "t_end", "kind")


def summary_to_json(s: SegmentSummary) -> str:
    """One compact JSON object per summary, fields in documented order."""
    rec = {
        "traj_id": s.traj_id,
        "centroid": [s.centroid[0], s.centroid[1]],
        "t_rep": s.t_rep,
        "radius": s.radius,
        "n_points": s.n_points,
        "start_idx": s.start_idx,
        "end_idx": s.end_idx,
        "t_start": s.t_start,
        "t_end": s.t_end,
        "kind": s.kind,
    }
    return json.dumps(rec, separators=(",", ":"))


def summary_from_json(line: str) -> SegmentSummary:
    rec = json.loads(line)
    missing = [f for f in _SUMMARY_FIELDS if f not in rec]
    if missing:
        raise ValueError(f"summary record missing fields {missing}")
    return SegmentSummary(
        traj_id=rec["traj_id"],
        centroid=(float(rec["centroid"][0]), float(rec["centroid"][1])),
        t_rep=float(rec["t_rep"]),
        radius=float(rec["radius"]),
        n_points=int(rec["n_points"]),
        start_idx=int(rec["start_idx"]),
        end_idx=int(rec["end_idx"]),
        t_start=float(rec["t_start"]),
        t_end=float(rec["t_end"]),
        kind=rec["kind"],
    )


def summaries_as_trajectory(summaries: Sequence[SegmentSummary]) -> SampledTrajectory:
    """Turn per-segment centroids back into a sampled trajectory.

    The (t_rep, centroid) pairs of a trajectory's summaries are themselves
    a trajectory, so the segmenter can be re-applied to its own output
    (hierarchical segmentation). Requires one traj_id, ordered by t_rep.
    """
    if not summaries:
        raise ValueError("cannot build a trajectory from zero summaries")
    traj_id = summaries[0].traj_id
    if any(s.traj_id != traj_id for s in summaries):
        raise ValueError("summaries must belong to one traj_id")
    t = np.array([s.t_rep for s in summaries], dtype=np.float64)
    if np.any(np.diff(t) < 0):
        raise ValueError("summaries must be ordered by t_rep")
    xy = np.array([[s.centroid[0], s.centroid[1]] for s in summaries],
                  dtype=np.float64)
    return SampledTrajectory(traj_id, t, xy)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, inclusive bounds."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ValueError("rect has negative extent")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def inflate(self, d: float) -> "Rect":
        return Rect(self.xmin - d, self.ymin - d, self.xmax + d, self.ymax + d)

    def intersects_circle(self, cx: float, cy: float, r: float) -> bool:
        """True iff the disc (cx, cy, r) meets this rectangle."""
        nx = min(max(cx, self.xmin), self.xmax)
        ny = min(max(cy, self.ymin), self.ymax)
        return math.hypot(cx - nx, cy - ny) <= r

    def as_list(self) -> list[float]:
        return [self.xmin, self.ymin, self.xmax, self.ymax]
