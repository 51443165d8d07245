"""Density-driven trajectory segmentation: batch, streaming, hierarchical.

A segment accumulates points into a running circle; once the circle's
radius passes min_r, the segment is cut as soon as its point density falls
below min_density. Dense bouts therefore keep growing past min_r and
collapse into a single summary, while locomotive stretches are decimated at
roughly min_r granularity. One pass, constant state per trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

from . import _kernel
from .density import (
    BoundingRectState,
    RunningCircleState,
    bounding_rect_update,
    running_circle_update,
)
from .model import (
    LOCAL,
    LOCOMOTIVE,
    SamplePoint,
    SampledTrajectory,
    Segmentation,
    SegmenterParams,
    SegmentSummary,
    TimestampRegressionError,
    summaries_as_trajectory,
)

Estimator = Literal["running_circle", "bounding_rect"]


def _make_summary(traj_id: str, params: SegmenterParams, cx: float, cy: float,
                  radius: float, n_points: int, start_idx: int, end_idx: int,
                  t_sum: float, t_start: float, t_end: float,
                  dense: bool) -> SegmentSummary:
    if params.t_rep_mode == "mean_time":
        t_rep = t_sum / n_points
        # float accumulation can land a hair outside the span
        t_rep = min(max(t_rep, t_start), t_end)
    else:
        t_rep = t_start
    return SegmentSummary(
        traj_id=traj_id,
        centroid=(cx, cy),
        t_rep=t_rep,
        radius=radius,
        n_points=n_points,
        start_idx=start_idx,
        end_idx=end_idx,
        t_start=t_start,
        t_end=t_end,
        kind=LOCAL if dense else LOCOMOTIVE,
    )


def segment_trajectory(
    traj: SampledTrajectory,
    params: SegmenterParams,
    estimator: Estimator = "running_circle",
) -> tuple[Segmentation, list[SegmentSummary]]:
    """Segment one whole trajectory; returns the cutoffs and the summaries.

    The default running-circle estimator runs through a compiled kernel.
    With estimator="bounding_rect" only the density expression changes
    (count over streaming bounding-box area); the radius trigger and the
    centroid stay as in the circle version.
    """
    if estimator == "running_circle":
        (cuts, cx, cy, r, n_pts, t_sum, t0, t1, flag) = _kernel.segment_arrays(
            traj.t, traj.xy[:, 0], traj.xy[:, 1],
            float(params.min_r), float(params.min_density))
        summaries = [
            _make_summary(traj.traj_id, params, float(cx[j]), float(cy[j]),
                          float(r[j]), int(n_pts[j]), int(cuts[j]),
                          int(cuts[j + 1]), float(t_sum[j]), float(t0[j]),
                          float(t1[j]), bool(flag[j]))
            for j in range(len(cx))
        ]
        return Segmentation(tuple(int(c) for c in cuts)), summaries

    if estimator != "bounding_rect":
        raise ValueError(f"unknown estimator {estimator!r}")

    engine = StreamEngine(params, estimator=estimator)
    summaries = []
    for p in traj:
        summaries.extend(engine.ingest(p))
    summaries.extend(engine.flush(traj.traj_id))
    cutoffs = [0] + [s.end_idx for s in summaries]
    return Segmentation(tuple(cutoffs)), summaries


@dataclass(slots=True)
class SegmenterState:
    """Constant-size per-trajectory running state.

    Size does not depend on the number of points consumed: one circle, one
    optional rectangle, and a handful of scalars.
    """

    params: SegmenterParams
    circle: RunningCircleState
    rect: BoundingRectState | None
    start_idx: int
    idx: int
    t_sum: float
    t_start: float
    t_last: float
    exceeded_while_dense: bool


class StreamEngine:
    """Multi-trajectory streaming segmenter with constant memory per id.

    Points arrive one at a time, each tagged with its trajectory id; an
    unknown id initializes fresh state, a known one applies the update
    step. Closed segments are returned from ingest() (and pushed to the
    optional sink); open segments are emitted by flush(). Per-trajectory
    results are identical to segment_trajectory for any interleaving.
    """

    def __init__(self, params: SegmenterParams,
                 estimator: Estimator = "running_circle",
                 sink: Callable[[SegmentSummary], None] | None = None):
        if estimator not in ("running_circle", "bounding_rect"):
            raise ValueError(f"unknown estimator {estimator!r}")
        self.params = params
        self.estimator = estimator
        self.sink = sink
        self.table: dict[str, SegmenterState] = {}

    def __len__(self) -> int:
        return len(self.table)

    def _emit(self, state: SegmenterState, traj_id: str) -> SegmentSummary:
        c = state.circle
        summary = _make_summary(
            traj_id, self.params, c.cx, c.cy, c.radius, c.n,
            state.start_idx, state.idx, state.t_sum, state.t_start,
            state.t_last, state.exceeded_while_dense)
        if self.sink is not None:
            self.sink(summary)
        return summary

    def ingest(self, p: SamplePoint) -> list[SegmentSummary]:
        """Consume one point; returns the segment it closed, if any."""
        state = self.table.get(p.traj_id)
        if state is None:
            rect = None
            if self.estimator == "bounding_rect":
                rect = bounding_rect_update(BoundingRectState.empty(), (p.x, p.y))
            self.table[p.traj_id] = SegmenterState(
                params=self.params,
                circle=RunningCircleState.from_first_point((p.x, p.y)),
                rect=rect,
                start_idx=0, idx=1,
                t_sum=p.t, t_start=p.t, t_last=p.t,
                exceeded_while_dense=False)
            return []

        if p.t < state.t_last:
            raise TimestampRegressionError(
                f"{p.traj_id!r}: t={p.t} after t={state.t_last}")

        trial = running_circle_update(state.circle, (p.x, p.y))
        rect_trial = None
        if state.rect is not None:
            rect_trial = bounding_rect_update(state.rect, (p.x, p.y))

        cut = False
        if trial.radius > self.params.min_r:
            if rect_trial is None:
                density = trial.n / (math.pi * trial.radius * trial.radius)
            else:
                area = ((rect_trial.maxx - rect_trial.minx)
                        * (rect_trial.maxy - rect_trial.miny))
                density = math.inf if area == 0.0 else rect_trial.n / area
            if density < self.params.min_density:
                cut = True
            else:
                state.exceeded_while_dense = True

        if cut:
            closed = self._emit(state, p.traj_id)
            state.circle = RunningCircleState.from_first_point((p.x, p.y))
            if state.rect is not None:
                state.rect = bounding_rect_update(BoundingRectState.empty(),
                                                  (p.x, p.y))
            state.start_idx = state.idx
            state.idx += 1
            state.t_sum = p.t
            state.t_start = p.t
            state.t_last = p.t
            state.exceeded_while_dense = False
            return [closed]

        state.circle = trial
        state.rect = rect_trial
        state.idx += 1
        state.t_sum = state.t_sum + p.t
        state.t_last = p.t
        return []

    def flush(self, traj_id: str | None = None) -> list[SegmentSummary]:
        """Close the open segment(s) and drop state; all ids when None.

        Flushing everything twice is a no-op the second time; flushing a
        specific id with no live state raises KeyError.
        """
        if traj_id is not None:
            state = self.table.pop(traj_id, None)
            if state is None:
                raise KeyError(f"unknown traj_id {traj_id!r}")
            return [self._emit(state, traj_id)]
        out = []
        for tid in list(self.table):
            state = self.table.pop(tid)
            out.append(self._emit(state, tid))
        return out


def segment_hierarchy(
    traj: SampledTrajectory,
    params_ladder: Sequence[SegmenterParams],
) -> list[list[SegmentSummary]]:
    """Re-segment the segmenter's own output at increasing radii.

    Level 0 segments the raw trajectory with the first params; each further
    level segments the previous level's centroid trajectory. Radii must
    strictly increase up the ladder. Returns the summaries of every level.
    """
    if not params_ladder:
        raise ValueError("empty params ladder")
    radii = [p.min_r for p in params_ladder]
    if any(a >= b for a, b in zip(radii, radii[1:])):
        raise ValueError("ladder radii must strictly increase")
    levels = []
    current = traj
    for params in params_ladder:
        _, summaries = segment_trajectory(current, params)
        levels.append(summaries)
        current = summaries_as_trajectory(summaries)
    return levels


def estimate_compression(l: float, r: float, n1: int, n2: int) -> float:
    """Predicted summary/raw size ratio for one locomotive+local bout pair.

    A locomotive part of path length l keeps at most l/r points at radius
    r, and the following local part collapses to one, against n1 + n2 raw
    points: (l/r + 1) / (n1 + n2).
    """
    if l <= 0 or r <= 0 or n1 <= 0 or n2 <= 0:
        raise ValueError("all compression inputs must be positive")
    return (l / r + 1.0) / (n1 + n2)
