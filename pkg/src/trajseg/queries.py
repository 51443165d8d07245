"""Range, KNN, pairwise, and hybrid queries over the segment index.

Everything here runs against summary trajectories (the compact index)
except the hybrid path, which uses the index to narrow candidate windows
and then verifies against raw slices. The raw store's points_read counter
exposes exactly how much full data any query touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .model import (
    DisjointTimeError,
    Rect,
    SampledTrajectory,
    summaries_as_trajectory,
)
from .store import Dataset

METRICS = ("hausdorff", "dtw")

# Default raw-window padding (and run-merge gap) for hybrid refinement, in
# the stream's time units; generous for second-scale sampling.
DEFAULT_TIME_PAD = 60.0


def hausdorff_distance(a: SampledTrajectory, b: SampledTrajectory) -> float:
    """Symmetric discrete Hausdorff over the two point sets."""
    d = cdist(a.xy, b.xy)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))

def dtw_distance(a: SampledTrajectory, b: SampledTrajectory) -> float:
    """Dynamic time warping, Euclidean ground distance, no window, no
    length normalization (documented so rankings are reproducible)."""
    cost = cdist(a.xy, b.xy)
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        row = acc[i]
        prev = acc[i - 1]
        crow = cost[i - 1]
        for j in range(1, m + 1):
            row[j] = crow[j - 1] + min(prev[j], row[j - 1], prev[j - 1])
    return float(acc[n, m])


def traj_distance(a: SampledTrajectory, b: SampledTrajectory,
                  metric: str = "hausdorff") -> float:
    if metric == "hausdorff":
        return hausdorff_distance(a, b)
    if metric == "dtw":
        return dtw_distance(a, b)
    raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")


@dataclass(frozen=True)
class Meeting:
    """A period during which two trajectories stayed within tolerance."""

    id_a: str
    id_b: str
    t_start: float
    t_end: float
    min_distance: float

    def as_dict(self) -> dict:
        return {"id_a": self.id_a, "id_b": self.id_b,
                "t_start": self.t_start, "t_end": self.t_end,
                "min_distance": self.min_distance}


@dataclass(frozen=True)
class _Event:
    t_mid: float
    t_lo: float
    t_hi: float
    dist: float


def _merge_events(events: list[_Event], gap: float) -> list[tuple[float, float, float]]:
    """Collapse time-sorted events into (t_start, t_end, min_dist) runs,
    merging neighbors whose spans come within `gap` of each other."""
    if not events:
        return []
    events = sorted(events, key=lambda e: (e.t_mid, e.t_lo))
    out = []
    start, end, best = events[0].t_lo, events[0].t_hi, events[0].dist
    for e in events[1:]:
        if e.t_lo - end <= gap:
            end = max(end, e.t_hi)
            best = min(best, e.dist)
        else:
            out.append((start, end, best))
            start, end, best = e.t_lo, e.t_hi, e.dist
    out.append((start, end, best))
    return out


class QueryEngine:
    """Query facade over one Dataset."""

    def __init__(self, dataset: Dataset):
        self.ds = dataset

    # -- index-only queries ------------------------------------------------

    def summary_trajectory(self, traj_id: str) -> SampledTrajectory:
        """The centroid trajectory of one id (raises KeyError if unknown)."""
        return summaries_as_trajectory(self.ds.segments.for_trajectory(traj_id))

    def query_range(self, rect: Rect, t0: float = -math.inf,
                    t1: float = math.inf) -> set[str]:
        """Ids with at least one summary circle meeting the window.

        Correct within segmentation granularity: an id whose raw points
        clipped the rect without dragging a summary circle into it can be
        missed by no more than the summary radius.
        """
        return {s.traj_id
                for s in self.ds.segments.index_rect_candidates(rect, t0, t1)}

    def query_knn(self, query: str | SampledTrajectory, k: int,
                  metric: str = "hausdorff"
                  ) -> tuple[list[tuple[str, float]], bool]:
        """k most similar stored trajectories, exhaustive over the index.

        Returns (ranked (id, distance) list, truncated flag); the flag is
        set when k exceeds the population and everything is returned.
        Ties break by id. The query id itself is excluded.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if isinstance(query, str):
            query_traj = self.summary_trajectory(query)
            exclude = query
        else:
            query_traj = query
            exclude = None
        ids = [i for i in self.ds.segments.ids() if i != exclude]
        if not ids:
            raise ValueError("no stored trajectories to rank")
        scored = [(traj_distance(query_traj, self.summary_trajectory(i), metric), i)
                  for i in ids]
        scored.sort()
        truncated = k > len(scored)
        return [(i, d) for d, i in scored[:k]], truncated

    def query_closest_approach(self, id_a: str, id_b: str
                               ) -> tuple[float, float, float]:
        """Time-synchronized minimum distance between two summary tracks.

        Both centroid trajectories are linearly interpolated and compared
        at the union of their t_rep sets restricted to the overlapping
        span (plus the span endpoints); returns (t_a, t_b, distance) at
        the argmin, the earliest such time on ties.
        """
        a = self.summary_trajectory(id_a)
        b = self.summary_trajectory(id_b)
        lo = max(float(a.t[0]), float(b.t[0]))
        hi = min(float(a.t[-1]), float(b.t[-1]))
        if lo > hi:
            raise DisjointTimeError((float(a.t[0]), float(a.t[-1])),
                                    (float(b.t[0]), float(b.t[-1])))
        times = np.unique(np.concatenate((
            a.t[(a.t >= lo) & (a.t <= hi)],
            b.t[(b.t >= lo) & (b.t <= hi)],
            np.array([lo, hi]))))
        ax = np.interp(times, a.t, a.xy[:, 0])
        ay = np.interp(times, a.t, a.xy[:, 1])
        bx = np.interp(times, b.t, b.xy[:, 0])
        by = np.interp(times, b.t, b.xy[:, 1])
        d = np.hypot(ax - bx, ay - by)
        i = int(np.argmin(d))
        return float(times[i]), float(times[i]), float(d[i])

    def _pair_events(self, id_a: str, id_b: str, dist_tol: float,
                     time_tol: float) -> list[_Event]:
        sa = self.ds.segments.for_trajectory(id_a)
        sb = self.ds.segments.for_trajectory(id_b)
        ta = np.array([s.t_rep for s in sa])
        tb = np.array([s.t_rep for s in sb])
        ca = np.array([s.centroid for s in sa])
        cb = np.array([s.centroid for s in sb])
        ra = np.array([s.radius for s in sa])
        rb = np.array([s.radius for s in sb])
        close_t = np.abs(ta[:, None] - tb[None, :]) <= time_tol
        dists = cdist(ca, cb)
        close_d = dists <= dist_tol + ra[:, None] + rb[None, :]
        ii, jj = np.nonzero(close_t & close_d)
        return [_Event(t_mid=(ta[i] + tb[j]) / 2.0,
                       t_lo=min(ta[i], tb[j]), t_hi=max(ta[i], tb[j]),
                       dist=float(dists[i, j]))
                for i, j in zip(ii, jj)]

    def query_meet(self, dist_tol: float, time_tol: float,
                   ids: Sequence[str] | None = None) -> list[Meeting]:
        """Per-pair periods where summaries coincide within tolerances.

        A summary pair qualifies when |t_rep difference| <= time_tol and
        centroid distance <= dist_tol + both radii; qualifying pairs whose
        spans come within time_tol of each other merge into one interval.
        Index-granularity semantics: meaningful for dist_tol >= min_r,
        use the hybrid query below for finer tolerances.
        """
        if dist_tol <= 0 or time_tol <= 0:
            raise ValueError("tolerances must be > 0")
        pool = sorted(ids) if ids is not None else self.ds.segments.ids()
        for traj_id in pool:
            if traj_id not in self.ds.segments:
                raise KeyError(f"unknown traj_id {traj_id!r}")
        out = []
        for i in range(len(pool)):
            for j in range(i + 1, len(pool)):
                events = self._pair_events(pool[i], pool[j], dist_tol, time_tol)
                for t0, t1, d in _merge_events(events, time_tol):
                    out.append(Meeting(pool[i], pool[j], t0, t1, d))
        out.sort(key=lambda m: (m.id_a, m.id_b, m.t_start))
        return out

    # -- hybrid ------------------------------------------------------------

    def query_hybrid_meet(self, target_id: str, exact_tol: float,
                          time_tol: float = DEFAULT_TIME_PAD
                          ) -> tuple[list[Meeting], int]:
        """Exact meetings with target_id, index-pruned then raw-verified.

        Stage 1 finds candidate intervals over the index with distance
        tolerance min_r + exact_tol (inflated by summary radii, so the
        candidate set is a superset). Stage 2 slices the raw store only
        over the candidate windows (padded by time_tol), interpolates both
        tracks at the union of their timestamps, and keeps the periods
        within exact_tol. Returns (meetings, raw points touched).
        """
        if exact_tol <= 0:
            raise ValueError("exact_tol must be > 0")
        if target_id not in self.ds.segments:
            raise KeyError(f"unknown traj_id {target_id!r}")
        stage1_tol = self.ds.params.min_r + exact_tol
        read_before = self.ds.raw.points_read
        out = []
        for other in self.ds.segments.ids():
            if other == target_id:
                continue
            events = self._pair_events(target_id, other, stage1_tol, time_tol)
            candidates = _merge_events(events, time_tol)
            verified: list[_Event] = []
            for t0, t1, _ in candidates:
                for meet in self._verify_window(target_id, other,
                                                t0 - time_tol, t1 + time_tol,
                                                exact_tol, time_tol):
                    verified.append(_Event(t_mid=(meet[0] + meet[1]) / 2.0,
                                           t_lo=meet[0], t_hi=meet[1],
                                           dist=meet[2]))
            # padded windows can overlap; merge the verified runs once more
            a, b = sorted((target_id, other))
            for t0, t1, d in _merge_events(verified, time_tol):
                out.append(Meeting(a, b, t0, t1, d))
        out.sort(key=lambda m: (m.id_a, m.id_b, m.t_start))
        return out, self.ds.raw.points_read - read_before

    def _verify_window(self, id_a: str, id_b: str, t0: float, t1: float,
                       exact_tol: float, merge_gap: float
                       ) -> list[tuple[float, float, float]]:
        ta, xya = self.ds.raw.slice_arrays(id_a, t0, t1)
        tb, xyb = self.ds.raw.slice_arrays(id_b, t0, t1)
        if ta.size == 0 or tb.size == 0:
            return []
        lo = max(ta[0], tb[0])
        hi = min(ta[-1], tb[-1])
        if lo > hi:
            return []
        times = np.unique(np.concatenate((
            ta[(ta >= lo) & (ta <= hi)], tb[(tb >= lo) & (tb <= hi)])))
        if times.size == 0:
            return []
        ax = np.interp(times, ta, xya[:, 0])
        ay = np.interp(times, ta, xya[:, 1])
        bx = np.interp(times, tb, xyb[:, 0])
        by = np.interp(times, tb, xyb[:, 1])
        d = np.hypot(ax - bx, ay - by)
        hit = d <= exact_tol
        if not hit.any():
            return []
        events = [_Event(t_mid=float(times[i]), t_lo=float(times[i]),
                         t_hi=float(times[i]), dist=float(d[i]))
                  for i in np.nonzero(hit)[0]]
        return _merge_events(events, merge_gap)


# -- canonical JSON encoding ---------------------------------------------


def _rect_from_json(obj: dict) -> Rect:
    try:
        return Rect(float(obj["xmin"]), float(obj["ymin"]),
                    float(obj["xmax"]), float(obj["ymax"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed rect {obj!r}") from exc


def run_query(engine: QueryEngine, spec: dict) -> dict:
    """Execute a QuerySpec JSON object and return its QueryResult object.

    Variants are tagged by "type": range, knn, closest_approach, meet,
    hybrid_meet. Raises ValueError on malformed specs and KeyError on
    unknown trajectory ids.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError("query spec must be an object with a 'type' tag")
    qtype = spec["type"]

    if qtype == "range":
        rect = _rect_from_json(spec.get("rect", {}))
        t0 = float(spec.get("t0", -math.inf))
        t1 = float(spec.get("t1", math.inf))
        ids = engine.query_range(rect, t0, t1)
        return {"type": "range", "provenance": "index_only",
                "ids": sorted(ids)}

    if qtype == "knn":
        k = spec.get("k")
        if not isinstance(k, int) or k < 1:
            raise ValueError("knn needs integer k >= 1")
        metric = spec.get("metric", "hausdorff")
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        if "query_id" in spec:
            query: str | SampledTrajectory = str(spec["query_id"])
        elif "query_points" in spec:
            pts = spec["query_points"]
            if not pts:
                raise ValueError("query_points must be non-empty")
            arr = np.asarray(pts, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise ValueError("query_points must be [[t, x, y], ...]")
            query = SampledTrajectory("<query>", arr[:, 0], arr[:, 1:])
        else:
            raise ValueError("knn needs query_id or query_points")
        neighbors, truncated = engine.query_knn(query, k, metric)
        return {"type": "knn", "provenance": "index_only", "metric": metric,
                "neighbors": [{"id": i, "distance": d} for i, d in neighbors],
                "k_truncated": truncated}

    if qtype == "closest_approach":
        if "id_a" not in spec or "id_b" not in spec:
            raise ValueError("closest_approach needs id_a and id_b")
        t_a, t_b, d = engine.query_closest_approach(str(spec["id_a"]),
                                                    str(spec["id_b"]))
        return {"type": "closest_approach", "provenance": "index_only",
                "t_a": t_a, "t_b": t_b, "distance": d}

    if qtype == "meet":
        if "dist_tol" not in spec or "time_tol" not in spec:
            raise ValueError("meet needs dist_tol and time_tol")
        ids = spec.get("ids")
        meetings = engine.query_meet(float(spec["dist_tol"]),
                                     float(spec["time_tol"]),
                                     ids=ids)
        return {"type": "meet", "provenance": "index_only",
                "meetings": [m.as_dict() for m in meetings]}

    if qtype == "hybrid_meet":
        if "target_id" not in spec or "exact_tol" not in spec:
            raise ValueError("hybrid_meet needs target_id and exact_tol")
        time_tol = float(spec.get("time_tol", DEFAULT_TIME_PAD))
        meetings, touched = engine.query_hybrid_meet(
            str(spec["target_id"]), float(spec["exact_tol"]), time_tol)
        return {"type": "hybrid_meet", "provenance": "hybrid_refined",
                "meetings": [m.as_dict() for m in meetings],
                "raw_points_touched": touched}

    raise ValueError(f"unknown query type {qtype!r}")
