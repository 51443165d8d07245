"""Dual-path persistence: a raw point log and the compact segment index.

Incoming points land in both an append-only binary store (the stand-in for
the big raw warehouse; fast (traj_id, time-range) slicing) and the streaming
segmenter, whose closed summaries form the small spatial-temporal index that
queries hit first. The index is orders of magnitude smaller than the raw
bytes, which is what makes the hybrid query path pay off.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .model import (
    Rect,
    SamplePoint,
    SegmentSummary,
    TimestampRegressionError,
    summary_from_json,
    summary_to_json,
)
from .segmenter import SegmenterParams, StreamEngine

_RECORD = struct.Struct("<ddd")  # t, x, y
RECORD_BYTES = _RECORD.size
BLOCK_POINTS = 1024  # sparse time index granularity

EARTH_RADIUS_M = 6371000.0


@dataclass(frozen=True)
class Projection:
    """Ingestion-time coordinate mapping; the core only sees planar units.

    kind "none" passes x,y through; "local_equirectangular" reads rows as
    lon,lat degrees and maps them to meters around the configured origin:
    x = R * cos(lat0) * (lon - lon0), y = R * (lat - lat0), angles in
    radians. Accurate at city scale, documented rather than geodesic.
    """

    kind: str = "none"
    origin: tuple[float, float] | None = None  # lon0, lat0 degrees

    def __post_init__(self):
        if self.kind not in ("none", "local_equirectangular"):
            raise ValueError(f"unknown projection {self.kind!r}")
        if self.kind == "local_equirectangular" and self.origin is None:
            raise ValueError("local_equirectangular needs an origin")

    def apply(self, x: float, y: float) -> tuple[float, float]:
        if self.kind == "none":
            return x, y
        lon0, lat0 = self.origin  # type: ignore[misc]
        px = EARTH_RADIUS_M * math.cos(math.radians(lat0)) * math.radians(x - lon0)
        py = EARTH_RADIUS_M * math.radians(y - lat0)
        return px, py

    def as_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.origin is not None:
            d["origin"] = [self.origin[0], self.origin[1]]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Projection":
        origin = tuple(d["origin"]) if d.get("origin") else None
        return cls(kind=d.get("kind", "none"), origin=origin)


class _RawMeta:
    __slots__ = ("file", "count", "t_last", "sparse")

    def __init__(self, file: str, count: int = 0, t_last: float = -math.inf):
        self.file = file
        self.count = count
        self.t_last = t_last
        self.sparse: list[float] = []  # t at records 0, B, 2B, ...


class RawStore:
    """Append-only fixed-width point log per trajectory.

    Each trajectory gets one file of 24-byte (t, x, y) records in time
    order, plus an in-memory sparse index holding the timestamp of every
    BLOCK_POINTS-th record; a time slice binary-searches the sparse index
    and scans at most one block before the answer. points_read counts
    records returned by slices, so tests can assert which query paths
    touched raw data.
    """

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._metas: dict[str, _RawMeta] = {}
        self._handles: dict[str, IO[bytes]] = {}
        self.points_read = 0
        manifest = self.root / "manifest.json"
        if manifest.exists():
            data = json.loads(manifest.read_text())
            for traj_id, entry in data["trajectories"].items():
                meta = _RawMeta(entry["file"], entry["count"], entry["t_last"])
                self._rebuild_sparse(meta)
                self._metas[traj_id] = meta

    def _rebuild_sparse(self, meta: _RawMeta) -> None:
        meta.sparse = []
        path = self.root / meta.file
        if meta.count == 0 or not path.exists():
            return
        with path.open("rb") as f:
            for block in range(0, meta.count, BLOCK_POINTS):
                f.seek(block * RECORD_BYTES)
                t, _, _ = _RECORD.unpack(f.read(RECORD_BYTES))
                meta.sparse.append(t)

    def ids(self) -> list[str]:
        return sorted(self._metas)

    def __contains__(self, traj_id: str) -> bool:
        return traj_id in self._metas

    def count(self, traj_id: str) -> int:
        return self._meta(traj_id).count

    def total_points(self) -> int:
        return sum(m.count for m in self._metas.values())

    def total_bytes(self) -> int:
        self.flush()
        return sum((self.root / m.file).stat().st_size
                   for m in self._metas.values())

    def span(self, traj_id: str) -> tuple[float, float]:
        meta = self._meta(traj_id)
        if meta.count == 0:
            raise KeyError(f"no points for {traj_id!r}")
        return meta.sparse[0], meta.t_last

    def _meta(self, traj_id: str) -> _RawMeta:
        meta = self._metas.get(traj_id)
        if meta is None:
            raise KeyError(f"unknown traj_id {traj_id!r}")
        return meta

    def append(self, traj_id: str, t: float, x: float, y: float) -> None:
        meta = self._metas.get(traj_id)
        if meta is None:
            meta = _RawMeta(f"{len(self._metas):06d}.bin")
            self._metas[traj_id] = meta
        elif t < meta.t_last:
            raise TimestampRegressionError(
                f"{traj_id!r}: t={t} after t={meta.t_last}")
        handle = self._handles.get(traj_id)
        if handle is None:
            handle = (self.root / meta.file).open("ab")
            self._handles[traj_id] = handle
        if meta.count % BLOCK_POINTS == 0:
            meta.sparse.append(t)
        handle.write(_RECORD.pack(t, x, y))
        meta.count += 1
        meta.t_last = t

    def slice_arrays(self, traj_id: str, t0: float, t1: float
                     ) -> tuple[np.ndarray, np.ndarray]:
        """(t, xy) arrays of the points with t in [t0, t1], time order."""
        meta = self._meta(traj_id)
        self._flush_handle(traj_id)
        if meta.count == 0 or t0 > t1:
            return np.empty(0), np.empty((0, 2))
        # last block whose first timestamp is <= t0
        block = 0
        lo, hi = 0, len(meta.sparse) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if meta.sparse[mid] <= t0:
                block = mid
                lo = mid + 1
            else:
                hi = mid - 1
        start = block * BLOCK_POINTS
        ts: list[float] = []
        xs: list[float] = []
        ys: list[float] = []
        with (self.root / meta.file).open("rb") as f:
            f.seek(start * RECORD_BYTES)
            remaining = meta.count - start
            while remaining > 0:
                chunk = f.read(min(remaining, BLOCK_POINTS) * RECORD_BYTES)
                arr = np.frombuffer(chunk, dtype=np.float64).reshape(-1, 3)
                remaining -= arr.shape[0]
                if arr[-1, 0] < t0:
                    continue
                keep = (arr[:, 0] >= t0) & (arr[:, 0] <= t1)
                if keep.any():
                    ts.extend(arr[keep, 0])
                    xs.extend(arr[keep, 1])
                    ys.extend(arr[keep, 2])
                if arr[-1, 0] > t1:
                    break
        self.points_read += len(ts)
        return np.asarray(ts), np.column_stack((xs, ys)) if ts else np.empty((0, 2))

    def raw_slice(self, traj_id: str, t0: float, t1: float) -> list[SamplePoint]:
        t, xy = self.slice_arrays(traj_id, t0, t1)
        return [SamplePoint(traj_id, float(t[i]), float(xy[i, 0]), float(xy[i, 1]))
                for i in range(t.size)]

    def _flush_handle(self, traj_id: str) -> None:
        handle = self._handles.get(traj_id)
        if handle is not None:
            handle.flush()

    def flush(self) -> None:
        for handle in self._handles.values():
            handle.flush()
        manifest = {
            "trajectories": {
                tid: {"file": m.file, "count": m.count, "t_last": m.t_last}
                for tid, m in self._metas.items()
            }
        }
        (self.root / "manifest.json").write_text(json.dumps(manifest))

    def close(self) -> None:
        self.flush()
        for handle in self._handles.values():
            handle.close()
        self._handles.clear()


class SegmentStore:
    """All segment summaries plus a uniform-grid spatial index on centroids.

    Candidate lookup inflates the query rect by the largest stored radius,
    gathers occupied grid cells, then filters exactly by circle-rectangle
    intersection and time overlap, so it can return extras relative to the
    raw data but never misses a summary whose circle meets the rect.
    """

    def __init__(self, path: Path, cell: float):
        if cell <= 0:
            raise ValueError("grid cell must be > 0")
        self.path = Path(path)
        self.cell = cell
        self._all: list[SegmentSummary] = []
        self._by_traj: dict[str, list[SegmentSummary]] = {}
        self._grid: dict[tuple[int, int], list[int]] = {}
        self.max_radius = 0.0
        self._handle: IO[str] | None = None
        if self.path.exists():
            with self.path.open() as f:
                for line in f:
                    line = line.strip()
                    if line:
                        self._insert(summary_from_json(line))

    def _key(self, x: float, y: float) -> tuple[int, int]:
        return (int(math.floor(x / self.cell)), int(math.floor(y / self.cell)))

    def _insert(self, s: SegmentSummary) -> None:
        idx = len(self._all)
        self._all.append(s)
        self._by_traj.setdefault(s.traj_id, []).append(s)
        self._grid.setdefault(self._key(*s.centroid), []).append(idx)
        if s.radius > self.max_radius:
            self.max_radius = s.radius

    def add(self, s: SegmentSummary, persist: bool = True) -> None:
        self._insert(s)
        if persist:
            if self._handle is None:
                self._handle = self.path.open("a")
            self._handle.write(summary_to_json(s) + "\n")

    def __len__(self) -> int:
        return len(self._all)

    def ids(self) -> list[str]:
        return sorted(self._by_traj)

    def __contains__(self, traj_id: str) -> bool:
        return traj_id in self._by_traj

    def for_trajectory(self, traj_id: str) -> list[SegmentSummary]:
        """Summaries of one trajectory in time order."""
        summaries = self._by_traj.get(traj_id)
        if summaries is None:
            raise KeyError(f"unknown traj_id {traj_id!r}")
        return list(summaries)

    def all_summaries(self) -> list[SegmentSummary]:
        return list(self._all)

    def index_rect_candidates(self, rect: Rect, t0: float = -math.inf,
                              t1: float = math.inf) -> list[SegmentSummary]:
        """Every summary whose circle meets rect and whose time span
        overlaps [t0, t1]; superset-safe by construction."""
        if t0 > t1:
            return []
        search = rect.inflate(self.max_radius)
        gx0, gy0 = self._key(search.xmin, search.ymin)
        gx1, gy1 = self._key(search.xmax, search.ymax)
        span_cells = (gx1 - gx0 + 1) * (gy1 - gy0 + 1)
        hits: list[int] = []
        if span_cells > len(self._grid):
            for (gx, gy), idxs in self._grid.items():
                if gx0 <= gx <= gx1 and gy0 <= gy <= gy1:
                    hits.extend(idxs)
        else:
            for gx in range(gx0, gx1 + 1):
                for gy in range(gy0, gy1 + 1):
                    hits.extend(self._grid.get((gx, gy), ()))
        out = []
        for idx in hits:
            s = self._all[idx]
            if s.t_start > t1 or s.t_end < t0:
                continue
            if rect.intersects_circle(s.centroid[0], s.centroid[1], s.radius):
                out.append(s)
        out.sort(key=lambda s: (s.traj_id, s.start_idx))
        return out

    def serialized_bytes(self) -> int:
        self.flush()
        return self.path.stat().st_size if self.path.exists() else 0

    def flush(self) -> None:
        if self._handle is not None:
            self._handle.flush()

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None


@dataclass
class IngestReport:
    """Counts from one CSV ingestion run."""

    rows: int = 0
    ingested: int = 0
    rejected: int = 0
    trajectories: set[str] = field(default_factory=set)
    summaries_closed: int = 0

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "ingested": self.ingested,
            "rejected": self.rejected,
            "trajectories": sorted(self.trajectories),
            "summaries_closed": self.summaries_closed,
        }


class Dataset:
    """One data directory: raw store + segment store + live stream engine.

    Layout: meta.json (params, projection), raw/ (binary logs + manifest),
    segments.jsonl (summary per line, closure order). Open an existing
    directory with Dataset(dir); create one by also passing params.
    """

    def __init__(self, data_dir, params: SegmenterParams | None = None,
                 projection: Projection | None = None):
        self.dir = Path(data_dir)
        meta_path = self.dir / "meta.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text())
            self.params = SegmenterParams(**meta["params"])
            self.projection = Projection.from_dict(meta["projection"])
        else:
            if params is None:
                raise ValueError(f"{self.dir} has no meta.json; params required "
                                 "to create a new dataset")
            self.dir.mkdir(parents=True, exist_ok=True)
            self.params = params
            self.projection = projection or Projection()
            meta = {
                "params": {
                    "min_r": self.params.min_r,
                    "min_density": self.params.min_density,
                    "t_rep_mode": self.params.t_rep_mode,
                },
                "projection": self.projection.as_dict(),
            }
            meta_path.write_text(json.dumps(meta, indent=2))
        self.raw = RawStore(self.dir / "raw")
        self.segments = SegmentStore(self.dir / "segments.jsonl",
                                     cell=2.0 * self.params.min_r)
        self.engine = StreamEngine(self.params)

    def ingest_point(self, p: SamplePoint) -> list[SegmentSummary]:
        """Route one point to the engine and the raw log; returns closures."""
        closed = self.engine.ingest(p)  # validates time order first
        self.raw.append(p.traj_id, p.t, p.x, p.y)
        for s in closed:
            self.segments.add(s)
        return closed

    def flush(self, traj_id: str | None = None) -> list[SegmentSummary]:
        closed = self.engine.flush(traj_id)
        for s in closed:
            self.segments.add(s)
        self.raw.flush()
        self.segments.flush()
        return closed

    def close(self) -> None:
        self.raw.close()
        self.segments.close()

    def ingest_csv(self, source, strict: bool = False,
                   flush: bool = True) -> IngestReport:
        """Stream `traj_id,t,x,y` rows into the dataset.

        An optional header row is skipped. In lenient mode (default),
        malformed rows and timestamp regressions are counted and skipped;
        strict mode aborts on the first bad row. flush=True closes open
        segments at end of input (treat the file as a complete dataset);
        pass flush=False when more appends will follow.
        """
        report = IngestReport()
        close_after = False
        if isinstance(source, (str, Path)):
            stream: IO[str] = open(source, newline="")
            close_after = True
        else:
            stream = source  # file-like or iterable of lines
        try:
            reader = csv.reader(stream)
            first = True
            for row in reader:
                if not row:
                    continue
                if first:
                    first = False
                    if self._looks_like_header(row):
                        continue
                report.rows += 1
                try:
                    if len(row) != 4:
                        raise ValueError(f"expected 4 fields, got {len(row)}")
                    traj_id = row[0].strip()
                    if not traj_id:
                        raise ValueError("empty traj_id")
                    t = float(row[1])
                    x, y = self.projection.apply(float(row[2]), float(row[3]))
                    closed = self.ingest_point(SamplePoint(traj_id, t, x, y))
                except (ValueError, TimestampRegressionError) as exc:
                    if strict:
                        raise ValueError(
                            f"row {report.rows}: {exc}") from exc
                    report.rejected += 1
                    continue
                report.ingested += 1
                report.trajectories.add(traj_id)
                report.summaries_closed += len(closed)
        finally:
            if close_after:
                stream.close()
        if flush:
            report.summaries_closed += len(self.flush())
        else:
            self.raw.flush()
            self.segments.flush()
        return report

    @staticmethod
    def _looks_like_header(row: list[str]) -> bool:
        if len(row) != 4:
            return True
        try:
            float(row[1]), float(row[2]), float(row[3])
            return False
        except ValueError:
            return True


def write_points_csv(trajs: Sequence, path, header: bool = False) -> None:
    """Canonical point CSV: `traj_id,t,x,y`, '.' decimals, LF lines."""
    with open(path, "w", newline="\n") as f:
        if header:
            f.write("traj_id,t,x,y\n")
        for tr in trajs:
            tid = tr.traj_id
            t = tr.t.tolist()
            xs = tr.xy[:, 0].tolist()
            ys = tr.xy[:, 1].tolist()
            for i in range(len(t)):
                f.write(f"{tid},{t[i]!r},{xs[i]!r},{ys[i]!r}\n")


def iter_csv_points(source) -> Iterator[SamplePoint]:
    """Yield SamplePoints from a canonical CSV path or open text stream."""
    close_after = isinstance(source, (str, Path))
    stream = open(source, newline="") if close_after else source
    try:
        reader = csv.reader(stream)
        first = True
        for row in reader:
            if not row:
                continue
            if first:
                first = False
                if Dataset._looks_like_header(row):
                    continue
            if len(row) != 4:
                raise ValueError(f"expected 4 fields, got {len(row)}")
            yield SamplePoint(row[0].strip(), float(row[1]),
                              float(row[2]), float(row[3]))
    finally:
        if close_after:
            stream.close()
