"""HTTP facade over the stores and query engine (the real-time component).

The explorer UI and any script talk to this API; every endpoint is a thin
wrapper over the corresponding module call. Summary endpoints never touch
the raw store; /raw is size-capped so the small index keeps serving
interaction even over huge datasets.

Run with: python -m trajseg.service --config service.json
Env overrides: TRAJ_LISTEN (host:port), TRAJ_DATA_DIR.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .model import Rect, SampledTrajectory, SegmenterParams
from .queries import QueryEngine, run_query
from .store import Dataset
from .synth import heatmap_grid

DEFAULT_RAW_CAP = 100_000


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8008"
    data_dir: str = "data"
    params: SegmenterParams | None = None  # required only when creating
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    raw_cap: int = DEFAULT_RAW_CAP

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])


def load_config(path: str | None = None, env=os.environ) -> ServiceConfig:
    """Config file (JSON) plus TRAJ_LISTEN / TRAJ_DATA_DIR overrides."""
    cfg = ServiceConfig()
    if path is not None:
        raw = json.loads(Path(path).read_text())
        cfg.listen = raw.get("listen", cfg.listen)
        cfg.data_dir = raw.get("data_dir", cfg.data_dir)
        cfg.cors_origins = raw.get("cors_origins", cfg.cors_origins)
        cfg.raw_cap = int(raw.get("raw_cap", cfg.raw_cap))
        if "params" in raw:
            cfg.params = SegmenterParams(**raw["params"])
    if env.get("TRAJ_LISTEN"):
        cfg.listen = env["TRAJ_LISTEN"]
    if env.get("TRAJ_DATA_DIR"):
        cfg.data_dir = env["TRAJ_DATA_DIR"]
    return cfg


def _segments_geojson(engine: QueryEngine, traj_id: str) -> dict:
    summaries = engine.ds.segments.for_trajectory(traj_id)
    coords = [[s.centroid[0], s.centroid[1]] for s in summaries]
    if len(coords) == 1:
        geometry = {"type": "Point", "coordinates": coords[0]}
    else:
        geometry = {"type": "LineString", "coordinates": coords}
    return {
        "type": "Feature",
        "geometry": geometry,
        "properties": {
            "traj_id": traj_id,
            "t_rep": [s.t_rep for s in summaries],
            "radius": [s.radius for s in summaries],
            "kind": [s.kind for s in summaries],
            "n_points": [s.n_points for s in summaries],
        },
    }


def create_app(dataset: Dataset, raw_cap: int = DEFAULT_RAW_CAP,
               cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="trajseg", version="0.1.0")
    if cors_origins:
        app.add_middleware(CORSMiddleware, allow_origins=cors_origins,
                           allow_methods=["*"], allow_headers=["*"])
    engine = QueryEngine(dataset)
    app.state.dataset = dataset

    @app.exception_handler(KeyError)
    async def _unknown(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def _malformed(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/meta")
    def meta() -> dict:
        return {
            "params": {
                "min_r": dataset.params.min_r,
                "min_density": dataset.params.min_density,
                "t_rep_mode": dataset.params.t_rep_mode,
            },
            "projection": dataset.projection.as_dict(),
            "trajectories": len(dataset.segments.ids()),
            "summaries": len(dataset.segments),
            "raw_points": dataset.raw.total_points(),
            "raw_points_read": dataset.raw.points_read,
            "raw_cap": raw_cap,
        }

    @app.get("/trajectories")
    def trajectories() -> dict:
        out = []
        for traj_id in dataset.segments.ids():
            summaries = dataset.segments.for_trajectory(traj_id)
            xmin = min(s.centroid[0] - s.radius for s in summaries)
            xmax = max(s.centroid[0] + s.radius for s in summaries)
            ymin = min(s.centroid[1] - s.radius for s in summaries)
            ymax = max(s.centroid[1] + s.radius for s in summaries)
            out.append({
                "id": traj_id,
                "bbox": [xmin, ymin, xmax, ymax],
                "t_start": summaries[0].t_start,
                "t_end": summaries[-1].t_end,
                "n_summaries": len(summaries),
            })
        return {"trajectories": out}

    @app.get("/trajectories/{traj_id}/segments")
    def segments(traj_id: str) -> dict:
        return _segments_geojson(engine, traj_id)

    @app.get("/trajectories/{traj_id}/raw")
    def raw(traj_id: str,
            t0: float | None = Query(default=None),
            t1: float | None = Query(default=None)):
        span = dataset.raw.span(traj_id)
        lo = span[0] if t0 is None else t0
        hi = span[1] if t1 is None else t1
        t, xy = dataset.raw.slice_arrays(traj_id, lo, hi)
        if t.size > raw_cap:
            return JSONResponse(
                status_code=413,
                content={"error": f"slice of {t.size} points exceeds cap "
                                  f"{raw_cap}; narrow the time window",
                         "count": int(t.size), "cap": raw_cap})
        coords = xy.tolist()
        if len(coords) == 1:
            geometry = {"type": "Point", "coordinates": coords[0]}
        else:
            geometry = {"type": "LineString", "coordinates": coords}
        return {"type": "Feature", "geometry": geometry,
                "properties": {"traj_id": traj_id, "t": t.tolist(),
                               "count": int(t.size)}}

    @app.get("/heatmap")
    def heatmap(cell: float, bbox: str | None = None) -> dict:
        if cell <= 0:
            raise ValueError("cell must be > 0")
        bounds = None
        if bbox is not None:
            parts = [float(v) for v in bbox.split(",")]
            if len(parts) != 4:
                raise ValueError("bbox must be xmin,ymin,xmax,ymax")
            bounds = Rect(*parts)
        trajs = []
        for traj_id in dataset.raw.ids():
            span = dataset.raw.span(traj_id)
            t, xy = dataset.raw.slice_arrays(traj_id, span[0], span[1])
            if t.size:
                trajs.append(SampledTrajectory(traj_id, t, xy))
        if not trajs:
            raise ValueError("no raw data to pool")
        counts, grid_bounds = heatmap_grid(trajs, cell, bounds)
        return {"cell": cell, "bbox": grid_bounds.as_list(),
                "nx": counts.shape[1], "ny": counts.shape[0],
                "counts": counts.tolist()}

    @app.post("/query")
    def query(spec: dict) -> dict:
        return run_query(engine, spec)

    @app.post("/ingest")
    async def ingest(request: Request, flush: bool = True) -> dict:
        body = (await request.body()).decode("utf-8")
        report = dataset.ingest_csv(io.StringIO(body), flush=flush)
        return report.as_dict()

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m trajseg.service",
        description="Serve a trajseg data directory over HTTP.")
    parser.add_argument("--config", help="JSON config file")
    args = parser.parse_args(argv)
    cfg = load_config(args.config)
    dataset = Dataset(cfg.data_dir, params=cfg.params)
    app = create_app(dataset, raw_cap=cfg.raw_cap,
                     cors_origins=cfg.cors_origins)
    import uvicorn
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
