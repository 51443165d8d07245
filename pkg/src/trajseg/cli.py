"""Batch command line: generate, segment, ingest, query, plot, stats.

Subcommands mirror the HTTP service for scripted use and regenerate the
summary/heatmap figures as static SVG files. All commands are
deterministic given fixed seeds and inputs; validation problems exit 1
with a one-line diagnostic.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import OrderedDict
from pathlib import Path

from .model import (
    SampledTrajectory,
    SegmenterParams,
    summary_from_json,
    summary_to_json,
)
from .queries import QueryEngine, run_query
from .segmenter import StreamEngine, segment_trajectory
from .store import Dataset, Projection, iter_csv_points, write_points_csv
from .svgplot import plot_heatmap, plot_raw, plot_segmented
from .synth import BoutSpec, GenSpec, default_gen_spec, generate, heatmap_grid


def _load_gen_spec(path: str) -> GenSpec:
    raw = json.loads(Path(path).read_text())
    bouts = tuple(
        tuple(BoutSpec(**b) for b in seq) for seq in raw["bouts"])
    return GenSpec(seed=int(raw["seed"]),
                   n_trajectories=int(raw["n_trajectories"]),
                   bouts=bouts,
                   origin_spread=float(raw.get("origin_spread", 0.0)))


def _open_out(path: str):
    return sys.stdout if path == "-" else open(path, "w", newline="\n")


def _group_csv(path: str) -> "OrderedDict[str, list]":
    """Rows grouped per trajectory in first-seen order, keeping each
    point's global row number (used to reconstruct closure order)."""
    groups: OrderedDict[str, list] = OrderedDict()
    for row_no, p in enumerate(iter_csv_points(path)):
        groups.setdefault(p.traj_id, []).append((row_no, p))
    return groups


def cmd_gen(args) -> int:
    if args.spec:
        spec = _load_gen_spec(args.spec)
    else:
        spec = default_gen_spec(seed=args.seed, n_trajectories=args.n)
    trajs = generate(spec)
    write_points_csv(trajs, args.out)
    print(f"wrote {sum(len(t) for t in trajs)} points, "
          f"{len(trajs)} trajectories -> {args.out}", file=sys.stderr)
    return 0


def cmd_segment(args) -> int:
    params = SegmenterParams(args.min_r, args.min_density, args.t_rep_mode)
    groups = _group_csv(getattr(args, "in"))
    if not groups:
        raise ValueError("no input points")
    cut_emitted = []  # (global row of the cut-triggering point, summary)
    tails = []
    for traj_id, rows in groups.items():
        traj = SampledTrajectory.from_points([p for _, p in rows])
        _, summaries = segment_trajectory(traj, params)
        for s in summaries[:-1]:
            cut_emitted.append((rows[s.end_idx][0], s))
        tails.append(summaries[-1])
    cut_emitted.sort(key=lambda pair: pair[0])
    out = _open_out(args.out)
    try:
        for _, s in cut_emitted:
            out.write(summary_to_json(s) + "\n")
        for s in tails:
            out.write(summary_to_json(s) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{len(cut_emitted) + len(tails)} segments -> {args.out}",
          file=sys.stderr)
    return 0


def cmd_stream(args) -> int:
    params = SegmenterParams(args.min_r, args.min_density, args.t_rep_mode)
    engine = StreamEngine(params)
    out = _open_out(args.out)
    n = 0
    try:
        source = getattr(args, "in")
        points = iter_csv_points(sys.stdin if source == "-" else source)
        for p in points:
            for s in engine.ingest(p):
                out.write(summary_to_json(s) + "\n")
                n += 1
        for s in engine.flush():
            out.write(summary_to_json(s) + "\n")
            n += 1
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{n} segments -> {args.out}", file=sys.stderr)
    return 0


def cmd_ingest(args) -> int:
    projection = Projection()
    if args.projection == "local_equirectangular":
        if not args.origin:
            raise ValueError("local_equirectangular needs --origin lon,lat")
        lon, lat = (float(v) for v in args.origin.split(","))
        projection = Projection("local_equirectangular", (lon, lat))
    params = None
    if args.min_r is not None or args.min_density is not None:
        if args.min_r is None or args.min_density is None:
            raise ValueError("give both --min-r and --min-density (or neither)")
        params = SegmenterParams(args.min_r, args.min_density, args.t_rep_mode)
    ds = Dataset(args.store, params=params, projection=projection)
    try:
        report = ds.ingest_csv(getattr(args, "in"), strict=args.strict,
                               flush=not args.no_flush)
    finally:
        ds.close()
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_query(args) -> int:
    ds = Dataset(args.store)
    try:
        spec = json.loads(sys.stdin.read() if args.spec == "-"
                          else Path(args.spec).read_text())
        result = run_query(QueryEngine(ds), spec)
    finally:
        ds.close()
    print(json.dumps(result, indent=2))
    return 0


def cmd_stats(args) -> int:
    ds = Dataset(args.store)
    try:
        summaries = ds.segments.all_summaries()
        raw_points = ds.raw.total_points()
        raw_bytes = ds.raw.total_bytes()
        seg_bytes = ds.segments.serialized_bytes()
        per_kind: dict[str, int] = {}
        for s in summaries:
            per_kind[s.kind] = per_kind.get(s.kind, 0) + 1
        stats = {
            "trajectories": len(ds.segments.ids()),
            "raw_points": raw_points,
            "summaries": len(summaries),
            "per_kind": per_kind,
            "point_ratio": (len(summaries) / raw_points) if raw_points else None,
            "raw_bytes": raw_bytes,
            "segment_bytes": seg_bytes,
            "byte_ratio": (seg_bytes / raw_bytes) if raw_bytes else None,
        }
    finally:
        ds.close()
    print(json.dumps(stats, indent=2))
    return 0


def cmd_plot(args) -> int:
    src = getattr(args, "in")
    if args.mode == "segmented":
        per_traj: OrderedDict[str, list] = OrderedDict()
        with open(src) as f:
            for line in f:
                line = line.strip()
                if line:
                    s = summary_from_json(line)
                    per_traj.setdefault(s.traj_id, []).append(s)
        if not per_traj:
            raise ValueError("no summaries in input")
        for summaries in per_traj.values():
            summaries.sort(key=lambda s: s.start_idx)
        svg = plot_segmented(per_traj)
    else:
        groups = _group_csv(src)
        if not groups:
            raise ValueError("no input points")
        trajs = [SampledTrajectory.from_points([p for _, p in rows])
                 for rows in groups.values()]
        if args.mode == "raw":
            svg = plot_raw(trajs)
        else:
            counts, bounds = heatmap_grid(trajs, cell=args.cell)
            svg = plot_heatmap(counts, bounds)
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trajseg",
        description="Online trajectory segmentation, stores, and queries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic point CSV")
    p.add_argument("--spec", help="GenSpec JSON file (default: built-in demo)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n", type=int, default=20, help="trajectories (default spec)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    for name, fn in (("segment", cmd_segment), ("stream", cmd_stream)):
        p = sub.add_parser(name, help=f"{name} a point CSV into segments.jsonl")
        p.add_argument("--in", required=True, help="points CSV ('-' = stdin)")
        p.add_argument("--min-r", type=float, required=True, dest="min_r")
        p.add_argument("--min-density", type=float, required=True,
                       dest="min_density")
        p.add_argument("--t-rep-mode", default="mean_time",
                       choices=["mean_time", "start_time"], dest="t_rep_mode")
        p.add_argument("--out", default="-")
        p.set_defaults(func=fn)

    p = sub.add_parser("ingest", help="build/extend a store from a point CSV")
    p.add_argument("--store", required=True)
    p.add_argument("--in", required=True)
    p.add_argument("--min-r", type=float, dest="min_r")
    p.add_argument("--min-density", type=float, dest="min_density")
    p.add_argument("--t-rep-mode", default="mean_time",
                   choices=["mean_time", "start_time"], dest="t_rep_mode")
    p.add_argument("--projection", default="none",
                   choices=["none", "local_equirectangular"])
    p.add_argument("--origin", help="lon,lat for local_equirectangular")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--no-flush", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="run a QuerySpec JSON against a store")
    p.add_argument("--store", required=True)
    p.add_argument("--spec", required=True, help="query JSON file ('-' = stdin)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", help="compression ratio and segment counts")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="render raw/segmented/heatmap SVG")
    p.add_argument("--mode", required=True,
                   choices=["raw", "segmented", "heatmap"])
    p.add_argument("--in", required=True,
                   help="points CSV (raw/heatmap) or segments.jsonl (segmented)")
    p.add_argument("--out", required=True)
    p.add_argument("--cell", type=float, default=8.0, help="heatmap cell size")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
