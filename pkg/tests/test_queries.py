import io
import math

import numpy as np
import pytest

from oracles import brute_dtw, brute_hausdorff, brute_meetings, interp_track
from trajseg import DisjointTimeError, Rect, SampledTrajectory, SegmenterParams
from trajseg.queries import (
    QueryEngine,
    dtw_distance,
    hausdorff_distance,
    run_query,
    traj_distance,
)
from trajseg.store import Dataset

PARAMS = SegmenterParams(min_r=25.0, min_density=0.26)


def traj_of(points, traj_id="q"):
    arr = np.asarray(points, dtype=float)
    return SampledTrajectory(traj_id, np.arange(len(arr), dtype=float), arr)


def store_of(tmp_path, trajs, params=PARAMS):
    ds = Dataset(tmp_path / "ds", params=params)
    for tr in trajs:
        for p in tr:
            ds.ingest_point(p)
    ds.flush()
    return ds


class TestMetrics:
    def test_identical_zero(self):
        a = traj_of([(0, 0), (1, 1), (2, 0)])
        b = traj_of([(0, 0), (1, 1), (2, 0)], "b")
        assert hausdorff_distance(a, b) == 0.0
        assert dtw_distance(a, b) == 0.0
        assert traj_distance(a, a) == 0.0

    def test_perpendicular_translation(self):
        a = traj_of([(float(i), 0.0) for i in range(12)])
        b = traj_of([(float(i), 10.0) for i in range(12)], "b")
        assert hausdorff_distance(a, b) == pytest.approx(10.0, rel=1e-12)

    def test_random_pairs_match_quadratic_oracles(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            a = traj_of(rng.normal(0, 5, size=(10, 2)))
            b = traj_of(rng.normal(1, 5, size=(10, 2)), "b")
            pa = [tuple(p) for p in a.xy]
            pb = [tuple(p) for p in b.xy]
            assert hausdorff_distance(a, b) == pytest.approx(
                brute_hausdorff(pa, pb), rel=1e-12)
            assert dtw_distance(a, b) == pytest.approx(
                brute_dtw(pa, pb), rel=1e-12)

    def test_hausdorff_symmetric_dtw_nonnegative(self):
        rng = np.random.default_rng(6)
        a = traj_of(rng.normal(0, 3, size=(8, 2)))
        b = traj_of(rng.normal(0, 3, size=(13, 2)), "b")
        assert hausdorff_distance(a, b) == hausdorff_distance(b, a)
        assert dtw_distance(a, b) >= 0.0

    def test_unknown_metric(self):
        a = traj_of([(0, 0)])
        with pytest.raises(ValueError):
            traj_distance(a, a, "frechet")


class TestRange:
    def test_hit_and_miss(self, demo_store, demo_trajs):
        engine = QueryEngine(demo_store)
        tr = demo_trajs[0]
        x, y = float(tr.xy[0, 0]), float(tr.xy[0, 1])
        hits = engine.query_range(Rect(x - 30, y - 30, x + 30, y + 30))
        assert tr.traj_id in hits
        assert engine.query_range(Rect(1e7, 1e7, 1e7 + 1, 1e7 + 1)) == set()

    def test_sandwich_against_raw_oracles(self, demo_store, demo_trajs):
        engine = QueryEngine(demo_store)
        rng = np.random.default_rng(17)
        all_xy = {tr.traj_id: tr.xy for tr in demo_trajs}
        # exact lower oracle and per-segment-radius inflated upper oracle
        per_seg = {tid: demo_store.segments.for_trajectory(tid)
                   for tid in demo_store.segments.ids()}
        for _ in range(60):
            cx, cy = rng.uniform(-800, 800, 2)
            w, h = rng.uniform(20, 400, 2)
            rect = Rect(cx, cy, cx + w, cy + h)
            got = engine.query_range(rect)
            exact = {tid for tid, xy in all_xy.items()
                     if ((xy[:, 0] >= rect.xmin) & (xy[:, 0] <= rect.xmax)
                         & (xy[:, 1] >= rect.ymin) & (xy[:, 1] <= rect.ymax)).any()}
            inflated = set()
            for tid, summaries in per_seg.items():
                xy = all_xy[tid]
                for s in summaries:
                    box = rect.inflate(s.radius)
                    seg_xy = xy[s.start_idx:s.end_idx]
                    if ((seg_xy[:, 0] >= box.xmin) & (seg_xy[:, 0] <= box.xmax)
                            & (seg_xy[:, 1] >= box.ymin)
                            & (seg_xy[:, 1] <= box.ymax)).any():
                        inflated.add(tid)
                        break
            assert exact <= got <= inflated

    def test_time_window(self, demo_store, demo_trajs):
        engine = QueryEngine(demo_store)
        tr = demo_trajs[0]
        x, y = float(tr.xy[0, 0]), float(tr.xy[0, 1])
        rect = Rect(x - 30, y - 30, x + 30, y + 30)
        assert tr.traj_id in engine.query_range(rect, 0.0, 10.0)
        # a window before any data excludes everything
        assert engine.query_range(rect, -100.0, -50.0) == set()


class TestKnn:
    def test_self_query_by_points_ranks_itself_first(self, demo_store):
        engine = QueryEngine(demo_store)
        mine = engine.summary_trajectory("t00")
        ranked, truncated = engine.query_knn(mine, k=1)
        assert not truncated
        assert ranked[0] == ("t00", 0.0)

    def test_k_equals_population(self, demo_store):
        engine = QueryEngine(demo_store)
        ranked, truncated = engine.query_knn("t00", k=19)
        assert not truncated
        assert len(ranked) == 19
        dists = [d for _, d in ranked]
        assert dists == sorted(dists)
        assert "t00" not in {i for i, _ in ranked}

    def test_k_exceeding_population_flagged(self, demo_store):
        engine = QueryEngine(demo_store)
        ranked, truncated = engine.query_knn("t00", k=100)
        assert truncated
        assert len(ranked) == 19

    @pytest.mark.parametrize("metric", ["hausdorff", "dtw"])
    def test_ranking_matches_brute_force(self, demo_store, metric):
        engine = QueryEngine(demo_store)
        query = engine.summary_trajectory("t03")
        oracle = brute_hausdorff if metric == "hausdorff" else brute_dtw
        scored = []
        for tid in demo_store.segments.ids():
            if tid == "t03":
                continue
            other = engine.summary_trajectory(tid)
            d = oracle([tuple(p) for p in query.xy],
                       [tuple(p) for p in other.xy])
            scored.append((d, tid))
        scored.sort()
        ranked, _ = engine.query_knn("t03", k=5, metric=metric)
        assert [i for i, _ in ranked] == [i for _, i in scored[:5]]
        for (i, d), (od, oi) in zip(ranked, scored[:5]):
            assert d == pytest.approx(od, rel=1e-9)

    def test_invalid_k(self, demo_store):
        with pytest.raises(ValueError):
            QueryEngine(demo_store).query_knn("t00", k=0)


class TestClosestApproach:
    def test_identical_tracks(self, tmp_path):
        line = [(4.0 * i, 0.0) for i in range(200)]
        ds = store_of(tmp_path, [traj_of(line, "x"), traj_of(line, "y")])
        engine = QueryEngine(ds)
        t_a, t_b, d = engine.query_closest_approach("x", "y")
        assert d == 0.0
        assert t_a == t_b
        # the earliest shared sample wins ties
        first_rep = ds.segments.for_trajectory("x")[0].t_rep
        assert t_a == first_rep

    def test_parallel_lines(self, tmp_path):
        a = [(4.0 * i, 0.0) for i in range(200)]
        b = [(4.0 * i, 5.0) for i in range(200)]
        ds = store_of(tmp_path, [traj_of(a, "x"), traj_of(b, "y")])
        _, _, d = QueryEngine(ds).query_closest_approach("x", "y")
        assert d == pytest.approx(5.0, rel=1e-9)

    def test_crossing_pair_near_raw_answer(self, tmp_path):
        n = 400
        t = np.arange(n, dtype=float)
        a = np.column_stack((2.0 * t, np.zeros(n)))
        b = np.column_stack((2.0 * t, 400.0 - 2.0 * t))
        ds = store_of(tmp_path, [SampledTrajectory("x", t, a),
                                 SampledTrajectory("y", t, b)])
        _, _, d = QueryEngine(ds).query_closest_approach("x", "y")
        track_a = (t.tolist(), a[:, 0].tolist(), a[:, 1].tolist())
        track_b = (t.tolist(), b[:, 0].tolist(), b[:, 1].tolist())
        best = math.inf
        for tt in np.arange(0.0, float(n - 1), 0.25):
            pa = interp_track(*track_a, tt)
            pb = interp_track(*track_b, tt)
            best = min(best, math.hypot(pa[0] - pb[0], pa[1] - pb[1]))
        assert abs(d - best) <= PARAMS.min_r

    def test_disjoint_time_error_carries_spans(self, tmp_path):
        t1 = np.arange(100.0)
        t2 = np.arange(500.0, 600.0)
        a = SampledTrajectory("x", t1, np.column_stack((4 * t1, 0 * t1)))
        b = SampledTrajectory("y", t2, np.column_stack((4 * (t2 - 500), 0 * t2)))
        ds = store_of(tmp_path, [a, b])
        with pytest.raises(DisjointTimeError) as err:
            QueryEngine(ds).query_closest_approach("x", "y")
        assert err.value.span_a[1] < err.value.span_b[0]


class TestMeet:
    def test_duplicated_trajectory_meets_over_full_span(self, tmp_path):
        line = [(4.0 * i, 0.0) for i in range(300)]
        ds = store_of(tmp_path, [traj_of(line, "x"), traj_of(line, "y")])
        meetings = QueryEngine(ds).query_meet(dist_tol=25.0, time_tol=1000.0)
        assert len(meetings) == 1
        m = meetings[0]
        reps = [s.t_rep for s in ds.segments.for_trajectory("x")]
        assert m.t_start == min(reps)
        assert m.t_end == max(reps)
        assert m.min_distance == 0.0

    def test_disjoint_regions_no_meetings(self, tmp_path):
        a = [(4.0 * i, 0.0) for i in range(200)]
        b = [(4.0 * i, 5000.0) for i in range(200)]
        ds = store_of(tmp_path, [traj_of(a, "x"), traj_of(b, "y")])
        assert QueryEngine(ds).query_meet(25.0, 1000.0) == []

    def test_planted_comovement_detected(self, encounter_store):
        engine = QueryEngine(encounter_store)
        meetings = engine.query_meet(dist_tol=25.0, time_tol=60.0,
                                     ids=["m0", "m1"])
        assert meetings, "planted co-movement not detected"
        best = max(meetings, key=lambda m: min(m.t_end, 320) - max(m.t_start, 200))
        overlap = min(best.t_end, 320.0) - max(best.t_start, 200.0)
        assert overlap / (320.0 - 200.0) >= 0.8

    def test_unknown_id_rejected(self, demo_store):
        with pytest.raises(KeyError):
            QueryEngine(demo_store).query_meet(1.0, 1.0, ids=["nope"])


class TestHybridMeet:
    def test_planted_exact_meeting_verified(self, encounter_store):
        engine = QueryEngine(encounter_store)
        meetings, touched = engine.query_hybrid_meet("m0", exact_tol=2.0)
        pairs = {(m.id_a, m.id_b) for m in meetings}
        assert pairs == {("m0", "m1")}
        best = max(meetings, key=lambda m: m.t_end - m.t_start)
        overlap = min(best.t_end, 320.0) - max(best.t_start, 200.0)
        assert overlap / 120.0 >= 0.8
        assert best.min_distance <= 2.0
        assert touched > 0

    def test_near_miss_pruned_at_stage_two(self, encounter_store):
        engine = QueryEngine(encounter_store)
        # stage 1 sees the candidate (inflated index tolerance) ...
        stage1 = engine.query_meet(
            dist_tol=encounter_store.params.min_r + 5.0, time_tol=60.0,
            ids=["n0", "n1"])
        assert stage1
        # ... but raw verification rejects it: the pair never gets closer
        # than 10, twice the exact tolerance
        meetings, _ = engine.query_hybrid_meet("n0", exact_tol=5.0)
        assert meetings == []

    def test_matches_raw_brute_force_and_touches_few_points(
            self, encounter_store):
        engine = QueryEngine(encounter_store)
        exact_tol = 2.0
        time_tol = 60.0
        total = encounter_store.raw.total_points()

        tracks = {}
        for tid in encounter_store.raw.ids():
            span = encounter_store.raw.span(tid)
            t, xy = encounter_store.raw.slice_arrays(tid, span[0], span[1])
            tracks[tid] = (t.tolist(), xy[:, 0].tolist(), xy[:, 1].tolist())

        for target in ("m0", "n0", "bg00"):
            before = encounter_store.raw.points_read
            meetings, touched = engine.query_hybrid_meet(
                target, exact_tol=exact_tol, time_tol=time_tol)
            assert touched == encounter_store.raw.points_read - before
            assert touched / total < 0.20
            brute_pairs = set()
            for other in tracks:
                if other == target:
                    continue
                if brute_meetings(tracks[target], tracks[other],
                                  exact_tol, time_tol):
                    brute_pairs.add(tuple(sorted((target, other))))
            assert {(m.id_a, m.id_b) for m in meetings} == brute_pairs

    def test_index_only_queries_touch_no_raw(self, encounter_store):
        engine = QueryEngine(encounter_store)
        before = encounter_store.raw.points_read
        engine.query_range(Rect(0, 0, 1000, 1000))
        engine.query_knn("m0", k=3)
        engine.query_closest_approach("m0", "m1")
        engine.query_meet(25.0, 60.0, ids=["m0", "m1", "n0"])
        assert encounter_store.raw.points_read == before


class TestRunQueryJson:
    def test_range(self, demo_store, demo_trajs):
        engine = QueryEngine(demo_store)
        tr = demo_trajs[0]
        x, y = float(tr.xy[0, 0]), float(tr.xy[0, 1])
        spec = {"type": "range",
                "rect": {"xmin": x - 30, "ymin": y - 30,
                         "xmax": x + 30, "ymax": y + 30}}
        result = run_query(engine, spec)
        assert result["provenance"] == "index_only"
        assert result["ids"] == sorted(
            engine.query_range(Rect(x - 30, y - 30, x + 30, y + 30)))

    def test_knn_by_id_and_by_points(self, demo_store):
        engine = QueryEngine(demo_store)
        by_id = run_query(engine, {"type": "knn", "query_id": "t00", "k": 3})
        assert len(by_id["neighbors"]) == 3
        pts = [[float(t), float(x), float(y)] for t, (x, y) in zip(
            engine.summary_trajectory("t00").t,
            engine.summary_trajectory("t00").xy)]
        by_pts = run_query(engine, {"type": "knn", "query_points": pts, "k": 1})
        assert by_pts["neighbors"][0]["id"] == "t00"
        assert by_pts["neighbors"][0]["distance"] == 0.0

    def test_closest_approach(self, demo_store):
        engine = QueryEngine(demo_store)
        result = run_query(engine, {"type": "closest_approach",
                                    "id_a": "t00", "id_b": "t01"})
        assert result["t_a"] == result["t_b"]
        assert result["distance"] >= 0

    def test_meet_and_hybrid(self, encounter_store):
        engine = QueryEngine(encounter_store)
        meet = run_query(engine, {"type": "meet", "dist_tol": 25.0,
                                  "time_tol": 60.0, "ids": ["m0", "m1"]})
        assert meet["meetings"]
        hybrid = run_query(engine, {"type": "hybrid_meet", "target_id": "m0",
                                    "exact_tol": 2.0})
        assert hybrid["provenance"] == "hybrid_refined"
        assert hybrid["raw_points_touched"] > 0

    @pytest.mark.parametrize("spec", [
        {},
        {"type": "teleport"},
        {"type": "range"},
        {"type": "range", "rect": {"xmin": 0}},
        {"type": "knn", "k": 1},
        {"type": "knn", "query_id": "t00", "k": 0},
        {"type": "knn", "query_id": "t00", "k": 1, "metric": "cosine"},
        {"type": "knn", "query_points": [], "k": 1},
        {"type": "closest_approach", "id_a": "t00"},
        {"type": "meet", "dist_tol": 1.0},
        {"type": "hybrid_meet", "exact_tol": 1.0},
    ])
    def test_malformed_specs_rejected(self, demo_store, spec):
        with pytest.raises(ValueError):
            run_query(QueryEngine(demo_store), spec)

    def test_unknown_id_raises_keyerror(self, demo_store):
        with pytest.raises(KeyError):
            run_query(QueryEngine(demo_store),
                      {"type": "knn", "query_id": "ghost", "k": 1})
