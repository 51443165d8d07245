"""Shared fixtures: the demo dataset, a populated store, planted encounters."""

import math

import numpy as np
import pytest

from trajseg import SampledTrajectory, SegmenterParams, generate, segment_trajectory
from trajseg.store import Dataset, write_points_csv
from trajseg.synth import default_gen_spec

DEMO_PARAMS = SegmenterParams(min_r=25.0, min_density=0.26)


@pytest.fixture(scope="session")
def demo_trajs():
    return generate(default_gen_spec())


@pytest.fixture(scope="session")
def demo_params():
    return DEMO_PARAMS


@pytest.fixture(scope="session")
def demo_csv(demo_trajs, tmp_path_factory):
    path = tmp_path_factory.mktemp("csv") / "points.csv"
    write_points_csv(demo_trajs, path)
    return path


@pytest.fixture(scope="session")
def demo_store(demo_csv, tmp_path_factory):
    root = tmp_path_factory.mktemp("store") / "demo"
    ds = Dataset(root, params=DEMO_PARAMS)
    ds.ingest_csv(demo_csv)
    yield ds
    ds.close()


def co_moving_pair(id_a: str, id_b: str, t_meet0: float, t_meet1: float,
                   gap: float = 0.5, n: int = 600, seed: int = 3):
    """Two trajectories that converge to within `gap` during [t_meet0,
    t_meet1] and live far apart otherwise. Timestamps 0..n-1 at 1 s."""
    rng = np.random.default_rng(seed)
    t = np.arange(n, dtype=float)
    # A: straight eastbound track with mild jitter
    ax = 4.0 * t
    ay = np.zeros(n) + rng.normal(0, 0.3, n)
    a = SampledTrajectory(id_a, t, np.column_stack((ax, ay)))
    # B: same track shifted north by 800, except co-moving in the window
    by = np.full(n, 800.0) + rng.normal(0, 0.3, n)
    inside = (t >= t_meet0) & (t <= t_meet1)
    # ease in/out over 40 s so the approach is continuous
    ramp = np.clip(np.minimum((t - (t_meet0 - 40)) / 40.0,
                              ((t_meet1 + 40) - t) / 40.0), 0.0, 1.0)
    by = by * (1 - ramp) + (ay + gap) * ramp
    assert inside.any()
    b = SampledTrajectory(id_b, t, np.column_stack((ax.copy(), by)))
    return a, b


@pytest.fixture(scope="session")
def encounter_store(tmp_path_factory):
    """20 trajectories: one planted exact encounter, one near miss, and 16
    well-separated background tracks. Used by the query acceptance suite."""
    root = tmp_path_factory.mktemp("store") / "encounters"
    ds = Dataset(root, params=DEMO_PARAMS)
    trajs = []
    # planted exact meeting (gap 0.5) between m0 and m1 during [200, 320]
    a, b = co_moving_pair("m0", "m1", 200.0, 320.0, gap=0.5, seed=11)
    trajs += [a, b]
    # near miss: within 10 planar units, never closer (stage-1 candidate)
    c, d = co_moving_pair("n0", "n1", 150.0, 260.0, gap=10.0, seed=12)
    offset = np.array([0.0, 4000.0])
    trajs += [SampledTrajectory("n0", c.t, c.xy + offset),
              SampledTrajectory("n1", d.t, d.xy + offset)]
    # background: separated single-bout wanderers on a coarse grid
    spec = default_gen_spec(seed=23, n_trajectories=16)
    for i, tr in enumerate(generate(spec)):
        shift = np.array([(i % 4) * 6000.0 + 8000.0,
                          (i // 4) * 6000.0 + 8000.0])
        trajs.append(SampledTrajectory(f"bg{i:02d}", tr.t, tr.xy + shift))
    for tr in trajs:
        for p in tr:
            ds.ingest_point(p)
    ds.flush()
    yield ds
    ds.close()


def warm_kernel():
    traj = SampledTrajectory("w", np.arange(3.0), np.zeros((3, 2)))
    segment_trajectory(traj, SegmenterParams(1.0, 1.0))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernel():
    warm_kernel()
