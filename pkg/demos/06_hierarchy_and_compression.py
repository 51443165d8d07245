"""Segmentation of segmentations, and how well the size formula predicts.

The summary trajectory is itself a trajectory, so the segmenter can run on
its own output with a larger radius: a granularity ladder from one pass
per level. The expected size of a single level follows the closed form
(l/r + 1) / (n1 + n2) for a travel leg of length l with n1 points followed
by a dwell of n2 points.
"""

import numpy as np

from trajseg import (
    SegmenterParams,
    estimate_compression,
    segment_hierarchy,
    segment_trajectory,
)
from trajseg.synth import BoutSpec, GenSpec, generate

spec = GenSpec(seed=21, n_trajectories=1, bouts=((
    BoutSpec("locomotive", 400, step_len=4.0, heading_persistence=0.95),
    BoutSpec("local", 2500, cloud_sigma=4.0),
    BoutSpec("locomotive", 300, step_len=4.0, heading_persistence=0.95),
    BoutSpec("local", 2000, cloud_sigma=4.0),
    BoutSpec("locomotive", 350, step_len=4.0, heading_persistence=0.95),
),))
(traj,) = generate(spec)

r = 20.0
ladder = [SegmenterParams(r, 0.26), SegmenterParams(5 * r, 0.26),
          SegmenterParams(25 * r, 0.26)]
levels = segment_hierarchy(traj, ladder)
print(f"raw points: {len(traj)}")
for lvl, (params, summaries) in enumerate(zip(ladder, levels)):
    print(f"level {lvl} (r={params.min_r:>5.0f}): {len(summaries):>4} summaries "
          f"({len(summaries) / len(traj):.2%} of raw)")

print()
print("size formula vs measurement on a single travel+dwell pair:")
n1, n2, step = 400, 2500, 4.0
pair_spec = GenSpec(seed=22, n_trajectories=1, bouts=((
    BoutSpec("locomotive", n1, step_len=step, heading_persistence=1.0),
    BoutSpec("local", n2, cloud_sigma=3.0),
),))
(pair,) = generate(pair_spec)
for radius in (10.0, 20.0, 40.0):
    _, summaries = segment_trajectory(pair, SegmenterParams(radius, 0.26))
    predicted = estimate_compression(step * n1, radius, n1, n2)
    measured = len(summaries) / (n1 + n2)
    print(f"  r={radius:>4.0f}: predicted {predicted:.4%}  "
          f"measured {measured:.4%}  (upper bound holds: "
          f"{measured <= predicted * 1.05})")
