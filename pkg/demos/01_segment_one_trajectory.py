"""Segment a single trajectory and look at what the summary keeps.

A day-like track alternates directed travel with dwells. The segmenter
decimates travel to ~min_r spacing and collapses each dwell to one point.
"""

import numpy as np

from trajseg import SegmenterParams, segment_trajectory, validate_segmentation
from trajseg.synth import BoutSpec, GenSpec, generate

spec = GenSpec(seed=11, n_trajectories=1, bouts=((
    BoutSpec("locomotive", 120, step_len=8.0, heading_persistence=0.92,
             noise_sigma=0.5),
    BoutSpec("local", 2500, cloud_sigma=5.0),
    BoutSpec("locomotive", 90, step_len=8.0, heading_persistence=0.92,
             noise_sigma=0.5),
    BoutSpec("local", 1800, cloud_sigma=4.5),
    BoutSpec("locomotive", 100, step_len=8.0, heading_persistence=0.92,
             noise_sigma=0.5),
),))
(traj,) = generate(spec)
params = SegmenterParams(min_r=25.0, min_density=0.26)

segmentation, summaries = segment_trajectory(traj, params)
assert validate_segmentation(traj, segmentation)

print(f"raw points:    {len(traj)}")
print(f"summaries:     {len(summaries)} "
      f"({len(summaries) / len(traj):.1%} of the raw size)")
print(f"cutoffs:       {segmentation.cutoffs[:8]} ...")
print()
print("segment table (one row per summary):")
print(f"{'kind':<11} {'n_points':>8} {'radius':>7} {'t_rep':>8}  centroid")
for s in summaries:
    print(f"{s.kind:<11} {s.n_points:>8} {s.radius:>7.1f} {s.t_rep:>8.1f}  "
          f"({s.centroid[0]:8.1f}, {s.centroid[1]:8.1f})")

locals_ = [s for s in summaries if s.kind == "local"]
print()
print(f"the {len(locals_)} dwells collapsed to one summary point each; "
      f"each holds {min(s.n_points for s in locals_)}+ raw points")
