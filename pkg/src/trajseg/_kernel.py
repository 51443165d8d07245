"""JIT-compiled single-pass segmentation over contiguous arrays.

The arithmetic here mirrors the pure-Python streaming path expression for
expression (same operations, same order), so batch and stream products are
bit-identical; tests assert exact equality between the two routes.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def segment_arrays(t, x, y, min_r, min_density):
    """One pass of the density segmenter over one trajectory.

    Returns (cutoffs, cx, cy, radius, n_points, t_sum, t_start, t_end,
    dense_flag) with one entry per closed segment (cutoffs has one more).
    Radius/count/centroid describe the segment's own points; the arriving
    point that triggers a cut only feeds the cut decision.
    """
    n = t.shape[0]
    cut_idx = np.empty(n + 1, dtype=np.int64)
    out_cx = np.empty(n, dtype=np.float64)
    out_cy = np.empty(n, dtype=np.float64)
    out_r = np.empty(n, dtype=np.float64)
    out_n = np.empty(n, dtype=np.int64)
    out_tsum = np.empty(n, dtype=np.float64)
    out_t0 = np.empty(n, dtype=np.float64)
    out_t1 = np.empty(n, dtype=np.float64)
    out_flag = np.empty(n, dtype=np.uint8)

    nseg = 0
    cut_idx[0] = 0

    cx = x[0]
    cy = y[0]
    n_points = 1
    radius = 0.0
    t_sum = t[0]
    t_start = t[0]
    t_last = t[0]
    exceeded = False

    for i in range(1, n):
        xi = x[i]
        yi = y[i]
        ti = t[i]
        n_new = n_points + 1
        dx = xi - cx
        dy = yi - cy
        d = math.sqrt(dx * dx + dy * dy)
        r_new = radius if radius >= d else d
        cut = False
        if r_new > min_r:
            density = n_new / (math.pi * r_new * r_new)
            if density < min_density:
                cut = True
            else:
                exceeded = True
        if cut:
            out_cx[nseg] = cx
            out_cy[nseg] = cy
            out_r[nseg] = radius
            out_n[nseg] = n_points
            out_tsum[nseg] = t_sum
            out_t0[nseg] = t_start
            out_t1[nseg] = t_last
            out_flag[nseg] = 1 if exceeded else 0
            nseg += 1
            cut_idx[nseg] = i
            cx = xi
            cy = yi
            n_points = 1
            radius = 0.0
            t_sum = ti
            t_start = ti
            t_last = ti
            exceeded = False
        else:
            n_points = n_new
            radius = r_new
            cx = ((n_new - 1) * cx + xi) / n_new
            cy = ((n_new - 1) * cy + yi) / n_new
            t_sum = t_sum + ti
            t_last = ti

    out_cx[nseg] = cx
    out_cy[nseg] = cy
    out_r[nseg] = radius
    out_n[nseg] = n_points
    out_tsum[nseg] = t_sum
    out_t0[nseg] = t_start
    out_t1[nseg] = t_last
    out_flag[nseg] = 1 if exceeded else 0
    nseg += 1
    cut_idx[nseg] = n

    return (cut_idx[:nseg + 1], out_cx[:nseg], out_cy[:nseg], out_r[:nseg],
            out_n[:nseg], out_tsum[:nseg], out_t0[:nseg], out_t1[:nseg],
            out_flag[:nseg])
