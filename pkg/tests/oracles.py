"""Independent reference implementations used to freeze expected values.

Everything in here is deliberately naive: scalar loops, brute-force
enumeration, no imports from trajseg. These are the second route in every
dual-route check, so they must stay decoupled from the code they judge.
"""

import math


def trace_segmentation(points, min_r, min_density):
    """Line-by-line scalar trace of the density segmenter on one trajectory.

    points: list of (x, y) tuples. Returns (cutoffs, centroids) where
    cutoffs is the 0-based list starting at 0 and ending at len(points),
    and centroids has one (x, y) entry per segment.
    """
    n_total = len(points)
    if n_total == 0:
        raise ValueError("empty trajectory")
    cutoffs = [0]
    centroids = []
    cx, cy = points[0]
    n_points = 1
    radius = 0.0
    for i in range(1, n_total):
        x, y = points[i]
        n_points += 1
        radius = max(radius, math.hypot(x - cx, y - cy))
        if radius > min_r:
            density = n_points / (math.pi * radius * radius)
            if density < min_density:
                cutoffs.append(i)
                centroids.append((cx, cy))
                cx, cy = x, y
                n_points = 1
                radius = 0.0
                continue
        cx = ((n_points - 1) * cx + x) / n_points
        cy = ((n_points - 1) * cy + y) / n_points
    cutoffs.append(n_total)
    centroids.append((cx, cy))
    return cutoffs, centroids


def shoelace_area(corners):
    """Polygon area from an ordered vertex list, by the shoelace sum."""
    n = len(corners)
    acc = 0.0
    for i in range(n):
        x0, y0 = corners[i]
        x1, y1 = corners[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def _circle_from_two(a, b):
    cx = (a[0] + b[0]) / 2.0
    cy = (a[1] + b[1]) / 2.0
    r = math.hypot(a[0] - b[0], a[1] - b[1]) / 2.0
    return (cx, cy), r


def _circle_from_three(a, b, c):
    """Circumcircle, or None when the points are (near-)collinear."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-14:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    return (ux, uy), math.hypot(ux - ax, uy - ay)


def brute_min_enclosing_circle(points, eps=1e-9):
    """Smallest enclosing circle by enumerating all pairs and triples.

    O(n^4) with the containment scans; fine for n <= ~25.
    """
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    if len(pts) == 1:
        return (pts[0][0], pts[0][1]), 0.0

    def contains_all(center, r):
        return all(math.hypot(p[0] - center[0], p[1] - center[1]) <= r + eps
                   for p in pts)

    best_c, best_r = None, float("inf")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            c, r = _circle_from_two(pts[i], pts[j])
            if r < best_r and contains_all(c, r):
                best_c, best_r = c, r
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for k in range(j + 1, len(pts)):
                circ = _circle_from_three(pts[i], pts[j], pts[k])
                if circ is None:
                    continue
                c, r = circ
                if r < best_r and contains_all(c, r):
                    best_c, best_r = c, r
    return best_c, best_r


def brute_hausdorff(a, b):
    """Symmetric discrete Hausdorff distance via the O(n*m) max-min scan."""
    def directed(src, dst):
        worst = 0.0
        for p in src:
            best = min(math.hypot(p[0] - q[0], p[1] - q[1]) for q in dst)
            worst = max(worst, best)
        return worst

    return max(directed(a, b), directed(b, a))


def brute_dtw(a, b):
    """Dynamic time warping via the full quadratic table, Euclidean costs."""
    n, m = len(a), len(b)
    table = [[float("inf")] * (m + 1) for _ in range(n + 1)]
    table[0][0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = math.hypot(a[i - 1][0] - b[j - 1][0],
                              a[i - 1][1] - b[j - 1][1])
            table[i][j] = cost + min(table[i - 1][j], table[i][j - 1],
                                     table[i - 1][j - 1])
    return table[n][m]


def scan_raw_slice(rows, traj_id, t0, t1):
    """Linear filter over (traj_id, t, x, y) rows; the raw_slice oracle."""
    out = [r for r in rows if r[0] == traj_id and t0 <= r[1] <= t1]
    out.sort(key=lambda r: r[1])
    return out


def interp_track(ts, xs, ys, t):
    """Piecewise-linear position on a polyline track at time t (clamped)."""
    if t <= ts[0]:
        return xs[0], ys[0]
    if t >= ts[-1]:
        return xs[-1], ys[-1]
    lo, hi = 0, len(ts) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= t:
            lo = mid
        else:
            hi = mid
    span = ts[hi] - ts[lo]
    w = 0.0 if span == 0 else (t - ts[lo]) / span
    return xs[lo] + w * (xs[hi] - xs[lo]), ys[lo] + w * (ys[hi] - ys[lo])


def brute_meetings(track_a, track_b, tol, merge_gap):
    """All maximal time intervals where two raw tracks come within tol.

    track_*: (ts, xs, ys) lists. Evaluates the interpolated distance at the
    union of both timestamp sets over the overlapping span, marks qualifying
    times, and merges runs separated by <= merge_gap. Returns a list of
    (t_start, t_end, min_distance).
    """
    ts_a, xs_a, ys_a = track_a
    ts_b, xs_b, ys_b = track_b
    lo = max(ts_a[0], ts_b[0])
    hi = min(ts_a[-1], ts_b[-1])
    if lo > hi:
        return []
    times = sorted({t for t in list(ts_a) + list(ts_b) if lo <= t <= hi}
                   | {lo, hi})
    hits = []
    for t in times:
        pa = interp_track(ts_a, xs_a, ys_a, t)
        pb = interp_track(ts_b, xs_b, ys_b, t)
        d = math.hypot(pa[0] - pb[0], pa[1] - pb[1])
        if d <= tol:
            hits.append((t, d))
    if not hits:
        return []
    merged = []
    start, last, best = hits[0][0], hits[0][0], hits[0][1]
    for t, d in hits[1:]:
        if t - last <= merge_gap:
            last = t
            best = min(best, d)
        else:
            merged.append((start, last, best))
            start, last, best = t, t, d
    merged.append((start, last, best))
    return merged
