"""Point-set density estimators: streaming approximations and exact oracles.

The segmenter keeps a constant-size running circle (centroid + max arrival
distance) per open segment; a streaming bounding rectangle is an optional
drop-in. Both are worst-case unbounded UNDER-estimators of the true density
(points / convex hull area), so the exact hull and the minimum enclosing
circle are provided as offline references; they need O(n) memory and stay
out of the streaming path.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

Point = tuple[float, float]

SHAPE_RUNNING_CIRCLE = "running_circle"
SHAPE_BOUNDING_RECT = "bounding_rect"
SHAPE_MIN_ENCLOSING_CIRCLE = "min_enclosing_circle"
SHAPE_CONVEX_HULL = "convex_hull"


def _check_finite(p: Point) -> None:
    if not (math.isfinite(p[0]) and math.isfinite(p[1])):
        raise ValueError(f"non-finite point {p}")


@dataclass(frozen=True, slots=True)
class DensityEstimate:
    """Point count over enclosing-shape area; +inf when the area degenerates."""

    n: int
    area: float
    density: float
    shape: str

    @classmethod
    def of(cls, n: int, area: float, shape: str) -> "DensityEstimate":
        if n < 1:
            raise ValueError("density needs at least one point")
        density = math.inf if area == 0.0 else n / area
        return cls(n=n, area=area, density=density, shape=shape)


@dataclass(frozen=True, slots=True)
class RunningCircleState:
    """Running mean centroid, max distance seen at arrival, point count.

    The radius is measured against the centroid current when each point
    arrived, so after centroid drift it does not necessarily contain every
    point. That is the estimator's documented behavior, not a bug; tests
    compare it against a line-by-line trace, never against containment.
    """

    cx: float
    cy: float
    radius: float
    n: int

    @classmethod
    def from_first_point(cls, p: Point) -> "RunningCircleState":
        _check_finite(p)
        return cls(cx=p[0], cy=p[1], radius=0.0, n=1)

    @property
    def centroid(self) -> Point:
        return (self.cx, self.cy)


def running_circle_update(state: RunningCircleState, p: Point) -> RunningCircleState:
    """One streaming step: radius against the pre-update centroid, then mean.

    Returns the post-arrival state; the caller decides whether to commit it
    (the segmenter discards it when the arrival triggers a cut).
    """
    _check_finite(p)
    x, y = p[0], p[1]
    n_new = state.n + 1
    dx = x - state.cx
    dy = y - state.cy
    d = math.sqrt(dx * dx + dy * dy)
    r_new = state.radius if state.radius >= d else d
    cx_new = ((n_new - 1) * state.cx + x) / n_new
    cy_new = ((n_new - 1) * state.cy + y) / n_new
    return RunningCircleState(cx=cx_new, cy=cy_new, radius=r_new, n=n_new)


def running_circle_density(state: RunningCircleState) -> DensityEstimate:
    """n over pi*radius^2; +inf while all points coincide (radius 0)."""
    area = math.pi * state.radius * state.radius
    return DensityEstimate.of(state.n, area, SHAPE_RUNNING_CIRCLE)


@dataclass(frozen=True, slots=True)
class BoundingRectState:
    """Streaming axis-aligned extremes; O(1) state, order-independent."""

    minx: float
    maxx: float
    miny: float
    maxy: float
    n: int

    @classmethod
    def empty(cls) -> "BoundingRectState":
        return cls(minx=math.inf, maxx=-math.inf,
                   miny=math.inf, maxy=-math.inf, n=0)


def bounding_rect_update(state: BoundingRectState, p: Point) -> BoundingRectState:
    _check_finite(p)
    x, y = p[0], p[1]
    return BoundingRectState(
        minx=x if x < state.minx else state.minx,
        maxx=x if x > state.maxx else state.maxx,
        miny=y if y < state.miny else state.miny,
        maxy=y if y > state.maxy else state.maxy,
        n=state.n + 1,
    )


def bounding_rect_density(state: BoundingRectState) -> DensityEstimate:
    """n over rectangle area; +inf for a single point or an axis-aligned run."""
    if state.n < 1:
        raise ValueError("density needs at least one point")
    area = (state.maxx - state.minx) * (state.maxy - state.miny)
    return DensityEstimate.of(state.n, area, SHAPE_BOUNDING_RECT)


# --- exact offline references ------------------------------------------------

_MEC_EPS = 1e-14


def _in_circle(c: tuple[Point, float], p: Point) -> bool:
    return math.hypot(p[0] - c[0][0], p[1] - c[0][1]) <= c[1] * (1 + _MEC_EPS) + _MEC_EPS


def _diameter_circle(a: Point, b: Point) -> tuple[Point, float]:
    center = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    return center, math.hypot(a[0] - b[0], a[1] - b[1]) / 2.0


def _circumcircle(a: Point, b: Point, c: Point) -> tuple[Point, float] | None:
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0.0:
        return None
    aa = a[0] * a[0] + a[1] * a[1]
    bb = b[0] * b[0] + b[1] * b[1]
    cc = c[0] * c[0] + c[1] * c[1]
    ux = (aa * (b[1] - c[1]) + bb * (c[1] - a[1]) + cc * (a[1] - b[1])) / d
    uy = (aa * (c[0] - b[0]) + bb * (a[0] - c[0]) + cc * (b[0] - a[0])) / d
    center = (ux, uy)
    r = max(math.hypot(a[0] - ux, a[1] - uy),
            math.hypot(b[0] - ux, b[1] - uy),
            math.hypot(c[0] - ux, c[1] - uy))
    return center, r


def min_enclosing_circle(points: Sequence[Point]) -> tuple[Point, float]:
    """Exact smallest enclosing circle, expected-linear incremental form.

    Processes a shuffled copy, re-solving with each point found outside the
    current circle pinned to the boundary. The circle is unique, so the
    shuffle (fixed seed) only affects runtime, never the result.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise ValueError("empty point set")
    for p in pts:
        _check_finite(p)
    random.Random(0x1D2B5).shuffle(pts)

    circle: tuple[Point, float] | None = None
    for i, p in enumerate(pts):
        if circle is None or not _in_circle(circle, p):
            circle = _mec_one_boundary(pts[:i], p)
    assert circle is not None
    return circle


def _mec_one_boundary(pts: list[Point], p: Point) -> tuple[Point, float]:
    circle = (p, 0.0)
    for j, q in enumerate(pts):
        if not _in_circle(circle, q):
            if circle[1] == 0.0:
                circle = _diameter_circle(p, q)
            else:
                circle = _mec_two_boundary(pts[:j], p, q)
    return circle


def _mec_two_boundary(pts: list[Point], p: Point, q: Point) -> tuple[Point, float]:
    base = _diameter_circle(p, q)
    left: tuple[Point, float] | None = None
    right: tuple[Point, float] | None = None
    px, py = p
    qx, qy = q
    for r in pts:
        if _in_circle(base, r):
            continue
        cross = (qx - px) * (r[1] - py) - (qy - py) * (r[0] - px)
        circ = _circumcircle(p, q, r)
        if circ is None:
            continue
        d = (qx - px) * (circ[0][1] - py) - (qy - py) * (circ[0][0] - px)
        if cross > 0.0 and (left is None or d > (qx - px) * (left[0][1] - py)
                            - (qy - py) * (left[0][0] - px)):
            left = circ
        elif cross < 0.0 and (right is None or d < (qx - px) * (right[0][1] - py)
                              - (qy - py) * (right[0][0] - px)):
            right = circ
    if left is None and right is None:
        return base
    if left is None:
        return right  # type: ignore[return-value]
    if right is None:
        return left
    return left if left[1] <= right[1] else right


def min_enclosing_circle_density(points: Sequence[Point]) -> DensityEstimate:
    _, r = min_enclosing_circle(points)
    return DensityEstimate.of(len(points), math.pi * r * r,
                              SHAPE_MIN_ENCLOSING_CIRCLE)


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Hull vertices in counter-clockwise order (monotone chain, O(n log n)).

    Collinear boundary points are dropped; degenerate inputs yield fewer
    than 3 vertices.
    """
    pts = sorted(set((float(p[0]), float(p[1])) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain: list[Point] = []
        for p in seq:
            while len(chain) >= 2:
                ox, oy = chain[-2]
                ax, ay = chain[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def polygon_area(vertices: Sequence[Point]) -> float:
    """Shoelace area of an ordered vertex ring."""
    n = len(vertices)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def convex_hull_density(points: Sequence[Point]) -> DensityEstimate:
    """The reference density: points over hull area (+inf when degenerate)."""
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    for p in pts:
        _check_finite(p)
    hull = convex_hull(pts)
    return DensityEstimate.of(len(pts), polygon_area(hull), SHAPE_CONVEX_HULL)
