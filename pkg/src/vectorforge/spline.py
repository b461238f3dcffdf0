"""Catmull-Rom sampling/fitting and conversion to cubic Bezier pieces.

A spline segment is evaluated as C(u) = U M P^T with U = [u^3 u^2 u 1].
The Catmull-Rom basis interpolates its middle two control points, which
is what keeps fitted curves pinned to junction points.  Each segment
converts exactly to a cubic Bezier whose inner handles come from the
closed-form rows of M_bezier^-1 M_catmull; across consecutive segments
the first handle is replaced by the reflection of the previous second
handle through the shared joint, enforcing C1 continuity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Point2 = tuple[float, float]

CATMULL_ROM_MATRIX = 0.5 * np.array(
    [
        [-1.0, 3.0, -3.0, 1.0],
        [2.0, -5.0, 4.0, -1.0],
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, 2.0, 0.0, 0.0],
    ]
)

BEZIER_MATRIX = np.array(
    [
        [-1.0, 3.0, -3.0, 1.0],
        [3.0, -6.0, 3.0, 0.0],
        [-3.0, 3.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
)


@dataclass(frozen=True)
class ControlPolyline:
    """Sampled control points; closed polylines repeat the first point
    at the end.  Open polylines normally have distinct endpoints, but
    pieces that loop from a junction back to itself legitimately share
    them, so only the closed direction is enforced."""

    points: list[Point2]
    closed: bool = False

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("a control polyline needs at least 2 points")
        if self.closed and self.points[0] != self.points[-1]:
            raise ValueError("closed polylines must repeat their first point at the end")


@dataclass(frozen=True)
class BezierSegment:
    p_start: Point2
    c1: Point2
    c2: Point2
    p_end: Point2


def eval_spline(u: float, m: np.ndarray, pts) -> Point2:
    """C(u) = U M P^T for four 2-D control points."""
    p = np.asarray(pts, dtype=np.float64).reshape(4, 2)
    uvec = np.array([u**3, u**2, u, 1.0])
    x, y = uvec @ np.asarray(m, dtype=np.float64) @ p
    return (float(x), float(y))


def catmull_segment_to_bezier(pc) -> BezierSegment:
    """Exact Catmull-Rom -> cubic Bezier conversion for one segment.

    Endpoints carry over; the handles are c1 = -p-1/6 + p0 + p1/6 and
    c2 = p0/6 + p1 - p2/6.
    """
    p = [np.asarray(v, dtype=np.float64) for v in pc]
    c1 = -p[0] / 6.0 + p[1] + p[2] / 6.0
    c2 = p[1] / 6.0 + p[2] - p[3] / 6.0
    return BezierSegment(
        p_start=(float(p[1][0]), float(p[1][1])),
        c1=(float(c1[0]), float(c1[1])),
        c2=(float(c2[0]), float(c2[1])),
        p_end=(float(p[2][0]), float(p[2][1])),
    )


def enforce_c1(prev_c2: Point2, joint: Point2) -> Point2:
    """Reflect the previous segment's second handle through the joint;
    the result replaces the next segment's first handle."""
    return (2.0 * joint[0] - prev_c2[0], 2.0 * joint[1] - prev_c2[1])


def sample_control_points(piece, resolution: float) -> ControlPolyline:
    """Uniformly sample a boundary piece into spline control points.

    stride = round(1/resolution), clamped to >= 1; endpoints are always
    kept exactly once.  Closed pieces sample around the cycle anchored
    at their first point and the polyline repeats that anchor at the
    end.
    """
    if not 0.0 < resolution <= 1.0:
        raise ValueError(f"resolution must be in (0, 1], got {resolution}")
    stride = max(1, round(1.0 / resolution))
    pts = piece.points
    closed = piece.kind == "closed"
    if closed:
        sampled = [tuple(map(float, pts[i])) for i in range(0, len(pts), stride)]
        sampled.append(sampled[0])
        return ControlPolyline(points=sampled, closed=True)
    if len(pts) == 1:
        p = tuple(map(float, pts[0]))
        return ControlPolyline(points=[p, p], closed=False)
    sampled = [tuple(map(float, pts[i])) for i in range(0, len(pts) - 1, stride)]
    sampled.append(tuple(map(float, pts[-1])))
    return ControlPolyline(points=sampled, closed=False)


def fit_path(polyline: ControlPolyline) -> list[BezierSegment]:
    """Fit Catmull-Rom segments over the control points and return the
    converted cubic Bezier pieces.

    n stored points yield n-1 segments.  Open ends use duplicated
    phantom neighbors; closed polylines use cyclic neighbors.  The
    first segment's c1 comes from the conversion formula, later ones
    from the C1 reflection; c2 always from the conversion formula.
    Two-point polylines degrade to a straight segment with handles at
    the thirds.
    """
    pts = np.asarray(polyline.points, dtype=np.float64)
    n = len(pts)
    if n == 2:
        a, b = pts
        c1 = a + (b - a) / 3.0
        c2 = a + 2.0 * (b - a) / 3.0
        return [
            BezierSegment(
                (float(a[0]), float(a[1])),
                (float(c1[0]), float(c1[1])),
                (float(c2[0]), float(c2[1])),
                (float(b[0]), float(b[1])),
            )
        ]
    if polyline.closed:
        d = pts[:-1]
        m = len(d)
        prev = np.roll(d, 1, axis=0)
        nxt = np.roll(d, -1, axis=0)
        nxt2 = np.roll(d, -2, axis=0)
        starts, ends = d, nxt
    else:
        d = pts
        m = n - 1
        starts, ends = d[:m], d[1:]
        prev = np.vstack([d[:1], d[: m - 1]])
        nxt2 = np.vstack([d[2:], d[-1:]])
    c2 = starts / 6.0 + ends - nxt2 / 6.0
    c1 = np.empty_like(c2)
    c1[0] = -prev[0] / 6.0 + starts[0] + ends[0] / 6.0
    if m > 1:
        c1[1:] = 2.0 * starts[1:] - c2[:-1]
    return [
        BezierSegment(
            (float(starts[i][0]), float(starts[i][1])),
            (float(c1[i][0]), float(c1[i][1])),
            (float(c2[i][0]), float(c2[i][1])),
            (float(ends[i][0]), float(ends[i][1])),
        )
        for i in range(m)
    ]
