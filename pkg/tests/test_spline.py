import math

import numpy as np
import pytest

from vectorforge.boundary import BoundaryPiece
from vectorforge.spline import (
    BEZIER_MATRIX,
    CATMULL_ROM_MATRIX,
    ControlPolyline,
    catmull_segment_to_bezier,
    enforce_c1,
    eval_spline,
    fit_path,
    sample_control_points,
)


def _piece(points, kind="open"):
    return BoundaryPiece(id=0, points=points, kind=kind, left_region=0, right_region=1)


def test_matrix_values():
    expected_cr = 0.5 * np.array(
        [[-1, 3, -3, 1], [2, -5, 4, -1], [-1, 0, 1, 0], [0, 2, 0, 0]], dtype=float
    )
    assert np.array_equal(CATMULL_ROM_MATRIX, expected_cr)
    expected_bz = np.array(
        [[-1, 3, -3, 1], [3, -6, 3, 0], [-3, 3, 0, 0], [1, 0, 0, 0]], dtype=float
    )
    assert np.array_equal(BEZIER_MATRIX, expected_bz)


def test_bezier_matrix_invertible():
    ident = np.linalg.inv(BEZIER_MATRIX) @ BEZIER_MATRIX
    assert np.abs(ident - np.eye(4)).max() < 1e-12


def test_eval_interpolates_middle_points():
    pts = [(3.0, 1.0), (-2.0, 5.0), (7.0, 0.5), (4.0, 4.0)]
    assert eval_spline(0.0, CATMULL_ROM_MATRIX, pts) == pts[1]
    assert eval_spline(1.0, CATMULL_ROM_MATRIX, pts) == pts[2]


def test_eval_midpoint_collinear():
    pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]
    assert eval_spline(0.5, CATMULL_ROM_MATRIX, pts) == (1.5, 0.0)


def test_conversion_collinear_thirds():
    seg = catmull_segment_to_bezier([(0, 0), (1, 0), (2, 0), (3, 0)])
    assert seg.p_start == (1.0, 0.0)
    assert seg.p_end == (2.0, 0.0)
    assert seg.c1 == pytest.approx((4.0 / 3.0, 0.0))
    assert seg.c2 == pytest.approx((5.0 / 3.0, 0.0))


def test_conversion_square_quad():
    seg = catmull_segment_to_bezier([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert seg.c1 == pytest.approx((1.0 / 6.0, 7.0 / 6.0))
    assert seg.c2 == pytest.approx((5.0 / 6.0, 7.0 / 6.0))


def test_conversion_degenerate_point():
    seg = catmull_segment_to_bezier([(2, 3)] * 4)
    assert seg.p_start == seg.c1 == seg.c2 == seg.p_end == (2.0, 3.0)


def test_conversion_exactness_random_quads():
    # the converted Bezier must trace the same curve as the source segment
    rng = np.random.RandomState(9)
    worst = 0.0
    for _ in range(200):
        pc = [tuple(v) for v in rng.uniform(-10, 10, (4, 2))]
        seg = catmull_segment_to_bezier(pc)
        pb = [seg.p_start, seg.c1, seg.c2, seg.p_end]
        for u in np.linspace(0.0, 1.0, 21):
            a = eval_spline(float(u), CATMULL_ROM_MATRIX, pc)
            b = eval_spline(float(u), BEZIER_MATRIX, pb)
            worst = max(worst, abs(a[0] - b[0]), abs(a[1] - b[1]))
    assert worst < 1e-9


def test_enforce_c1_examples():
    assert enforce_c1((1.0, 1.0), (2.0, 2.0)) == (3.0, 3.0)
    assert enforce_c1((4.0, 5.0), (4.0, 5.0)) == (4.0, 5.0)
    assert enforce_c1((0.0, 5.0), (4.0, 5.0)) == (8.0, 5.0)


# --- sampling ----------------------------------------------------------------


def test_sampling_stride_and_endpoints():
    piece = _piece([(i, 0) for i in range(201)])
    poly = sample_control_points(piece, 1.0 / 100.0)
    assert poly.points == [(0.0, 0.0), (100.0, 0.0), (200.0, 0.0)]


def test_sampling_resolution_one_keeps_all():
    piece = _piece([(0, 0), (1, 1), (2, 1), (3, 2)])
    poly = sample_control_points(piece, 1.0)
    assert len(poly.points) == 4


def test_sampling_two_point_piece():
    piece = _piece([(0, 0), (1, 0)])
    for res in (1.0, 0.1, 0.005):
        poly = sample_control_points(piece, res)
        assert poly.points == [(0.0, 0.0), (1.0, 0.0)]


def test_sampling_closed_piece_anchored():
    piece = _piece([(i, i % 2) for i in range(10)], kind="closed")
    poly = sample_control_points(piece, 1.0 / 4.0)
    assert poly.closed
    assert poly.points[0] == poly.points[-1]
    assert poly.points[:-1] == [(0.0, 0.0), (4.0, 0.0), (8.0, 0.0)]


def test_sampling_rejects_bad_resolution():
    piece = _piece([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        sample_control_points(piece, 0.0)
    with pytest.raises(ValueError):
        sample_control_points(piece, 1.5)


# --- fitting -----------------------------------------------------------------


def test_fit_open_collinear():
    poly = ControlPolyline(points=[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)])
    segs = fit_path(poly)
    assert len(segs) == 3
    for seg in segs:
        for p in (seg.p_start, seg.c1, seg.c2, seg.p_end):
            assert p[1] == 0.0
    for a, b in zip(segs, segs[1:]):
        assert b.c1 == enforce_c1(a.c2, a.p_end)


def test_fit_two_point_line():
    segs = fit_path(ControlPolyline(points=[(0.0, 0.0), (3.0, 0.0)]))
    assert len(segs) == 1
    assert segs[0].c1 == (1.0, 0.0)
    assert segs[0].c2 == (2.0, 0.0)


def test_fit_closed_square_c1_everywhere():
    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]
    segs = fit_path(ControlPolyline(points=corners, closed=True))
    assert len(segs) == 4
    assert segs[-1].p_end == segs[0].p_start
    # interior joints are exact reflections
    for a, b in zip(segs, segs[1:]):
        assert b.c1 == enforce_c1(a.c2, a.p_end)
    # the wrap joint is C1 too for a symmetric cycle
    wrap_in = np.subtract(segs[-1].p_end, segs[-1].c2)
    wrap_out = np.subtract(segs[0].c1, segs[0].p_start)
    assert np.abs(wrap_in - wrap_out).max() < 1e-12


def test_fit_endpoints_interpolated():
    rng = np.random.RandomState(10)
    for _ in range(30):
        n = rng.randint(3, 9)
        pts = [tuple(v) for v in rng.uniform(-5, 5, (n, 2))]
        segs = fit_path(ControlPolyline(points=pts))
        assert segs[0].p_start == pts[0]
        assert segs[-1].p_end == pts[-1]
        for seg, a, b in zip(segs, pts, pts[1:]):
            assert seg.p_start == a and seg.p_end == b


def test_fit_collinear_stays_collinear():
    pts = [(float(i), 2.0 * i) for i in range(6)]
    for seg in fit_path(ControlPolyline(points=pts)):
        for p in (seg.p_start, seg.c1, seg.c2, seg.p_end):
            assert abs(p[1] - 2.0 * p[0]) < 1e-12


def test_fit_first_segment_uses_conversion_formula():
    pts = [(0.0, 0.0), (2.0, 1.0), (3.0, -1.0), (5.0, 0.0)]
    segs = fit_path(ControlPolyline(points=pts))
    direct = catmull_segment_to_bezier([pts[0], pts[0], pts[1], pts[2]])
    assert segs[0].c1 == direct.c1
    assert segs[0].c2 == direct.c2
