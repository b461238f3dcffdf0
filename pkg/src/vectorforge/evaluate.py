"""Output quality and size metrics with a built-in rasterizer.

The rasterizer exists so PSNR can be computed without an external SVG
renderer: paths are painted in document order onto a canvas whose
pixel (c, r) samples document point (c, r) (the geometry spans the
pixel-center lattice [0, W-1] x [0, H-1]).  Cubics are flattened by
midpoint subdivision to a 0.1 px flatness tolerance; polygons are
filled by a nonzero-winding scanline without anti-aliasing.  Span ends
are inclusive and points exactly on a horizontal boundary edge count
as covered, so abutting paths leave no cracks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .rastercore import RasterImage
from .svgwriter import BezierPath, SvgDocument

FLATNESS_PX = 0.1
PSNR_CAP_DB = 99.0


class DimensionError(ValueError):
    """Image dimensions do not match."""


@dataclass(frozen=True)
class Metrics:
    psnr_db: float
    bpp: float
    wall_ms: float
    path_count: int
    segment_count: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "psnr_db": round(self.psnr_db, 4),
                "bpp": round(self.bpp, 6),
                "wall_ms": round(self.wall_ms, 3),
                "path_count": self.path_count,
                "segment_count": self.segment_count,
            },
            sort_keys=True,
        )

    def to_text(self) -> str:
        return (
            f"psnr_db       {self.psnr_db:10.4f}\n"
            f"bpp           {self.bpp:10.6f}\n"
            f"wall_ms       {self.wall_ms:10.3f}\n"
            f"path_count    {self.path_count:10d}\n"
            f"segment_count {self.segment_count:10d}"
        )

    @staticmethod
    def csv_header() -> str:
        return "psnr_db,bpp,wall_ms,path_count,segment_count"

    def to_csv_row(self) -> str:
        return (
            f"{self.psnr_db:.4f},{self.bpp:.6f},{self.wall_ms:.3f},"
            f"{self.path_count},{self.segment_count}"
        )


def _flatten_cubic(p0, c1, c2, p3, out: list, depth: int = 0) -> None:
    # flat when both handles sit within tolerance of the chord
    ax, ay = p0
    dx, dy = p3[0] - ax, p3[1] - ay
    norm = math.hypot(dx, dy)
    if norm < 1e-12:
        d1 = math.hypot(c1[0] - ax, c1[1] - ay)
        d2 = math.hypot(c2[0] - ax, c2[1] - ay)
    else:
        d1 = abs((c1[0] - ax) * dy - (c1[1] - ay) * dx) / norm
        d2 = abs((c2[0] - ax) * dy - (c2[1] - ay) * dx) / norm
    if depth >= 24 or max(d1, d2) < FLATNESS_PX:
        out.append(p3)
        return
    # de Casteljau midpoint split (symmetric under reversal)
    m01 = ((p0[0] + c1[0]) / 2, (p0[1] + c1[1]) / 2)
    m12 = ((c1[0] + c2[0]) / 2, (c1[1] + c2[1]) / 2)
    m23 = ((c2[0] + p3[0]) / 2, (c2[1] + p3[1]) / 2)
    m012 = ((m01[0] + m12[0]) / 2, (m01[1] + m12[1]) / 2)
    m123 = ((m12[0] + m23[0]) / 2, (m12[1] + m23[1]) / 2)
    mid = ((m012[0] + m123[0]) / 2, (m012[1] + m123[1]) / 2)
    _flatten_cubic(p0, m01, m012, mid, out, depth + 1)
    _flatten_cubic(mid, m123, m23, p3, out, depth + 1)


def flatten_path(path: BezierPath) -> np.ndarray:
    """Closed polygon (N, 2) approximating the path outline."""
    pts: list[tuple[float, float]] = []
    if not path.segments:
        return np.zeros((0, 2))
    pts.append(path.segments[0].start)
    for seg in path.segments:
        if seg.is_line:
            pts.append(seg.end)
        else:
            _flatten_cubic(seg.start, seg.c1, seg.c2, seg.end, pts)
    if pts[-1] != pts[0]:
        pts.append(pts[0])
    return np.asarray(pts, dtype=np.float64)


def _paint_polygon(canvas: np.ndarray, painted: np.ndarray, poly: np.ndarray, fill) -> None:
    h, w = canvas.shape[:2]
    if len(poly) < 2:
        return
    x0, y0 = poly[:-1, 0], poly[:-1, 1]
    x1, y1 = poly[1:, 0], poly[1:, 1]
    nonh = y0 != y1
    hx0, hx1, hy = x0[~nonh], x1[~nonh], y0[~nonh]
    ex0, ey0, ex1, ey1 = x0[nonh], y0[nonh], x1[nonh], y1[nonh]
    ymin = np.minimum(ey0, ey1)
    ymax = np.maximum(ey0, ey1)
    direction = np.where(ey1 > ey0, 1, -1)
    rlo = max(0, int(math.ceil(float(poly[:, 1].min()))))
    rhi = min(h - 1, int(math.floor(float(poly[:, 1].max()))))
    for r in range(rlo, rhi + 1):
        yc = float(r)
        mask = (ymin <= yc) & (yc < ymax)
        if mask.any():
            t = (yc - ey0[mask]) / (ey1[mask] - ey0[mask])
            xs = ex0[mask] + t * (ex1[mask] - ex0[mask])
            order = np.argsort(xs, kind="stable")
            xs = xs[order]
            winding = np.cumsum(direction[mask][order])
            inside = winding != 0
            for i in np.nonzero(inside)[0]:
                a, b = xs[i], xs[i + 1] if i + 1 < len(xs) else xs[i]
                c0 = max(0, int(math.ceil(a)))
                c1 = min(w - 1, int(math.floor(b)))
                if c0 <= c1:
                    canvas[r, c0 : c1 + 1] = fill
                    painted[r, c0 : c1 + 1] = True
        # pixel centers lying exactly on a horizontal edge are covered
        on = hy == yc
        if on.any():
            for a, b in zip(hx0[on], hx1[on]):
                lo, hi = (a, b) if a <= b else (b, a)
                c0 = max(0, int(math.ceil(lo)))
                c1 = min(w - 1, int(math.floor(hi)))
                if c0 <= c1:
                    canvas[r, c0 : c1 + 1] = fill
                    painted[r, c0 : c1 + 1] = True
    # pixel centers coinciding with an outline vertex are covered too;
    # the half-open crossing rule would otherwise miss a polygon's
    # bottommost vertex (degenerate sliver regions end in one)
    vx, vy = poly[:, 0], poly[:, 1]
    exact = (vx == np.round(vx)) & (vy == np.round(vy))
    for x, y in poly[exact]:
        c, r = int(x), int(y)
        if 0 <= c < w and 0 <= r < h:
            canvas[r, c] = fill
            painted[r, c] = True


def rasterize_with_coverage(doc: SvgDocument, w: int, h: int) -> tuple[RasterImage, np.ndarray]:
    """Rasterize and also report which pixels some path painted."""
    if doc.width != w or doc.height != h:
        raise DimensionError(f"document {doc.width}x{doc.height} vs canvas {w}x{h}")
    if doc.paths:
        base = doc.paths[0].fill
    else:
        base = (0, 0, 0)
    canvas = np.empty((h, w, 3), dtype=np.uint8)
    canvas[:, :] = base
    painted = np.zeros((h, w), dtype=bool)
    for path in doc.paths:
        poly = flatten_path(path)
        _paint_polygon(canvas, painted, poly, path.fill)
    return RasterImage.from_array(canvas), painted


def rasterize(doc: SvgDocument, w: int, h: int) -> RasterImage:
    """Paint the document onto a w x h canvas (see module docstring)."""
    img, _ = rasterize_with_coverage(doc, w, h)
    return img


def psnr(a: RasterImage, b: RasterImage) -> float:
    """10 log10(255^2 / MSE) over all pixels and channels; equal images
    report the 99 dB cap."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionError(
            f"size mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    diff = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(255.0**2 / mse))


def bpp(byte_count: int, w: int, h: int) -> float:
    """Bits per source pixel of the emitted file."""
    if w * h <= 0:
        raise ValueError("empty canvas")
    return byte_count * 8.0 / (w * h)
