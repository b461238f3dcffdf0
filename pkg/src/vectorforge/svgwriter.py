"""Assemble region boundary loops into closed paths and write SVG.

Every region contributes one path per boundary loop chained from its
open/border pieces; closed pieces are holes and become their own paths,
written after all region paths so they stay visible (paint order, not
fill rule, realizes holes).  Subpixel coordinates are halved on the way
into document space.  Output is SVG 1.1 restricted to M/L/C/Z with
deterministic byte-for-byte serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryPiece, TraceResult
from .rastercore import RasterImage
from .segmentation import LabelImage
from .spline import BezierSegment, Point2


class ChainError(RuntimeError):
    """A region's pieces could not be chained into closed loops."""


@dataclass(eq=False)
class PathSegment:
    """One path element: a line when c1/c2 are None, else a cubic."""

    start: Point2
    end: Point2
    c1: Point2 | None = None
    c2: Point2 | None = None

    @property
    def is_line(self) -> bool:
        return self.c1 is None


@dataclass(eq=False)
class BezierPath:
    region: int
    segments: list[PathSegment]
    fill: tuple[int, int, int]
    is_hole: bool = False
    z_rank: int = 0


@dataclass(eq=False)
class SvgDocument:
    width: int
    height: int
    paths: list[BezierPath] = field(default_factory=list)
    stroke_width: float | None = None


@dataclass(eq=False)
class FittedPiece:
    """Per-piece geometry prepared ahead of assembly: either a scaled
    point run emitted as straight lines, or fitted cubic segments."""

    line_points: list[Point2] | None = None
    segments: list[BezierSegment] | None = None


def scale_to_document(p) -> Point2:
    """Subpixel grid coordinates to document units (times 0.5)."""
    return (0.5 * p[0], 0.5 * p[1])


def region_fill_color(
    img: RasterImage, labels: LabelImage, region: int, mode: str = "mean"
) -> tuple[int, int, int]:
    """Channel-wise mean (rounded half-up) or median of a region's
    source pixels."""
    mask = labels.labels == region
    if not mask.any():
        raise ValueError(f"region {region} has no pixels")
    px = img.pixels[mask].astype(np.float64)
    if mode == "mean":
        vals = np.floor(px.mean(axis=0) + 0.5)
    elif mode == "median":
        vals = np.floor(np.median(px, axis=0) + 0.5)
    else:
        raise ValueError(f"unknown fill mode {mode!r}")
    r, g, b = np.clip(vals, 0, 255).astype(int)
    return int(r), int(g), int(b)


def _endpoints(piece: BoundaryPiece) -> tuple[tuple[int, int], tuple[int, int]]:
    if piece.kind == "closed":
        return piece.points[0], piece.points[0]
    return piece.points[0], piece.points[-1]


def _is_junction(pt: tuple[int, int]) -> bool:
    return pt[0] % 2 == 1 and pt[1] % 2 == 1


def _arm_midpoint(piece: BoundaryPiece, end: int) -> tuple[int, int]:
    """The point adjacent to the given end, i.e. the direction the piece
    leaves its endpoint in."""
    pts = piece.points
    if len(pts) == 1:
        return pts[0]
    if piece.kind == "closed":
        return pts[1] if end == 0 else pts[-1]
    return pts[1] if end == 0 else pts[-2]


def _region_quadrant(
    junction: tuple[int, int], mid: tuple[int, int], region: int, labels: LabelImage
) -> tuple[int, int]:
    """Pixel coordinate of the region's quadrant flanking an incident
    midpoint at a junction."""
    jx, jy = junction
    mx, my = mid
    lab = labels.labels
    if mx == jx:  # vertical midpoint: flanked by the left/right pixels
        row = my // 2
        if int(lab[row, (jx - 1) // 2]) == region:
            return ((jx - 1) // 2, row)
        return ((jx + 1) // 2, row)
    col = mx // 2  # horizontal midpoint: flanked by the above/below pixels
    if int(lab[(jy - 1) // 2, col]) == region:
        return (col, (jy - 1) // 2)
    return (col, (jy + 1) // 2)


def chain_pieces(
    region: int,
    neighbors: dict[int, list[int]],
    pieces: list[BoundaryPiece],
    labels: LabelImage,
) -> list[list[tuple[int, bool]]]:
    """Chain a region's boundary inventory into closed loops.

    The inventory is the region's neighbor list plus any closed pieces
    it touches.  Each piece contributes two arms (its ends); arms
    meeting at a point are paired by exact integer coordinates.  At a
    junction several arms of the same region can collide; there, arms
    flanking the same region quadrant belong together, which keeps the
    traced loop on the region's side (a region touching a junction
    from two diagonal quadrants yields one figure-eight loop, matching
    the region's mask topology).  Returns loops as (piece_id, reversed)
    lists in traversal order.
    """
    ids = list(neighbors.get(region, []))
    ids += [p.id for p in pieces if p.kind == "closed" and region in (p.left_region, p.right_region)]
    ids = sorted(set(ids))
    if not ids:
        return []

    arms_at: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for pid in ids:
        a, b = _endpoints(pieces[pid])
        arms_at.setdefault(a, []).append((pid, 0))
        arms_at.setdefault(b, []).append((pid, 1))

    partner: dict[tuple[int, int], tuple[int, int]] = {}

    def pair(u: tuple[int, int], v: tuple[int, int]) -> None:
        partner[u] = v
        partner[v] = u

    for point in sorted(arms_at):
        arms = sorted(arms_at[point])
        if len(arms) == 2:
            pair(arms[0], arms[1])
            continue
        if len(arms) % 2:
            raise ChainError(f"region {region}: odd arm count at {point}")
        if _is_junction(point):
            groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
            for arm in arms:
                mid = _arm_midpoint(pieces[arm[0]], arm[1])
                quadrant = _region_quadrant(point, mid, region, labels)
                groups.setdefault(quadrant, []).append(arm)
            for quadrant in sorted(groups):
                g = groups[quadrant]
                if len(g) != 2:
                    raise ChainError(
                        f"region {region}: junction {point} quadrant {quadrant} "
                        f"has {len(g)} arms"
                    )
                pair(g[0], g[1])
            continue
        # non-junction collision: only degenerate single-point pieces do
        # this; splice each into the through-going pair
        singles = [a for a in arms if len(pieces[a[0]].points) == 1]
        others = [a for a in arms if len(pieces[a[0]].points) > 1]
        if len(singles) + len(others) != len(arms) or len(singles) != len(others):
            raise ChainError(f"region {region}: ambiguous join at non-junction {point}")
        for s, o in zip(singles, others):
            pair(s, o)

    loops: list[list[tuple[int, bool]]] = []
    used: set[tuple[int, int]] = set()
    for pid in ids:
        if (pid, 0) in used:
            continue
        loop: list[tuple[int, bool]] = []
        arm = (pid, 0)
        while True:
            used.add(arm)
            exit_arm = (arm[0], 1 - arm[1])
            used.add(exit_arm)
            loop.append((arm[0], arm[1] == 1))
            nxt = partner[exit_arm]
            if nxt == (pid, 0):
                break
            if nxt in used:
                raise ChainError(f"region {region}: arm walk revisited {nxt}")
            arm = nxt
        loops.append(loop)
    return loops


def _piece_path_segments(fitted: FittedPiece, reverse: bool) -> list[PathSegment]:
    if fitted.line_points is not None:
        pts = fitted.line_points[::-1] if reverse else fitted.line_points
        return [PathSegment(start=pts[i], end=pts[i + 1]) for i in range(len(pts) - 1)]
    segs = fitted.segments
    if reverse:
        return [
            PathSegment(start=s.p_end, end=s.p_start, c1=s.c2, c2=s.c1) for s in reversed(segs)
        ]
    return [PathSegment(start=s.p_start, end=s.p_end, c1=s.c1, c2=s.c2) for s in segs]


def build_document(
    img: RasterImage,
    labels: LabelImage,
    trace: TraceResult,
    fitted: dict[int, FittedPiece],
    fill_mode: str = "mean",
    stroke_width: float | None = None,
) -> SvgDocument:
    """Assemble the final document.

    Region paths (one per loop of open/border pieces) come first in
    ascending region order; closed pieces follow as hole paths in
    ascending piece id, filled with their enclosed region's color.
    """
    doc = SvgDocument(width=img.width, height=img.height, stroke_width=stroke_width)
    fills = {r: region_fill_color(img, labels, r, fill_mode) for r in range(labels.region_count)}
    pieces = trace.pieces
    closed = set(trace.closed_ids)
    for region in range(labels.region_count):
        loops = chain_pieces(region, trace.neighbors, pieces, labels)
        for loop in loops:
            if len(loop) == 1 and loop[0][0] in closed:
                continue  # hole rims are emitted once, by their inner region
            segments: list[PathSegment] = []
            for pid, rev in loop:
                segments.extend(_piece_path_segments(fitted[pid], rev))
            doc.paths.append(
                BezierPath(
                    region=region,
                    segments=segments,
                    fill=fills[region],
                    is_hole=False,
                    z_rank=len(doc.paths),
                )
            )
    for pid in trace.closed_ids:
        piece = pieces[pid]
        inner = piece.right_region  # right of the topmost midpoint = enclosed side
        doc.paths.append(
            BezierPath(
                region=inner,
                segments=_piece_path_segments(fitted[pid], False),
                fill=fills[inner],
                is_hole=True,
                z_rank=len(doc.paths),
            )
        )
    for path in doc.paths:
        _check_closed(path)
    return doc


def _check_closed(path: BezierPath) -> None:
    segs = path.segments
    for a, b in zip(segs, segs[1:]):
        if a.end != b.start:
            raise ChainError(f"path for region {path.region} breaks at {a.end} != {b.start}")
    if segs and segs[-1].end != segs[0].start:
        raise ChainError(f"path for region {path.region} does not close")


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _pt(p: Point2) -> str:
    return f"{_fmt(p[0])},{_fmt(p[1])}"


def path_d(path: BezierPath) -> str:
    segs = path.segments
    if not segs:
        return ""
    parts = [f"M {_pt(segs[0].start)}"]
    for i, s in enumerate(segs):
        last = i == len(segs) - 1
        if s.is_line:
            if not (last and s.end == segs[0].start):
                parts.append(f"L {_pt(s.end)}")
        else:
            parts.append(f"C {_pt(s.c1)} {_pt(s.c2)} {_pt(s.end)}")
    parts.append("Z")
    return " ".join(parts)


def serialize_svg(doc: SvgDocument) -> bytes:
    """Deterministic SVG 1.1 bytes: header, one path element per
    BezierPath (d limited to M/L/C/Z, #RRGGBB fill, no stroke unless
    configured)."""
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{doc.width}" height="{doc.height}" '
        f'viewBox="0 0 {doc.width} {doc.height}">\n',
    ]
    for path in doc.paths:
        fill = "#{:02X}{:02X}{:02X}".format(*path.fill)
        stroke = ""
        if doc.stroke_width is not None:
            stroke = f' stroke="{fill}" stroke-width="{_fmt(doc.stroke_width)}"'
        out.append(f'<path d="{path_d(path)}" fill="{fill}"{stroke}/>\n')
    out.append("</svg>\n")
    return "".join(out).encode("utf-8")
