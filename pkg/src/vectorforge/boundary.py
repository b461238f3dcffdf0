"""Subpixel region boundaries: edge grid, junctions, piece tracing.

The subpixel grid S has size (2W-1) x (2H-1).  Even/even positions are
pixel centers and never carry edges.  Positions with exactly one odd
coordinate are edge midpoints: (odd x, even y) sits between two
horizontally adjacent pixels, (even x, odd y) between two vertically
adjacent ones.  Odd/odd positions are pixel corners; they are filled
when a boundary runs straight through them, and marked as junctions
when more than two regions meet.

A boundary piece is an ordered, 8-connected point list separating two
regions.  Pieces come in three forms: between two junctions, as a
single closed loop, or starting/ending on the border of S.  Tracing
consumes every edge point exactly once; junction points are shared and
stored as the endpoint of every incident piece.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .segmentation import LabelImage

# deterministic neighbor probing order: E, S, W, N, then diagonals
_DIRS8 = ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1))


class TopologyError(RuntimeError):
    """An edge point could not be assigned to a piece; indicates an
    inconsistent edge/junction grid, never expected on valid input."""


@dataclass(eq=False)
class SubpixelBoundaryImage:
    width_s: int
    height_s: int
    edges: np.ndarray  # (height_s, width_s) bool
    junctions: np.ndarray  # (height_s, width_s) bool


@dataclass(eq=False)
class BoundaryPiece:
    """Ordered subpixel point list ((x, y) ints) separating two regions.

    kind is one of 'open' (junction to junction), 'closed' (loop, the
    first point repeats only logically), 'border' (at least one
    endpoint on the border of S).  Synthetic pieces run along the S
    border, belong to a single region (right_region is -1) and are
    always emitted as straight lines.
    """

    id: int
    points: list[tuple[int, int]]
    kind: str
    left_region: int
    right_region: int
    synthetic: bool = False


@dataclass(eq=False)
class TraceResult:
    pieces: list[BoundaryPiece] = field(default_factory=list)
    closed_ids: list[int] = field(default_factory=list)
    neighbors: dict[int, list[int]] = field(default_factory=dict)


def build_subpixel_edges(labels: LabelImage) -> SubpixelBoundaryImage:
    """Edge grid: set exactly where two adjacent pixels carry different
    labels (odd x between a horizontal pair, odd y between a vertical
    pair); everything else zero, junction grid left empty."""
    lab = labels.labels
    hs, ws = 2 * labels.height - 1, 2 * labels.width - 1
    edges = np.zeros((hs, ws), dtype=bool)
    if labels.width > 1:
        edges[0::2, 1::2] = lab[:, :-1] != lab[:, 1:]
    if labels.height > 1:
        edges[1::2, 0::2] = lab[:-1, :] != lab[1:, :]
    junctions = np.zeros((hs, ws), dtype=bool)
    return SubpixelBoundaryImage(width_s=ws, height_s=hs, edges=edges, junctions=junctions)


def fill_gaps(s: SubpixelBoundaryImage) -> SubpixelBoundaryImage:
    """Fill odd/odd corners whose left+right or top+bottom neighbors are
    both edges, making boundary pieces 8-connected.  Corner fills never
    influence each other (their 4-neighbors are all midpoints), so the
    update is order-free."""
    e = s.edges
    if s.width_s < 3 or s.height_s < 3:
        return s
    left = e[1::2, 0:-2:2]
    right = e[1::2, 2::2]
    top = e[0:-2:2, 1::2]
    bottom = e[2::2, 1::2]
    e[1::2, 1::2] |= (left & right) | (top & bottom)
    return s


def mark_junctions(s: SubpixelBoundaryImage) -> SubpixelBoundaryImage:
    """Mark odd/odd positions whose 4-neighbor edge count exceeds 2;
    there, more than two regions meet.  Edge grid is unchanged."""
    e = s.edges
    if s.width_s < 3 or s.height_s < 3:
        return s
    count = (
        e[1::2, 0:-2:2].astype(np.int8)
        + e[1::2, 2::2]
        + e[0:-2:2, 1::2]
        + e[2::2, 1::2]
    )
    s.junctions[1::2, 1::2] = count > 2
    return s


def _curve_neighbors(e: np.ndarray, x: int, y: int) -> list[tuple[int, int]]:
    """Legal continuations of the boundary curve through an edge point.

    Corners connect through their edge 4-neighbors.  A midpoint
    continues through the two corners of its pixel-edge segment; where
    such a corner is inside the grid but unset (an unfilled turn) the
    curve hops diagonally to the one perpendicular midpoint that
    bridges it.  Out-of-grid corners end the curve at the border.
    """
    hs, ws = e.shape
    out: list[tuple[int, int]] = []
    if x % 2 == 1 and y % 2 == 1:
        for dx, dy in _DIRS8[:4]:
            nx, ny = x + dx, y + dy
            if 0 <= nx < ws and 0 <= ny < hs and e[ny, nx]:
                out.append((nx, ny))
        return out
    if x % 2 == 1:  # vertical midpoint: corners at (x, y +/- 1)
        for cy in (y - 1, y + 1):
            if not 0 <= cy < hs:
                continue
            if e[cy, x]:
                out.append((x, cy))
                continue
            for hx in (x + 1, x - 1):
                if 0 <= hx < ws and e[cy, hx]:
                    out.append((hx, cy))
    else:  # horizontal midpoint: corners at (x +/- 1, y)
        for cx in (x + 1, x - 1):
            if not 0 <= cx < ws:
                continue
            if e[y, cx]:
                out.append((cx, y))
                continue
            for hy in (y + 1, y - 1):
                if 0 <= hy < hs and e[hy, cx]:
                    out.append((cx, hy))
    return out


def _first_midpoint(points: list[tuple[int, int]]) -> tuple[int, int]:
    for x, y in points:
        if (x % 2) != (y % 2):
            return (x, y)
    raise TopologyError(f"piece without a midpoint: {points[:4]}...")


def _piece_regions(points: list[tuple[int, int]], labels: LabelImage) -> tuple[int, int]:
    """Sample the two labels adjacent to the piece's first midpoint.
    Vertical midpoints read the left/right pixels, horizontal ones the
    above/below pixels (in that order)."""
    x, y = _first_midpoint(points)
    lab = labels.labels
    if x % 2 == 1:
        left = int(lab[y // 2, (x - 1) // 2])
        right = int(lab[y // 2, (x + 1) // 2])
    else:
        left = int(lab[(y - 1) // 2, x // 2])
        right = int(lab[(y + 1) // 2, x // 2])
    if left == right:
        raise TopologyError(f"midpoint ({x},{y}) does not separate two regions")
    return left, right


def trace_pieces(s: SubpixelBoundaryImage, labels: LabelImage) -> TraceResult:
    """Extract all boundary pieces from the finalized S.

    Order: junction-to-junction pieces first (scanning junctions
    row-major, probing neighbors E, S, W, N), then border-touching
    pieces (border scan row-major), then the remaining closed loops.
    Open and border piece ids are pushed into the neighbor lists of the
    two regions they separate; closed pieces are listed separately.
    """
    e, j = s.edges, s.junctions
    hs, ws = e.shape
    consumed = np.zeros_like(e)
    result = TraceResult(neighbors={r: [] for r in range(labels.region_count)})

    def emit(points: list[tuple[int, int]], kind: str) -> None:
        left, right = _piece_regions(points, labels)
        piece = BoundaryPiece(
            id=len(result.pieces), points=points, kind=kind, left_region=left, right_region=right
        )
        result.pieces.append(piece)
        if kind == "closed":
            result.closed_ids.append(piece.id)
        else:
            result.neighbors[left].append(piece.id)
            result.neighbors[right].append(piece.id)

    def follow(path: list[tuple[int, int]]) -> None:
        # extend path until a junction, the border, or (loops) the start
        while True:
            cur = path[-1]
            prev = path[-2] if len(path) > 1 else None
            nxt = None
            for cand in _curve_neighbors(e, *cur):
                if cand == prev:
                    continue
                if j[cand[1], cand[0]]:
                    path.append(cand)
                    return
                if cand == path[0]:
                    return  # closed loop
                if consumed[cand[1], cand[0]]:
                    raise TopologyError(f"revisited point {cand}")
                nxt = cand
                break
            if nxt is None:
                return  # ended on the border of S
            consumed[nxt[1], nxt[0]] = True
            path.append(nxt)

    # phase 1: pieces incident to junctions
    for jy, jx in np.argwhere(j):
        for dx, dy in _DIRS8:
            nx, ny = int(jx) + dx, int(jy) + dy
            if not (0 <= nx < ws and 0 <= ny < hs):
                continue
            if not e[ny, nx] or j[ny, nx] or consumed[ny, nx]:
                continue
            if (nx % 2) == (ny % 2):
                continue  # corners only connect through midpoints
            path = [(int(jx), int(jy)), (nx, ny)]
            consumed[ny, nx] = True
            follow(path)
            lx, ly = path[-1]
            if j[ly, lx]:
                kind = "open"
            elif lx in (0, ws - 1) or ly in (0, hs - 1):
                kind = "border"
            else:
                raise TopologyError(f"trace from junction dead-ended at ({lx},{ly})")
            emit(path, kind)

    # phase 2: border-to-border pieces without junctions
    border: list[tuple[int, int]] = []
    for y in range(hs):
        xs = range(ws) if y in (0, hs - 1) else ((0, ws - 1) if ws > 1 else (0,))
        border.extend((x, y) for x in xs)
    for x, y in border:
        if not e[y, x] or consumed[y, x] or j[y, x]:
            continue
        path = [(x, y)]
        consumed[y, x] = True
        follow(path)
        lx, ly = path[-1]
        if j[ly, lx]:
            raise TopologyError(f"border trace from ({x},{y}) reached a junction")
        emit(path, "border")

    # phase 3: remaining points form closed loops
    for py, px in np.argwhere(e & ~consumed & ~j):
        x, y = int(px), int(py)
        if consumed[y, x]:
            continue
        path = [(x, y)]
        consumed[y, x] = True
        follow(path)
        if len(path) < 2 or path[0] not in _curve_neighbors(e, *path[-1]):
            raise TopologyError(f"trace from ({x},{y}) did not close into a loop")
        emit(path, "closed")

    return result


def _border_walk(ws: int, hs: int):
    """Clockwise border cycle as (perimeter position -> point) helpers."""
    top = ws - 1
    right = top + hs - 1
    bottom = right + ws - 1
    total = bottom + hs - 1

    def point_at(t: int) -> tuple[int, int]:
        if t <= top:
            return (t, 0)
        if t <= right:
            return (ws - 1, t - top)
        if t <= bottom:
            return (ws - 1 - (t - right), hs - 1)
        return (0, hs - 1 - (t - bottom))

    def positions_of(x: int, y: int) -> list[int]:
        # degenerate 1-wide/1-tall frames visit points on two sides, and
        # the bottom-left corner maps to t == total, which wraps to 0
        ts = []
        if y == 0:
            ts.append(x)
        if x == ws - 1 and y > 0:
            ts.append(top + y)
        if y == hs - 1 and x < ws - 1:
            ts.append(right + (ws - 1 - x))
        if x == 0 and 0 < y < hs - 1:
            ts.append(bottom + (hs - 1 - y))
        return [t % total for t in ts] if total else [0]

    return total, point_at, positions_of


def _arc_region(p: tuple[int, int], q: tuple[int, int], labels: LabelImage) -> int:
    """Label of the pixel lining the unit border step from p to q."""
    lab = labels.labels
    (x0, y0), (x1, y1) = p, q
    if x0 == x1:  # vertical unit along a side
        return int(lab[(min(y0, y1) + 1) // 2, x0 // 2])
    return int(lab[y0 // 2, (min(x0, x1) + 1) // 2])


def add_border_pieces(labels: LabelImage, result: TraceResult) -> dict[int, list[int]]:
    """Synthesize straight border pieces along the S frame.

    The border cycle is split at every traced-piece border endpoint and
    at the four frame corners; each arc borders exactly one region and
    is appended to that region's neighbor list.  With no endpoints at
    all, the single border region gets one whole-frame piece.
    """
    ws, hs = 2 * labels.width - 1, 2 * labels.height - 1

    def add_piece(points: list[tuple[int, int]], region: int) -> None:
        piece = BoundaryPiece(
            id=len(result.pieces),
            points=points,
            kind="border",
            left_region=region,
            right_region=-1,
            synthetic=True,
        )
        result.pieces.append(piece)
        result.neighbors[region].append(piece.id)

    total, point_at, positions_of = _border_walk(ws, hs)
    breakpoints: set[int] = set()
    for piece in result.pieces:
        if piece.kind == "closed" or piece.synthetic:
            continue
        for x, y in (piece.points[0], piece.points[-1]):
            if x in (0, ws - 1) or y in (0, hs - 1):
                breakpoints.update(positions_of(x, y))

    if not breakpoints:
        region = int(labels.labels[0, 0])
        frame = [(0, 0), (ws - 1, 0), (ws - 1, hs - 1), (0, hs - 1), (0, 0)]
        add_piece(frame, region)
        return result.neighbors

    for cx, cy in ((0, 0), (ws - 1, 0), (ws - 1, hs - 1), (0, hs - 1)):
        breakpoints.update(positions_of(cx, cy))
    ordered = sorted(breakpoints)
    for i, t0 in enumerate(ordered):
        t1 = ordered[(i + 1) % len(ordered)]
        if t1 == t0:
            continue
        p, q = point_at(t0), point_at(t1)
        if p == q:
            continue
        region = _arc_region(p, point_at((t0 + 1) % total), labels)
        add_piece([p, q], region)
    return result.neighbors
