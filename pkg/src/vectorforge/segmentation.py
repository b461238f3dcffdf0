"""Segmentation: produce a label image from a raster image.

Three methods with deliberately different looks:

* ``segment_srm``   -- statistical region merging over pixel-pair edges
  sorted by max-channel difference; regions merge while their channel
  means stay within a size-dependent statistical bound controlled by Q.
* ``segment_graph`` -- Kruskal-style component merging on the 4-neighbor
  pixel graph; a boundary survives when the cheapest crossing edge
  exceeds the adaptive internal difference min(Int(C) + k/|C|).
* ``segment_csc``   -- hierarchical code-element merging on a hexagonal
  island topology mapped onto the orthogonal lattice (every second row
  shifted by half a unit), grown bottom-up with a Euclidean color
  threshold.

Every segmenter output passes through :func:`normalize_labels`, so
labels are contiguous from 0 and each region is one 4-connected
component.  All three are deterministic: edge sorts carry an explicit
tie-break and every internal iteration order is fixed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numba
import numpy as np

from .rastercore import RasterImage

# gray levels per channel used by the SRM merge bound
_SRM_G = 256.0


@dataclass(frozen=True)
class SrmParams:
    """Q is the statistical granularity: larger Q keeps more regions."""

    q: float = 32.0
    min_region_frac: float = 0.0005

    def __post_init__(self) -> None:
        if self.q <= 0:
            raise ValueError(f"q must be > 0, got {self.q}")
        if not 0.0 <= self.min_region_frac <= 1.0:
            raise ValueError(f"min_region_frac must be in [0, 1], got {self.min_region_frac}")


@dataclass(frozen=True)
class GraphParams:
    """k scales the component threshold tau(C) = k / |C|."""

    k: float = 500.0
    min_region_frac: float = 0.0005

    def __post_init__(self) -> None:
        if self.k <= 0:
            raise ValueError(f"k must be > 0, got {self.k}")
        if not 0.0 <= self.min_region_frac <= 1.0:
            raise ValueError(f"min_region_frac must be in [0, 1], got {self.min_region_frac}")


@dataclass(frozen=True)
class CscParams:
    """Euclidean RGB distance threshold; colors within it are similar."""

    threshold: float = 40.0

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")


@dataclass(eq=False)
class LabelImage:
    """Per-pixel region identifiers.

    Invariants (established by normalize_labels): identifiers are
    exactly {0 .. region_count-1} and every region is one 4-connected
    component.
    """

    width: int
    height: int
    labels: np.ndarray  # (H, W) int32
    region_count: int

    def label(self, x: int, y: int) -> int:
        return int(self.labels[y, x])


# ---------------------------------------------------------------------------
# union-find kernels (numba; the merge loops are inherently sequential)
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True)
def _cc_labels_kernel(raw):
    """4-connected components of equal raw values, ids in scan order."""
    h, w = raw.shape
    n = h * w
    parent = np.arange(n, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            i = y * w + x
            if x > 0 and raw[y, x] == raw[y, x - 1]:
                ra = _find(parent, i)
                rb = _find(parent, i - 1)
                if ra != rb:
                    if rb < ra:
                        ra, rb = rb, ra
                    parent[rb] = ra
            if y > 0 and raw[y, x] == raw[y - 1, x]:
                ra = _find(parent, i)
                rb = _find(parent, i - w)
                if ra != rb:
                    if rb < ra:
                        ra, rb = rb, ra
                    parent[rb] = ra
    out = np.empty(n, dtype=np.int32)
    remap = np.full(n, -1, dtype=np.int32)
    nxt = 0
    for i in range(n):
        r = _find(parent, i)
        if remap[r] < 0:
            remap[r] = nxt
            nxt += 1
        out[i] = remap[r]
    return out.reshape(h, w), nxt


@numba.njit(cache=True)
def _graph_merge_kernel(src, dst, weights, n, k):
    parent = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    internal = np.zeros(n, dtype=np.float64)
    for i in range(src.shape[0]):
        ra = _find(parent, src[i])
        rb = _find(parent, dst[i])
        if ra == rb:
            continue
        w = weights[i]
        ta = internal[ra] + k / size[ra]
        tb = internal[rb] + k / size[rb]
        bound = ta if ta < tb else tb
        if w <= bound:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra
            size[ra] += size[rb]
            internal[ra] = w
    roots = np.empty(n, dtype=np.int64)
    for i in range(n):
        roots[i] = _find(parent, i)
    return roots


@numba.njit(cache=True)
def _srm_merge_kernel(src, dst, sums, n, factor):
    """factor = g^2 * ln(6 |I|^2) / (2 Q); b^2(R) = factor / |R|."""
    parent = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    for i in range(src.shape[0]):
        ra = _find(parent, src[i])
        rb = _find(parent, dst[i])
        if ra == rb:
            continue
        bound = factor / size[ra] + factor / size[rb]
        ok = True
        for c in range(3):
            d = sums[ra, c] / size[ra] - sums[rb, c] / size[rb]
            if d * d > bound:
                ok = False
                break
        if ok:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra
            size[ra] += size[rb]
            for c in range(3):
                sums[ra, c] += sums[rb, c]
    roots = np.empty(n, dtype=np.int64)
    for i in range(n):
        roots[i] = _find(parent, i)
    return roots


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _sorted_edges(img: RasterImage):
    """All 4-neighbor pixel pairs, ascending by (weight, src, south-first).

    Weight is the max-channel absolute difference.  The explicit
    tie-break (stable over source pixel index, south neighbor before
    east) makes both merge-based segmenters deterministic.
    """
    h, w = img.height, img.width
    px = img.pixels.astype(np.int16)
    idx = np.arange(h * w, dtype=np.int64).reshape(h, w)

    w_s = np.abs(px[1:, :, :] - px[:-1, :, :]).max(axis=2).ravel()
    src_s = idx[:-1, :].ravel()
    dst_s = idx[1:, :].ravel()

    w_e = np.abs(px[:, 1:, :] - px[:, :-1, :]).max(axis=2).ravel()
    src_e = idx[:, :-1].ravel()
    dst_e = idx[:, 1:].ravel()

    weights = np.concatenate([w_s, w_e]).astype(np.float64)
    src = np.concatenate([src_s, src_e])
    dst = np.concatenate([dst_s, dst_e])
    direction = np.concatenate(
        [np.zeros(len(w_s), dtype=np.int8), np.ones(len(w_e), dtype=np.int8)]
    )
    order = np.lexsort((direction, src, weights))
    return src[order], dst[order], weights[order]


def normalize_labels(raw) -> LabelImage:
    """Relabel an arbitrary non-negative integer grid into a LabelImage.

    Identifiers become contiguous from 0 in scan order of first
    occurrence, and same-valued areas that are not 4-connected are
    split into distinct regions.
    """
    if isinstance(raw, LabelImage):
        raw = raw.labels
    arr = np.ascontiguousarray(np.asarray(raw, dtype=np.int64))
    if arr.ndim != 2:
        raise ValueError(f"expected 2-D label array, got shape {arr.shape}")
    labels, count = _cc_labels_kernel(arr)
    return LabelImage(width=arr.shape[1], height=arr.shape[0], labels=labels, region_count=count)


def _region_stats(labels: np.ndarray, pixels: np.ndarray, count: int):
    """Per-region pixel counts and RGB sums (float64)."""
    flat = labels.ravel()
    sizes = np.bincount(flat, minlength=count).astype(np.int64)
    sums = np.zeros((count, 3), dtype=np.float64)
    px = pixels.reshape(-1, 3).astype(np.float64)
    for c in range(3):
        sums[:, c] = np.bincount(flat, weights=px[:, c], minlength=count)
    return sizes, sums


def _region_adjacency(labels: np.ndarray, count: int) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(count)]
    a, b = labels[:, :-1].ravel(), labels[:, 1:].ravel()
    mask = a != b
    pairs = np.stack([a[mask], b[mask]], axis=1)
    c, d = labels[:-1, :].ravel(), labels[1:, :].ravel()
    mask = c != d
    pairs = np.concatenate([pairs, np.stack([c[mask], d[mask]], axis=1)])
    if len(pairs):
        for u, v in np.unique(pairs, axis=0):
            adj[int(u)].add(int(v))
            adj[int(v)].add(int(u))
    return adj


def _merge_small_regions(norm: LabelImage, img: RasterImage, min_region_frac: float) -> LabelImage:
    """Fold regions below min_region_frac * area into their most similar
    4-adjacent neighbor (closest mean color), smallest regions first,
    until no undersized region remains."""
    min_size = min_region_frac * img.width * img.height
    if min_size <= 0 or norm.region_count <= 1:
        return norm
    labels = norm.labels
    count = norm.region_count
    sizes, sums = _region_stats(labels, img.pixels, count)
    adjacency = _region_adjacency(labels, count)
    parent = list(range(count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    alive = {r for r in range(count) if adjacency[r]}
    heap = [(int(sizes[r]), r) for r in sorted(alive) if sizes[r] < min_size]
    heapq.heapify(heap)
    while heap:
        sz, r = heapq.heappop(heap)
        if find(r) != r or sz != sizes[r] or sizes[r] >= min_size:
            continue  # stale entry
        if not adjacency[r]:
            continue
        mean_r = sums[r] / sizes[r]
        best = None
        best_d = None
        for nb in sorted(adjacency[r]):
            mean_n = sums[nb] / sizes[nb]
            d = float(np.sum((mean_r - mean_n) ** 2))
            if best is None or d < best_d or (d == best_d and nb < best):
                best, best_d = nb, d
        parent[r] = best
        sizes[best] += sizes[r]
        sums[best] += sums[r]
        for x in adjacency[r]:
            adjacency[x].discard(r)
            if x != best:
                adjacency[x].add(best)
                adjacency[best].add(x)
        adjacency[best].discard(best)
        adjacency[r] = set()
        if sizes[best] < min_size:
            heapq.heappush(heap, (int(sizes[best]), best))
    remap = np.array([find(r) for r in range(count)], dtype=np.int64)
    return normalize_labels(remap[labels])


# ---------------------------------------------------------------------------
# the three segmenters
# ---------------------------------------------------------------------------


def segment_srm(img: RasterImage, params: SrmParams) -> LabelImage:
    """Statistical region merging.

    Per-pixel regions merge along edges in ascending weight order when
    every channel mean difference stays within sqrt(b^2(R) + b^2(R')),
    with b(R) = g * sqrt(ln(6 |I|^2) / (2 Q |R|)) and g = 256.  Means
    are running, area-weighted.  Undersized regions are folded into
    their closest-colored neighbor afterwards.
    """
    n = img.width * img.height
    src, dst, _ = _sorted_edges(img)
    sums = img.pixels.reshape(-1, 3).astype(np.float64).copy()
    factor = (_SRM_G**2) * math.log(6.0 * n * n) / (2.0 * params.q)
    roots = _srm_merge_kernel(src, dst, sums, n, factor)
    norm = normalize_labels(roots.reshape(img.height, img.width))
    return _merge_small_regions(norm, img, params.min_region_frac)


def segment_graph(img: RasterImage, params: GraphParams) -> LabelImage:
    """Graph-based merging with the adaptive threshold tau(C) = k/|C|.

    Edges (max-channel weight) are processed ascending; components
    merge while the crossing weight does not exceed
    min(Int(C1) + k/|C1|, Int(C2) + k/|C2|) where Int is the largest
    weight so far merged inside the component (its MST bottleneck).
    """
    n = img.width * img.height
    src, dst, weights = _sorted_edges(img)
    roots = _graph_merge_kernel(src, dst, weights, n, params.k)
    norm = normalize_labels(roots.reshape(img.height, img.width))
    return _merge_small_regions(norm, img, params.min_region_frac)


# --- CSC -------------------------------------------------------------------


def _hex_neighbors(x: int, y: int, w: int, h: int):
    """Neighbors on the orthogonal lattice with odd rows shifted half a
    unit to the left (6-connected hexagonal adjacency)."""
    if y % 2 == 0:
        cand = ((x - 1, y), (x + 1, y), (x, y - 1), (x + 1, y - 1), (x, y + 1), (x + 1, y + 1))
    else:
        cand = ((x - 1, y), (x + 1, y), (x - 1, y - 1), (x, y - 1), (x - 1, y + 1), (x, y + 1))
    return [(cx, cy) for cx, cy in cand if 0 <= cx < w and 0 <= cy < h]


def _island_grid(w: int, h: int):
    """Island centers and members for one linking level over a w x h grid.

    Centers sit on every second row; their columns alternate offset
    between center rows so adjacent islands overlap in exactly one
    cell.  Islands are clipped at the borders (partial islands); an
    extra column on shifted rows and, for even heights, an extra
    phantom center row below the grid keep every adjacent cell pair
    inside some common island.  Returns (rows, grid_w, grid_h) where
    rows[j][i] is the member list of island (i, j) on the island grid.
    """
    rows = []
    for j, y in enumerate(range(0, h + 1, 2)):
        offset = 0 if j % 2 == 0 else -1
        row = []
        for x in range(offset, w, 2):
            members = []
            if 0 <= x < w and y < h:
                members.append((x, y))
            members.extend(_hex_neighbors(x, y, w, h))
            row.append(members)
        rows.append(row)
    grid_h = len(rows)
    grid_w = max(len(r) for r in rows)
    return rows, grid_w, grid_h


def segment_csc(img: RasterImage, params: CscParams) -> LabelImage:
    """Color structure coding on the shifted hexagonal island topology.

    Pixels similar within a level-0 island (Euclidean RGB distance at
    most the threshold, chained over hex adjacency) form code elements;
    elements that share pixels are linked and merge level by level up
    the island hierarchy while their running means stay similar.
    Pixels claimed by two surviving elements go to the closer mean.
    """
    w, h = img.width, img.height
    px = img.pixels.astype(np.float64)
    thr2 = params.threshold * params.threshold

    # level-0 islands over the pixel grid
    rows, grid_w, grid_h = _island_grid(w, h)

    elem_sum: list[np.ndarray] = []
    elem_size: list[int] = []
    elem_island: list[int] = []
    parent: list[int] = []

    def find(e: int) -> int:
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    # pixel -> (up to 2) owning level-0 elements
    pix_elems: list[list[int]] = [[] for _ in range(w * h)]
    # island index on the level-1 grid -> element ids created inside it
    island_elems: list[list[int]] = []
    island_index: dict[tuple[int, int], int] = {}

    for j, row in enumerate(rows):
        for i, members in enumerate(row):
            isl = len(island_elems)
            island_index[(i, j)] = isl
            created: list[int] = []
            member_set = set(members)
            seen: set[tuple[int, int]] = set()
            for start in members:
                if start in seen:
                    continue
                # region-grow one code element inside the island
                eid = len(parent)
                parent.append(eid)
                acc = np.zeros(3)
                cnt = 0
                stack = [start]
                seen.add(start)
                while stack:
                    cx, cy = stack.pop()
                    acc += px[cy, cx]
                    cnt += 1
                    pix_elems[cy * w + cx].append(eid)
                    for nb in _hex_neighbors(cx, cy, w, h):
                        if nb in member_set and nb not in seen:
                            d = px[cy, cx] - px[nb[1], nb[0]]
                            if float(d @ d) <= thr2:
                                seen.add(nb)
                                stack.append(nb)
                elem_sum.append(acc)
                elem_size.append(cnt)
                elem_island.append(isl)
                created.append(eid)
            island_elems.append(created)

    # overlap registry: pixels belonging to two islands link their elements
    overlaps_by_island: list[list[tuple[int, int, int]]] = [[] for _ in island_elems]
    for p, owners in enumerate(pix_elems):
        if len(owners) == 2:
            ea, eb = owners
            ia, ib = elem_island[ea], elem_island[eb]
            lo = ia if ia <= ib else ib
            hi = ib if ia <= ib else ia
            overlaps_by_island[lo].append((hi, ea, eb))

    def try_merge(ea: int, eb: int) -> None:
        ra, rb = find(ea), find(eb)
        if ra == rb:
            return
        ma = elem_sum[ra] / elem_size[ra]
        mb = elem_sum[rb] / elem_size[rb]
        d = ma - mb
        if float(d @ d) <= thr2:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra
            elem_sum[ra] = elem_sum[ra] + elem_sum[rb]
            elem_size[ra] += elem_size[rb]

    # linking phase: walk the island hierarchy bottom-up; at each level an
    # island's linked (pixel-sharing) elements merge when their means pass
    # the threshold.  cur_cells[g] holds the level-0 island ids under grid
    # cell g (row-major; short rows padded with empty cells).
    cur_w, cur_h = grid_w, grid_h
    cur_cells: list[list[int]] = []
    for j in range(grid_h):
        for i in range(cur_w):
            if i < len(rows[j]):
                cur_cells.append([island_index[(i, j)]])
            else:
                cur_cells.append([])

    def run_level(cells: list[list[int]]) -> None:
        for leaf_list in cells:
            if not leaf_list:
                continue
            leafset = set(leaf_list)
            for a in sorted(leafset):
                for b, ea, eb in overlaps_by_island[a]:
                    if b in leafset:
                        try_merge(ea, eb)

    while cur_w > 1 or cur_h > 1:
        groups, next_w, next_h = _group_grid(cur_w, cur_h)
        next_cells = []
        for members in groups:
            merged: list[int] = []
            seen_isl: set[int] = set()
            for gx, gy in members:
                for leaf in cur_cells[gy * cur_w + gx]:
                    if leaf not in seen_isl:
                        seen_isl.add(leaf)
                        merged.append(leaf)
            next_cells.append(merged)
        run_level(next_cells)
        cur_cells, cur_w, cur_h = next_cells, next_w, next_h

    # top island spans everything: one final global pass catches links the
    # clipped border islands may have deferred
    run_level([sorted({leaf for cell in cur_cells for leaf in cell})])

    # pixel assignment; two surviving claimants resolve by mean distance
    out = np.empty((h, w), dtype=np.int64)
    for p in range(w * h):
        owners = pix_elems[p]
        r0 = find(owners[0])
        if len(owners) == 1:
            out[p // w, p % w] = r0
            continue
        r1 = find(owners[1])
        if r0 == r1:
            out[p // w, p % w] = r0
            continue
        color = px[p // w, p % w]
        d0 = color - elem_sum[r0] / elem_size[r0]
        d1 = color - elem_sum[r1] / elem_size[r1]
        q0, q1 = float(d0 @ d0), float(d1 @ d1)
        if q0 < q1 or (q0 == q1 and r0 < r1):
            out[p // w, p % w] = r0
        else:
            out[p // w, p % w] = r1
    return normalize_labels(out)


def _group_grid(gw: int, gh: int):
    """Group a gw x gh island grid into next-level islands with the same
    shifted-row scheme used for pixels.  Returns a row-major cell list
    padded to uniform width (padding cells have no members)."""
    rows_out: list[list[list[tuple[int, int]]]] = []
    for j, y in enumerate(range(0, gh, 2)):
        offset = 0 if j % 2 == 0 else -1
        row: list[list[tuple[int, int]]] = []
        for x in range(offset, gw, 2):
            members = []
            if 0 <= x < gw:
                members.append((x, y))
            members.extend(_hex_neighbors(x, y, gw, gh))
            row.append(members)
        rows_out.append(row)
    out_h = len(rows_out)
    out_w = max(len(r) for r in rows_out)
    cells: list[list[tuple[int, int]]] = []
    for row in rows_out:
        cells.extend(row)
        cells.extend([[]] * (out_w - len(row)))
    return cells, out_w, out_h
