"""Shared helpers: deterministic image builders and brute-force oracles."""

from __future__ import annotations

from collections import deque

import numpy as np

from vectorforge import RasterImage, normalize_labels
from vectorforge.segmentation import LabelImage


def raster(arr) -> RasterImage:
    return RasterImage.from_array(np.asarray(arr, dtype=np.uint8))


def gray_image(w: int, h: int, value: int) -> RasterImage:
    return raster(np.full((h, w, 3), value, dtype=np.uint8))


def labels_from(rows) -> LabelImage:
    return normalize_labels(np.asarray(rows, dtype=np.int64))


def blobs_image(w: int, h: int, seed: int, n: int = 6) -> RasterImage:
    """Nearest-seed (Voronoi) coloring: structured regions with junctions."""
    rng = np.random.RandomState(seed)
    n = min(n, w * h)
    sx = rng.randint(0, w, n)
    sy = rng.randint(0, h, n)
    cols = rng.randint(0, 256, (n, 3))
    yy, xx = np.mgrid[0:h, 0:w]
    d = (xx[..., None] - sx) ** 2 + (yy[..., None] - sy) ** 2
    return raster(cols[d.argmin(axis=2)].astype(np.uint8))


def random_label_image(rng: np.random.RandomState, max_side: int = 8, max_labels: int = 4):
    w = rng.randint(1, max_side + 1)
    h = rng.randint(1, max_side + 1)
    return normalize_labels(rng.randint(0, max_labels, (h, w)))


# --- literal evaluations of the subpixel boundary definitions ---------------


def edges_oracle(labels: LabelImage) -> np.ndarray:
    lab = labels.labels
    hs, ws = 2 * labels.height - 1, 2 * labels.width - 1
    s = np.zeros((hs, ws), dtype=bool)
    for y in range(hs):
        for x in range(ws):
            if x % 2 == 1 and y % 2 == 0:
                s[y, x] = lab[y // 2, (x + 1) // 2] != lab[y // 2, (x - 1) // 2]
            elif x % 2 == 0 and y % 2 == 1:
                s[y, x] = lab[(y + 1) // 2, x // 2] != lab[(y - 1) // 2, x // 2]
    return s


def gaps_oracle(s: np.ndarray) -> np.ndarray:
    out = s.copy()
    hs, ws = s.shape
    for y in range(1, hs - 1, 2):
        for x in range(1, ws - 1, 2):
            if (s[y, x + 1] and s[y, x - 1]) or (s[y + 1, x] and s[y - 1, x]):
                out[y, x] = True
    return out


def junctions_oracle(s: np.ndarray) -> np.ndarray:
    hs, ws = s.shape
    j = np.zeros_like(s)
    for y in range(1, hs - 1, 2):
        for x in range(1, ws - 1, 2):
            total = int(s[y, x + 1]) + int(s[y, x - 1]) + int(s[y + 1, x]) + int(s[y - 1, x])
            j[y, x] = total > 2
    return j


def flood_regions(arr: np.ndarray) -> int:
    """4-connected components of equal values (independent of the
    union-find implementation under test)."""
    h, w = arr.shape
    seen = np.zeros((h, w), dtype=bool)
    count = 0
    for sy in range(h):
        for sx in range(w):
            if seen[sy, sx]:
                continue
            count += 1
            q = deque([(sx, sy)])
            seen[sy, sx] = True
            v = arr[sy, sx]
            while q:
                x, y = q.popleft()
                for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                    if 0 <= nx < w and 0 <= ny < h and not seen[ny, nx] and arr[ny, nx] == v:
                        seen[ny, nx] = True
                        q.append((nx, ny))
    return count


def region_loop_count_oracle(labels: LabelImage) -> int:
    """Total boundary loops over all regions: one outer loop per region
    plus one per enclosed hole (8-connected complement component not
    reaching the image border)."""
    lab = labels.labels
    h, w = lab.shape
    total = 0
    for r in range(labels.region_count):
        comp = lab != r
        seen = np.zeros_like(comp)
        q: deque = deque()
        for x in range(w):
            for y in (0, h - 1):
                if comp[y, x] and not seen[y, x]:
                    seen[y, x] = True
                    q.append((x, y))
        for y in range(h):
            for x in (0, w - 1):
                if comp[y, x] and not seen[y, x]:
                    seen[y, x] = True
                    q.append((x, y))
        while q:
            x, y = q.popleft()
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    nx, ny = x + dx, y + dy
                    if 0 <= nx < w and 0 <= ny < h and comp[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        q.append((nx, ny))
        holes = 0
        rem = comp & ~seen
        while rem.any():
            holes += 1
            ys, xs = np.nonzero(rem)
            q.append((int(xs[0]), int(ys[0])))
            rem[ys[0], xs[0]] = False
            while q:
                x, y = q.popleft()
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        nx, ny = x + dx, y + dy
                        if 0 <= nx < w and 0 <= ny < h and rem[ny, nx]:
                            rem[ny, nx] = False
                            q.append((nx, ny))
        total += 1 + holes
    return total
