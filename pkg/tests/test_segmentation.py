import math

import numpy as np
import pytest

from conftest import blobs_image, flood_regions, gray_image, raster
from vectorforge.segmentation import (
    CscParams,
    GraphParams,
    SrmParams,
    normalize_labels,
    segment_csc,
    segment_graph,
    segment_srm,
)

PERMISSIVE_CSC = 255.0 * math.sqrt(3.0) + 1.0


def _invariants_ok(labels):
    used = np.unique(labels.labels)
    if not np.array_equal(used, np.arange(labels.region_count)):
        return False
    return flood_regions(labels.labels) == labels.region_count


# --- normalize_labels --------------------------------------------------------


def test_normalize_relabels_contiguously():
    out = normalize_labels(np.array([[5, 5], [9, 9]]))
    assert np.array_equal(out.labels, [[0, 0], [1, 1]])
    assert out.region_count == 2


def test_normalize_splits_diagonal_components():
    out = normalize_labels(np.array([[1, 2], [2, 1]]))
    assert out.region_count == 4
    assert np.array_equal(out.labels, [[0, 1], [2, 3]])


def test_normalize_identity_on_single_region():
    out = normalize_labels(np.array([[0, 0], [0, 0]]))
    assert np.array_equal(out.labels, [[0, 0], [0, 0]])
    assert out.region_count == 1


def test_normalize_matches_flood_fill_oracle():
    rng = np.random.RandomState(2)
    for _ in range(50):
        arr = rng.randint(0, 4, (rng.randint(1, 9), rng.randint(1, 9)))
        out = normalize_labels(arr)
        assert out.region_count == flood_regions(arr)
        assert _invariants_ok(out)


# --- SRM ---------------------------------------------------------------------


def test_srm_uniform_image_single_region():
    for q in (0.5, 32.0, 1000.0):
        out = segment_srm(gray_image(8, 8, 77), SrmParams(q=q))
        assert out.region_count == 1


def test_srm_two_tone_halves_q32():
    # b(8px) = 256 sqrt(ln(6*256)/(2*32*8)) ~ 30.6; cross bound ~ 43.3 < 255
    arr = np.zeros((4, 4, 3), dtype=np.uint8)
    arr[:, 2:] = 255
    out = segment_srm(raster(arr), SrmParams(q=32, min_region_frac=0.0))
    assert out.region_count == 2


def test_srm_tiny_q_merges_everything():
    arr = np.zeros((1, 2, 3), dtype=np.uint8)
    arr[0, 1] = 1
    out = segment_srm(raster(arr), SrmParams(q=0.1, min_region_frac=0.0))
    assert out.region_count == 1


def test_srm_param_validation():
    with pytest.raises(ValueError):
        SrmParams(q=0)
    with pytest.raises(ValueError):
        SrmParams(q=1, min_region_frac=1.5)


# --- graph -------------------------------------------------------------------


def test_graph_uniform_image_single_region():
    out = segment_graph(gray_image(6, 5, 10), GraphParams(k=1))
    assert out.region_count == 1


def test_graph_1x4_hand_run():
    arr = np.zeros((1, 4, 3), dtype=np.uint8)
    arr[0, 2:] = 100
    img = raster(arr)
    # k=50: MInt = min(0 + 50/2, 0 + 50/2) = 25 < 100, boundary survives
    assert segment_graph(img, GraphParams(k=50, min_region_frac=0.0)).region_count == 2
    # k=300: MInt = 150 >= 100, halves merge
    assert segment_graph(img, GraphParams(k=300, min_region_frac=0.0)).region_count == 1


def test_graph_deterministic():
    img = blobs_image(12, 9, seed=5)
    a = segment_graph(img, GraphParams(k=100))
    b = segment_graph(img, GraphParams(k=100))
    assert np.array_equal(a.labels, b.labels)


def test_graph_region_count_monotone_in_k():
    rng = np.random.RandomState(3)
    img = raster(rng.randint(0, 256, (16, 16, 3)).astype(np.uint8))
    counts = [
        segment_graph(img, GraphParams(k=k, min_region_frac=0.0)).region_count
        for k in (10, 50, 200, 1000, 5000)
    ]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_small_region_post_merge():
    arr = np.full((10, 10, 3), 100, dtype=np.uint8)
    arr[5, 5] = 200
    img = raster(arr)
    assert segment_graph(img, GraphParams(k=50, min_region_frac=0.0)).region_count == 2
    assert segment_graph(img, GraphParams(k=50, min_region_frac=0.02)).region_count == 1


# --- CSC ---------------------------------------------------------------------


def test_csc_uniform_image_single_region():
    assert segment_csc(gray_image(13, 9, 50), CscParams(threshold=1.0)).region_count == 1


def test_csc_two_tone_halves():
    arr = np.zeros((8, 8, 3), dtype=np.uint8)
    arr[:, 4:] = 255
    out = segment_csc(raster(arr), CscParams(threshold=100.0))
    assert out.region_count == 2
    want = normalize_labels((arr[:, :, 0] > 0).astype(int))
    assert np.array_equal(out.labels, want.labels)


def test_csc_zero_threshold_equals_connected_components():
    rng = np.random.RandomState(7)
    for _ in range(40):
        w, h = rng.randint(1, 12), rng.randint(1, 12)
        arr = (rng.randint(0, 3, (h, w, 1)).repeat(3, axis=2) * 100).astype(np.uint8)
        got = segment_csc(raster(arr), CscParams(threshold=0.0))
        want = normalize_labels(arr[:, :, 0].astype(int))
        assert np.array_equal(got.labels, want.labels)


def test_csc_param_validation():
    with pytest.raises(ValueError):
        CscParams(threshold=-1)


# --- cross-segmenter properties ---------------------------------------------


def test_all_segmenters_satisfy_label_invariants():
    rng = np.random.RandomState(11)
    for seed in range(6):
        img = blobs_image(rng.randint(2, 10), rng.randint(2, 10), seed=seed, n=4)
        for out in (
            segment_srm(img, SrmParams(q=64)),
            segment_graph(img, GraphParams(k=80)),
            segment_csc(img, CscParams(threshold=30)),
        ):
            assert _invariants_ok(out)


def test_permissive_extremes_single_region():
    rng = np.random.RandomState(13)
    for seed in range(3):
        img = raster(rng.randint(0, 256, (16, 16, 3)).astype(np.uint8))
        assert segment_srm(img, SrmParams(q=1e-9)).region_count == 1
        assert segment_graph(img, GraphParams(k=1e9)).region_count == 1
        assert segment_csc(img, CscParams(threshold=PERMISSIVE_CSC)).region_count == 1
