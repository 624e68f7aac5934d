"""Connected components, bounding boxes, and area filtering."""

import numpy as np
import pytest
from conftest import bimg
from oracles import label_brute

from lineseg.components import (
    BoundingBox,
    extract_boxes,
    find_components,
    label_components,
)
from lineseg.errors import ParameterError


class TestBoundingBox:
    def test_degenerate_rejected(self):
        with pytest.raises(ParameterError):
            BoundingBox(5, 0, 4, 0)

    def test_area_and_midpoint(self):
        box = BoundingBox(5, 5, 14, 14)
        assert box.area == 100
        assert box.midpoint == (9.5, 9.5)

    def test_single_pixel_box(self):
        box = BoundingBox(3, 7, 3, 7)
        assert box.area == 1
        assert box.midpoint == (3.0, 7.0)

    def test_union(self):
        a = BoundingBox(0, 0, 4, 4)
        b = BoundingBox(3, 2, 9, 6)
        assert a.union(b) == BoundingBox(0, 0, 9, 6)

    def test_intersection_area(self):
        a = BoundingBox(0, 0, 4, 4)
        b = BoundingBox(3, 3, 7, 7)
        assert a.intersection_area(b) == 4
        assert b.intersection_area(a) == 4
        assert a.intersection_area(BoundingBox(5, 5, 6, 6)) == 0


class TestLabelComponents:
    def test_all_background(self):
        labels, count = label_components(bimg(np.zeros((4, 4))))
        assert count == 0
        assert np.all(labels == 0)

    def test_diagonal_connectivity_semantics(self):
        img = np.zeros((3, 3))
        img[0, 0] = img[1, 1] = 1
        _, count4 = label_components(bimg(img), connectivity=4)
        _, count8 = label_components(bimg(img), connectivity=8)
        assert count4 == 2
        assert count8 == 1

    def test_bad_connectivity(self):
        with pytest.raises(ParameterError):
            label_components(bimg(np.zeros((2, 2))), connectivity=6)

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_flood_fill_sample(self, connectivity):
        rng = np.random.default_rng(100 + connectivity)
        for _ in range(30):
            h, w = int(rng.integers(1, 17)), int(rng.integers(1, 17))
            img = (rng.random((h, w)) < rng.uniform(0.3, 0.7)).astype(np.uint8)
            labels, count = label_components(bimg(img), connectivity)
            ref_labels, ref_count = label_brute(img, connectivity)
            assert count == ref_count
            np.testing.assert_array_equal(labels, ref_labels)

    def test_pixel_counts_partition_foreground(self):
        rng = np.random.default_rng(3)
        img = (rng.random((24, 24)) < 0.5).astype(np.uint8)
        cs = find_components(bimg(img), min_area=0)
        assert sum(cs.pixel_counts) == int(img.sum())


class TestExtractBoxes:
    def test_single_block(self):
        img = np.zeros((20, 20))
        img[5:15, 5:15] = 1
        labels, count = label_components(bimg(img))
        cs = extract_boxes(labels, count, min_area=0)
        assert len(cs) == 1
        assert cs.boxes[0] == BoundingBox(5, 5, 14, 14)
        assert cs.boxes[0].midpoint == (9.5, 9.5)

    def test_small_speck_dropped(self):
        img = np.zeros((10, 10))
        img[2, 2:4] = 1  # 2-pixel speck, bbox area 2
        labels, count = label_components(bimg(img))
        cs = extract_boxes(labels, count, min_area=25)
        assert len(cs) == 0

    def test_planted_rectangles_recovered(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            img = np.zeros((60, 60))
            planted = []
            # disjoint cells on a 3x3 grid, each maybe holding a rectangle
            for gy in range(3):
                for gx in range(3):
                    if rng.random() < 0.3:
                        continue
                    y0 = gy * 20 + int(rng.integers(1, 6))
                    x0 = gx * 20 + int(rng.integers(1, 6))
                    hgt = int(rng.integers(2, 12))
                    wid = int(rng.integers(2, 12))
                    y1 = min(y0 + hgt, gy * 20 + 18)
                    x1 = min(x0 + wid, gx * 20 + 18)
                    img[y0 : y1 + 1, x0 : x1 + 1] = 1
                    planted.append(BoundingBox(x0, y0, x1, y1))
            labels, count = label_components(bimg(img))
            cs = extract_boxes(labels, count, min_area=0)
            assert sorted(cs.boxes, key=lambda b: (b.y_min, b.x_min)) == sorted(
                planted, key=lambda b: (b.y_min, b.x_min)
            )

    def test_monotone_in_min_area(self):
        rng = np.random.default_rng(53)
        img = (rng.random((32, 32)) < 0.45).astype(np.uint8)
        labels, count = label_components(bimg(img))
        sizes = [len(extract_boxes(labels, count, min_area=a)) for a in (0, 2, 5, 9, 20)]
        assert sizes == sorted(sizes, reverse=True)

    def test_midpoints_within_bounds(self):
        rng = np.random.default_rng(67)
        img = (rng.random((32, 32)) < 0.4).astype(np.uint8)
        cs = find_components(bimg(img), min_area=0)
        for box in cs.boxes:
            cx, cy = box.midpoint
            assert box.x_min <= cx <= box.x_max
            assert box.y_min <= cy <= box.y_max

    def test_area_mode_pixels(self):
        # an L-shape: 5 pixels, bbox area 9
        img = np.zeros((6, 6))
        img[1:4, 1] = 1
        img[3, 1:4] = 1
        labels, count = label_components(bimg(img))
        assert len(extract_boxes(labels, count, min_area=6, area_mode="bbox")) == 1
        assert len(extract_boxes(labels, count, min_area=6, area_mode="pixels")) == 0

    def test_bad_area_mode(self):
        labels, count = label_components(bimg(np.zeros((2, 2))))
        with pytest.raises(ParameterError):
            extract_boxes(labels, count, area_mode="volume")

    def test_relative_default_floor(self):
        # 100x100 image: default floor is 5e-5 * 10000 = 0.5, so single
        # pixels (area 1) survive the default
        img = np.zeros((100, 100))
        img[50, 50] = 1
        cs = find_components(bimg(img))
        assert len(cs) == 1
        assert cs.min_area_used == pytest.approx(0.5)
