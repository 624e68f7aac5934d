"""Shared helpers for the test suite."""

import numpy as np

from lineseg.components import BoundingBox
from lineseg.raster import BinaryImage, RasterImage

# verdict lines queued by test_acceptance.py; replayed after the run so
# they stay visible even under pytest's output capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def bimg(rows) -> BinaryImage:
    return BinaryImage(np.asarray(rows, dtype=np.uint8))


def rimg(rows) -> RasterImage:
    return RasterImage(np.asarray(rows, dtype=np.uint8))


def random_box(rng, width, height, max_side=None) -> BoundingBox:
    """Uniform random box fully inside a width x height image."""
    max_w = width if max_side is None else min(width, max_side)
    max_h = height if max_side is None else min(height, max_side)
    w = int(rng.integers(1, max_w + 1))
    h = int(rng.integers(1, max_h + 1))
    x0 = int(rng.integers(0, width - w + 1))
    y0 = int(rng.integers(0, height - h + 1))
    return BoundingBox(x0, y0, x0 + w - 1, y0 + h - 1)


def jittered_box(rng, box, width, height, max_shift) -> BoundingBox:
    """Randomly shifted/resized copy of box, clamped to the image."""
    def wiggle(v, lo, hi):
        nv = v + int(rng.integers(-max_shift, max_shift + 1))
        return min(max(nv, lo), hi)

    x0 = wiggle(box.x_min, 0, width - 1)
    y0 = wiggle(box.y_min, 0, height - 1)
    x1 = wiggle(box.x_max, 0, width - 1)
    y1 = wiggle(box.y_max, 0, height - 1)
    if x1 < x0:
        x0, x1 = x1, x0
    if y1 < y0:
        y0, y1 = y1, y0
    return BoundingBox(x0, y0, x1, y1)
