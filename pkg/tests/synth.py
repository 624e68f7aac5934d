"""Synthetic handwriting-like page generator for end-to-end tests.

Pages are 1000x1400 (so the pipeline's width normalization is a no-op and
boxes stay exact).  Each page plants k horizontal rows of "words" built from
thin vertical strokes, optionally capped by a matra-style connector stroke
that floats one pixel above the bodies, plus optional circle bridges that
join consecutive rows.  Every word in a row shares the same vertical extent,
which keeps one midpoint height per row and makes the expected clustering
unambiguous.

Ground truth is the ink bounding box of each row, excluding bridge ink.
"""

from dataclasses import dataclass

import numpy as np

PAGE_W = 1000
PAGE_H = 1400
MARGIN_X = 70
MARGIN_Y = 50

# pipeline settings calibrated on these pages: vote thresholds match the
# synthetic stroke density, the circle radius range brackets the planted
# bridges, and the erase stroke is thick enough to cut their ring cleanly
TUNED_CONFIG = {
    "matra_thickness": 5,
    "circle_r_min": 18,
    "circle_r_max": 60,
    "circle_votes_min": 300,
    "circle_erase_thickness": 10,
    "line_votes_min": 40,
    "line_min_len": 40.0,
    "line_max_gap": 5.0,
    "box_min_area": 40.0,
}


@dataclass
class SynthPage:
    image: np.ndarray          # uint8, 255 background, 0 ink
    boxes: list                # one (x_min, y_min, x_max, y_max) per row
    k: int
    has_matra: bool
    bridges: list              # (cx, cy, radius) per planted bridge


def _draw_row(ink, rng, y_top, row_h, with_matra):
    """One row of words.  Returns the row's ink bounding box."""
    x = MARGIN_X + int(rng.integers(0, 30))
    x_min = x
    x_max = x
    words = 0
    right_limit = PAGE_W - MARGIN_X
    while True:
        word_w = int(rng.integers(50, 130))
        if x + word_w > right_limit and words >= 5:
            break
        word_w = min(word_w, right_limit - x)
        if word_w < 45:
            break
        if with_matra:
            # connector bar across the word top; the line-reinforcement
            # stage redraws it thicker, which must not disturb clustering
            ink[y_top : y_top + 2, x : x + word_w] = 1
            body_top = y_top + 2
        else:
            body_top = y_top
        sx = x
        while sx <= x + word_w - 4:
            sw = int(rng.integers(3, 5))
            # all strokes in a row span the same rows: one midpoint height
            # per row, so the expected clustering is unambiguous
            ink[body_top : y_top + row_h, sx : sx + sw] = 1
            sx += sw + int(rng.integers(6, 16))
        x_max = x + word_w - 1
        x += word_w + int(rng.integers(18, 36))
        words += 1
        if x >= right_limit - 45:
            break
    return (x_min, y_top, x_max, y_top + row_h - 1)


DESCENDER = 9


def _plant_bridge(ink, rng, box_above, box_below):
    """Circle bridging two consecutive rows through short descender strokes.

    A descender hangs from a stroke of the upper row and another rises from
    the lower row at the same column; the circle is tangent to both tips with
    a two-pixel overlap.  The rows become one connected component through the
    chain row-descender-circle-descender-row.  The descenders keep the later
    annulus erasure away from the row ink itself.  Returns (cx, cy, r) or
    None when the rows share no stroke column.
    """
    y_lo = box_above[3]
    y_hi = box_below[1]
    x_min = max(box_above[0], box_below[0]) + 15
    x_max = min(box_above[2], box_below[2]) - 15
    cols = [
        x for x in range(x_min, x_max)
        if ink[y_lo, x - 1 : x + 2].any() and ink[y_hi, x - 1 : x + 2].any()
    ]
    if not cols:
        return None
    cx = int(cols[rng.integers(0, len(cols))])
    ink[y_lo + 1 : y_lo + 1 + DESCENDER, cx - 1 : cx + 2] = 1
    ink[y_hi - DESCENDER : y_hi, cx - 1 : cx + 2] = 1
    cy = (y_lo + y_hi) / 2.0
    r = cy - (y_lo + DESCENDER) + 2.0
    yy, xx = np.mgrid[0:PAGE_H, 0:PAGE_W]
    d = np.hypot(xx - cx, yy - cy)
    # 4-5 px wide so the pipeline's opening step cannot chop the diagonal
    # stretches of the rasterized ring
    ink[np.abs(d - r) <= 2.0] = 1
    return (cx, cy, r)


def make_page(seed):
    """Deterministic page for the given seed."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 13))
    ink = np.zeros((PAGE_H, PAGE_W), np.uint8)

    usable = PAGE_H - 2 * MARGIN_Y
    # row gap of 3x height or more; height shrinks to make tall pages fit
    row_h = min(34, int(usable / (4.8 * k)))
    row_h = max(row_h, 20)
    # matra and bridges are exercised on separate pages so each page's
    # expected geometry stays easy to state
    want_bridge = k >= 3 and rng.integers(0, 3) == 0
    has_matra = not want_bridge and bool(rng.integers(0, 2))

    boxes = []
    y = MARGIN_Y + int(rng.integers(0, 25))
    for _ in range(k):
        boxes.append(_draw_row(ink, rng, y, row_h, has_matra))
        gap = int(row_h * rng.uniform(3.0, 3.6))
        y += row_h + gap
    word_ink = ink.copy()

    bridges = []
    if want_bridge:
        pairs = list(range(k - 1))
        rng.shuffle(pairs)
        for idx in pairs[: max(1, k // 4)]:
            hit = _plant_bridge(ink, rng, boxes[idx], boxes[idx + 1])
            if hit is not None:
                bridges.append(hit)

    # ground truth from word ink only (bridge ink excluded by construction)
    gt = []
    for x_min, y_top, x_max, y_bot in boxes:
        sub = word_ink[y_top : y_bot + 1, x_min : x_max + 1]
        ys, xs = np.nonzero(sub)
        gt.append((x_min + int(xs.min()), y_top + int(ys.min()),
                   x_min + int(xs.max()), y_top + int(ys.max())))

    page = np.where(ink > 0, 0, 255).astype(np.uint8)
    return SynthPage(image=page, boxes=gt, k=k, has_matra=has_matra, bridges=bridges)
