"""Hough transforms for near-horizontal strokes and circular loops."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ParameterError
from .raster import BinaryImage, filter2, gaussian_kernel, sobel_gradients


@dataclass(frozen=True)
class LineSegmentHit:
    """One detected collinear segment: pixel endpoints plus its (rho, theta)
    bin and the number of supporting pixels."""

    x1: int
    y1: int
    x2: int
    y2: int
    votes: int
    rho: float
    theta: float

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)


@dataclass(frozen=True)
class CircleHit:
    cx: int
    cy: int
    radius: float
    votes: int


def _theta_grid(center: float, window: float, resolution: float) -> np.ndarray:
    if resolution <= 0:
        raise ParameterError("theta resolution must be positive")
    if window < 0:
        raise ParameterError("theta window must be non-negative")
    n_side = int(math.floor(window / resolution + 1e-9))
    return center + np.arange(-n_side, n_side + 1, dtype=np.float64) * resolution


def hough_lines(
    edges: BinaryImage,
    rho_res: float = 1.0,
    theta_res: float = math.pi / 180.0,
    votes_min: int = 80,
    min_len: float = 50.0,
    max_gap: float = 10.0,
    theta_window: float = math.radians(5.0),
    theta_center: float = math.pi / 2.0,
) -> list[LineSegmentHit]:
    """Probabilistic-style line segment detection around theta_center.

    Accumulator peaks are visited in order of descending votes (ties toward
    smaller rho then theta index).  Each peak's surviving supporters are
    sorted along the line direction and split at projected gaps wider than
    max_gap; a run is accepted when it spans at least min_len and contains
    at least votes_min pixels, and accepted pixels cannot support later
    peaks.  The default window finds near-horizontal strokes; a window of
    pi/2 searches all orientations.
    """
    if rho_res <= 0:
        raise ParameterError("rho_res must be positive")
    if votes_min < 1:
        raise ParameterError("votes_min must be at least 1")
    if min_len < 0 or max_gap < 0:
        raise ParameterError("min_len and max_gap must be non-negative")

    ys, xs = np.nonzero(edges.data)
    if len(ys) == 0:
        return []
    ys = ys.astype(np.int64)
    xs = xs.astype(np.int64)

    thetas = _theta_grid(theta_center, theta_window, theta_res)
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    diag = math.hypot(edges.width - 1, edges.height - 1)
    n_rho = int(math.floor(2.0 * diag / rho_res + 0.5)) + 1
    acc = K.hough_line_accumulate(ys, xs, cos_t, sin_t, float(rho_res), diag, n_rho)

    t_idx, r_idx = np.nonzero(acc >= votes_min)
    if len(t_idx) == 0:
        return []
    votes = acc[t_idx, r_idx]
    order = np.lexsort((t_idx, r_idx, -votes))

    alive = np.ones(len(ys), dtype=bool)
    xf = xs.astype(np.float64)
    yf = ys.astype(np.float64)
    hits = []
    for b in order:
        ti, ri = int(t_idx[b]), int(r_idx[b])
        c, s = cos_t[ti], sin_t[ti]
        rho_bin = ri * rho_res - diag
        near = np.abs(xf * c + yf * s - rho_bin) <= rho_res / 2.0
        support = np.nonzero(near & alive)[0]
        if len(support) < votes_min:
            continue
        # project onto the line direction (-sin, cos) and walk the runs
        proj = -xf[support] * s + yf[support] * c
        sort_i = np.argsort(proj, kind="stable")
        support = support[sort_i]
        proj = proj[sort_i]
        breaks = np.nonzero(np.diff(proj) > max_gap)[0]
        run_starts = np.concatenate(([0], breaks + 1))
        run_ends = np.concatenate((breaks + 1, [len(proj)]))
        for a, e in zip(run_starts, run_ends):
            n_pix = e - a
            length = proj[e - 1] - proj[a]
            if n_pix < votes_min or length < min_len:
                continue
            first, last = support[a], support[e - 1]
            hits.append(
                LineSegmentHit(
                    x1=int(xs[first]),
                    y1=int(ys[first]),
                    x2=int(xs[last]),
                    y2=int(ys[last]),
                    votes=int(n_pix),
                    rho=float(rho_bin),
                    theta=float(thetas[ti]),
                )
            )
            alive[support[a:e]] = False
    return hits


def reinforce_matra(
    image: BinaryImage, hits: list[LineSegmentHit], thickness: int = 3
) -> BinaryImage:
    """Stamp each hit back onto the mask as a square brush of the given
    thickness, thickening headstrokes so the words they join become single
    components.  The result is a superset of the input mask."""
    if thickness < 1:
        raise ParameterError("thickness must be at least 1")
    h, w = image.height, image.width
    out = image.data.copy()
    r = thickness // 2
    for hit in hits:
        for x, y in _bresenham(hit.x1, hit.y1, hit.x2, hit.y2):
            y0, y1 = max(0, y - r), min(h, y + r + 1)
            x0, x1 = max(0, x - r), min(w, x + r + 1)
            out[y0:y1, x0:x1] = 1
    return BinaryImage(out)


def _bresenham(x1, y1, x2, y2):
    dx = abs(x2 - x1)
    dy = -abs(y2 - y1)
    sx = 1 if x1 < x2 else -1
    sy = 1 if y1 < y2 else -1
    err = dx + dy
    x, y = x1, y1
    while True:
        yield x, y
        if x == x2 and y == y2:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def hough_circles(
    image: BinaryImage,
    r_min: int = 8,
    r_max: int = 40,
    votes_min: int = 40,
    center_min_dist: float = 20.0,
    sigma: float = 1.4,
) -> list[CircleHit]:
    """Gradient-direction circle detection on a binary mask.

    Contour pixels (gradient crests, thinned by non-maximum suppression so a
    smoothed edge votes once rather than once per ramp pixel) vote for centers
    along both gradient directions at every candidate radius.  The vote map is
    pooled over 3x3 neighborhoods, peaks are kept greedily in descending vote
    order subject to a minimum center distance, and each kept center's radius
    is read from the histogram of contour distances (refined to sub-pixel by
    averaging near the peak).
    """
    if not 0 < r_min <= r_max:
        raise ParameterError(f"need 0 < r_min <= r_max, got {r_min}..{r_max}")
    if votes_min < 1:
        raise ParameterError("votes_min must be at least 1")
    h, w = image.height, image.width

    smoothed = filter2(image.data.astype(np.float64) * 255.0, gaussian_kernel(5, sigma))
    gx, gy, mag = sobel_gradients(smoothed)
    crest = np.asarray(K.nonmax_suppress(mag, gx, gy)).astype(bool)
    cys, cxs = np.nonzero(crest & (mag > 1e-9))
    if len(cys) == 0:
        return []
    m = mag[cys, cxs]
    ux = np.ascontiguousarray(gx[cys, cxs] / m)
    uy = np.ascontiguousarray(gy[cys, cxs] / m)
    acc = K.hough_circle_accumulate(
        cys.astype(np.int64), cxs.astype(np.int64), ux, uy, r_min, r_max, h, w
    )

    pooled = np.zeros_like(acc)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            ys0, ys1 = max(0, -dy), min(h, h - dy)
            xs0, xs1 = max(0, -dx), min(w, w - dx)
            pooled[ys0:ys1, xs0:xs1] += acc[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx]

    py, px = np.nonzero(pooled >= votes_min)
    if len(py) == 0:
        return []
    pv = pooled[py, px]
    order = np.lexsort((px, py, -pv))

    kept: list[CircleHit] = []
    centers: list[tuple[int, int]] = []
    fx = cxs.astype(np.float64)
    fy = cys.astype(np.float64)
    for b in order:
        cy, cx, v = int(py[b]), int(px[b]), int(pv[b])
        if any(math.hypot(cx - ox, cy - oy) < center_min_dist for ox, oy in centers):
            continue
        d = np.hypot(fx - cx, fy - cy)
        in_band = (d >= r_min - 1.0) & (d <= r_max + 1.0)
        if not in_band.any():
            continue
        db = d[in_band]
        bins = np.floor(db + 0.5).astype(np.int64)
        hist = np.bincount(bins, minlength=r_max + 2)
        radius_bin = int(np.argmax(hist))
        near_peak = np.abs(db - radius_bin) <= 1.0
        if not near_peak.any():
            continue
        radius = float(np.clip(db[near_peak].mean(), r_min, r_max))
        kept.append(CircleHit(cx=cx, cy=cy, radius=radius, votes=v))
        centers.append((cx, cy))
    return kept


def break_circles(
    image: BinaryImage, hits: list[CircleHit], erase_thickness: int = 2
) -> BinaryImage:
    """Erase an annulus of the given thickness along each detected circle,
    cutting loop-shaped bridges between text rows.  The result is a subset
    of the input mask."""
    if erase_thickness < 1:
        raise ParameterError("erase_thickness must be at least 1")
    h, w = image.height, image.width
    out = image.data.copy()
    half = erase_thickness / 2.0
    for hit in hits:
        reach = int(math.ceil(hit.radius + half)) + 1
        y0, y1 = max(0, hit.cy - reach), min(h, hit.cy + reach + 1)
        x0, x1 = max(0, hit.cx - reach), min(w, hit.cx + reach + 1)
        if y0 >= y1 or x0 >= x1:
            continue
        yy, xx = np.mgrid[y0:y1, x0:x1]
        d = np.hypot(xx - hit.cx, yy - hit.cy)
        band = np.abs(d - hit.radius) <= half
        out[y0:y1, x0:x1][band] = 0
    return BinaryImage(out)
