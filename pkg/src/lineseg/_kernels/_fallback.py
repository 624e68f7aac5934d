"""Pure numpy implementations of the hot raster kernels.

These are the reference semantics: the compiled backend in ``_core.pyx``
must produce byte-identical outputs for identical inputs.  Floating point
expressions are written so that both backends perform the same IEEE-754
operations in the same order.
"""

import numpy as np

# tan(pi/8) and tan(3*pi/8), hard-coded so sector selection never depends
# on a libm atan2 that could differ between backends by one ulp.
_TAN_22_5 = 0.41421356237309503
_TAN_67_5 = 2.414213562373095


def _neighbor(a, dy, dx, fill):
    """a shifted so out[y, x] = a[y+dy, x+dx], out-of-bounds filled."""
    h, w = a.shape
    out = np.full(a.shape, fill, dtype=a.dtype)
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    if y0 < y1 and x0 < x1:
        out[y0:y1, x0:x1] = a[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
    return out


def nonmax_suppress(mag, gx, gy):
    """Thin gradient magnitude ridges to single-pixel width.

    The gradient direction is quantized to one of four sectors by comparing
    |gy| against tan(22.5deg)*|gx| and tan(67.5deg)*|gx|.  A pixel survives
    when its magnitude is strictly greater than the first neighbor along the
    gradient and not less than the second, which keeps exactly one pixel of
    a two-pixel plateau.  Out-of-bounds neighbors count as magnitude zero.
    """
    abs_gx = np.abs(gx)
    abs_gy = np.abs(gy)
    horizontal = abs_gy <= _TAN_22_5 * abs_gx
    vertical = (~horizontal) & (abs_gy >= _TAN_67_5 * abs_gx)
    diagonal = ~(horizontal | vertical)
    diag_pos = diagonal & (gx * gy > 0.0)
    diag_neg = diagonal & ~diag_pos

    n = {
        (dy, dx): _neighbor(mag, dy, dx, 0.0)
        for dy in (-1, 0, 1)
        for dx in (-1, 0, 1)
        if (dy, dx) != (0, 0)
    }
    m_a = np.zeros_like(mag)
    m_b = np.zeros_like(mag)
    for sector, (off_a, off_b) in (
        (horizontal, ((0, -1), (0, 1))),
        (vertical, ((-1, 0), (1, 0))),
        (diag_pos, ((-1, -1), (1, 1))),
        (diag_neg, ((-1, 1), (1, -1))),
    ):
        m_a[sector] = n[off_a][sector]
        m_b[sector] = n[off_b][sector]

    keep = (mag > m_a) & (mag >= m_b) & (mag > 0.0)
    return keep.astype(np.uint8)


def hysteresis(weak, strong):
    """Keep weak-mask components (8-connected) that contain a strong pixel."""
    labels, count = label_components(weak, 8)
    if count == 0:
        return np.zeros_like(weak)
    seeded = np.zeros(count + 1, dtype=bool)
    seeded[labels[strong.astype(bool)]] = True
    seeded[0] = False
    return seeded[labels].astype(np.uint8)


def binary_erode(img, offsets):
    out = np.ones_like(img)
    for dy, dx in offsets:
        out &= _neighbor(img, int(dy), int(dx), np.uint8(0))
    return out


def binary_dilate(img, offsets):
    out = np.zeros_like(img)
    for dy, dx in offsets:
        out |= _neighbor(img, int(dy), int(dx), np.uint8(0))
    return out


def _edt_rows(img):
    """Per-row distance to the nearest background pixel, capped at h+w+1."""
    h, w = img.shape
    inf = np.int64(h + w + 1)
    bg = img == 0
    idx = np.arange(w, dtype=np.int64)
    left = np.maximum.accumulate(np.where(bg, idx, -inf), axis=1)
    right = np.minimum.accumulate(np.where(bg, idx, 2 * inf)[:, ::-1], axis=1)[:, ::-1]
    dist = np.minimum(idx[None, :] - left, right - idx[None, :])
    return np.minimum(dist, inf)


def distance_transform(img):
    """Exact Euclidean distance to the nearest zero pixel.

    Row pass finds per-row horizontal distances; the column pass runs the
    lower-envelope algorithm on squared distances, which stay exact in
    int64, so only the final square root is inexact.
    """
    h, w = img.shape
    f = _edt_rows(img)
    f *= f
    d2 = np.empty((h, w), dtype=np.int64)
    v = np.empty(h, dtype=np.int64)
    z = np.empty(h + 1, dtype=np.float64)
    for x in range(w):
        col = f[:, x]
        k = 0
        v[0] = 0
        z[0] = -np.inf
        z[1] = np.inf
        for q in range(1, h):
            fq = col[q] + q * q
            s = (fq - (col[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
            while s <= z[k]:
                k -= 1
                s = (fq - (col[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        k = 0
        for q in range(h):
            while z[k + 1] < q:
                k += 1
            dy = q - v[k]
            d2[q, x] = dy * dy + col[v[k]]
    return np.sqrt(d2.astype(np.float64))


class _RunUnion:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def label_components(img, connectivity):
    """Two-pass connected component labeling over foreground runs.

    Labels are compacted in order of each component's first pixel in
    row-major scan order, so label 1 is always the component whose topmost,
    leftmost pixel comes first.
    """
    h, w = img.shape
    labels = np.zeros((h, w), dtype=np.int32)
    padded = np.zeros((h, w + 2), dtype=np.int8)
    padded[:, 1:-1] = img
    delta = np.diff(padded, axis=1)
    start_r, start_c = np.nonzero(delta == 1)
    _, end_c = np.nonzero(delta == -1)
    n_runs = len(start_c)
    if n_runs == 0:
        return labels, 0

    row_ptr = np.searchsorted(start_r, np.arange(h + 1))
    uf = _RunUnion(n_runs)
    reach = 1 if connectivity == 8 else 0
    for y in range(1, h):
        i, pe = row_ptr[y - 1], row_ptr[y]
        j, ce = row_ptr[y], row_ptr[y + 1]
        while i < pe and j < ce:
            if start_c[j] < end_c[i] + reach and start_c[i] < end_c[j] + reach:
                uf.union(i, j)
            if end_c[i] <= end_c[j]:
                i += 1
            else:
                j += 1

    compact = {}
    run_label = np.empty(n_runs, dtype=np.int32)
    for r in range(n_runs):
        root = uf.find(r)
        if root not in compact:
            compact[root] = len(compact) + 1
        run_label[r] = compact[root]
    for r in range(n_runs):
        labels[start_r[r], start_c[r] : end_c[r]] = run_label[r]
    return labels, len(compact)


def hough_line_accumulate(ys, xs, cos_t, sin_t, rho_res, rho_offset, n_rho):
    """Vote (theta, rho) bins; rho bin = floor((rho + offset)/res + 0.5)."""
    n_theta = len(cos_t)
    acc = np.zeros((n_theta, n_rho), dtype=np.int64)
    for t in range(n_theta):
        rho = xs * cos_t[t] + ys * sin_t[t]
        idx = np.floor((rho + rho_offset) / rho_res + 0.5).astype(np.int64)
        ok = (idx >= 0) & (idx < n_rho)
        acc[t] = np.bincount(idx[ok], minlength=n_rho)
    return acc


def hough_circle_accumulate(ys, xs, ux, uy, r_min, r_max, height, width):
    """Vote centers along +/- gradient directions for every radius."""
    acc = np.zeros(height * width, dtype=np.int64)
    radii = np.arange(r_min, r_max + 1, dtype=np.float64)
    for sign in (1.0, -1.0):
        sr = sign * radii
        cx = np.floor(xs[:, None] + sr[None, :] * ux[:, None] + 0.5).astype(np.int64)
        cy = np.floor(ys[:, None] + sr[None, :] * uy[:, None] + 0.5).astype(np.int64)
        ok = (cx >= 0) & (cx < width) & (cy >= 0) & (cy < height)
        acc += np.bincount(cy[ok] * width + cx[ok], minlength=height * width)
    return acc.reshape(height, width)
