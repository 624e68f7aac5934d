# cython: language_level=3
"""Compiled implementations of the hot raster kernels.

Every function here mirrors ``_fallback.py`` exactly: same floating point
expressions in the same order, same tie-breaking, same label compaction.
The test suite asserts byte-identical outputs between the two backends.
"""

import numpy as np

cimport cython
from libc.math cimport floor, sqrt

cdef double TAN_22_5 = 0.41421356237309503
cdef double TAN_67_5 = 2.414213562373095


@cython.boundscheck(False)
@cython.wraparound(False)
def nonmax_suppress(double[:, ::1] mag, double[:, ::1] gx, double[:, ::1] gy):
    cdef Py_ssize_t h = mag.shape[0], w = mag.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, ay, ax, by, bx
    cdef double m, vx, vy, agx, agy, ma, mb

    for y in range(h):
        for x in range(w):
            m = mag[y, x]
            if m <= 0.0:
                continue
            vx = gx[y, x]
            vy = gy[y, x]
            agx = -vx if vx < 0.0 else vx
            agy = -vy if vy < 0.0 else vy
            if agy <= TAN_22_5 * agx:
                ay = y; ax = x - 1; by = y; bx = x + 1
            elif agy >= TAN_67_5 * agx:
                ay = y - 1; ax = x; by = y + 1; bx = x
            elif vx * vy > 0.0:
                ay = y - 1; ax = x - 1; by = y + 1; bx = x + 1
            else:
                ay = y - 1; ax = x + 1; by = y + 1; bx = x - 1
            ma = mag[ay, ax] if 0 <= ay < h and 0 <= ax < w else 0.0
            mb = mag[by, bx] if 0 <= by < h and 0 <= bx < w else 0.0
            if m > ma and m >= mb:
                out[y, x] = 1
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def hysteresis(unsigned char[:, ::1] weak, unsigned char[:, ::1] strong):
    cdef Py_ssize_t h = weak.shape[0], w = weak.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    stack_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    cdef Py_ssize_t top = 0, y, x, ny, nx, dy, dx, y2, x2, p

    for y in range(h):
        for x in range(w):
            if strong[y, x] and weak[y, x] and not out[y, x]:
                out[y, x] = 1
                stack[top] = y * w + x
                top += 1
                while top > 0:
                    top -= 1
                    p = stack[top]
                    ny = p // w
                    nx = p % w
                    for dy in range(-1, 2):
                        for dx in range(-1, 2):
                            if dy == 0 and dx == 0:
                                continue
                            y2 = ny + dy
                            x2 = nx + dx
                            if 0 <= y2 < h and 0 <= x2 < w and weak[y2, x2] and not out[y2, x2]:
                                out[y2, x2] = 1
                                stack[top] = y2 * w + x2
                                top += 1
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def binary_erode(unsigned char[:, ::1] img, long long[:, ::1] offsets):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1], k = offsets.shape[0]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, i, ny, nx
    cdef bint keep
    for y in range(h):
        for x in range(w):
            keep = True
            for i in range(k):
                ny = y + offsets[i, 0]
                nx = x + offsets[i, 1]
                if ny < 0 or ny >= h or nx < 0 or nx >= w or not img[ny, nx]:
                    keep = False
                    break
            if keep:
                out[y, x] = 1
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def binary_dilate(unsigned char[:, ::1] img, long long[:, ::1] offsets):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1], k = offsets.shape[0]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, i, ny, nx
    for y in range(h):
        for x in range(w):
            for i in range(k):
                ny = y + offsets[i, 0]
                nx = x + offsets[i, 1]
                if 0 <= ny < h and 0 <= nx < w and img[ny, nx]:
                    out[y, x] = 1
                    break
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def distance_transform(unsigned char[:, ::1] img):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef long long inf = h + w + 1
    f_arr = np.empty((h, w), dtype=np.int64)
    cdef long long[:, ::1] f = f_arr
    cdef Py_ssize_t y, x, q, k
    cdef long long d, fq

    # row pass: distance to nearest zero in the same row, then squared
    for y in range(h):
        d = inf
        for x in range(w):
            if img[y, x] == 0:
                d = 0
            elif d < inf:
                d = d + 1
            f[y, x] = d
        d = inf
        for x in range(w - 1, -1, -1):
            if img[y, x] == 0:
                d = 0
            elif d < inf:
                d = d + 1
            if d < f[y, x]:
                f[y, x] = d
        for x in range(w):
            f[y, x] = f[y, x] * f[y, x]

    d2_arr = np.empty((h, w), dtype=np.int64)
    cdef long long[:, ::1] d2 = d2_arr
    v_arr = np.empty(h, dtype=np.int64)
    cdef long long[::1] v = v_arr
    z_arr = np.empty(h + 1, dtype=np.float64)
    cdef double[::1] z = z_arr
    cdef double s, pos_inf = np.inf

    for x in range(w):
        k = 0
        v[0] = 0
        z[0] = -pos_inf
        z[1] = pos_inf
        for q in range(1, h):
            fq = f[q, x] + q * q
            s = (<double>(fq - (f[v[k], x] + v[k] * v[k]))) / (2.0 * (<double>(q - v[k])))
            while s <= z[k]:
                k -= 1
                s = (<double>(fq - (f[v[k], x] + v[k] * v[k]))) / (2.0 * (<double>(q - v[k])))
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = pos_inf
        k = 0
        for q in range(h):
            while z[k + 1] < q:
                k += 1
            d = q - v[k]
            d2[q, x] = d * d + f[v[k], x]

    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for y in range(h):
        for x in range(w):
            out[y, x] = sqrt(<double>d2[y, x])
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
cdef inline Py_ssize_t _find(int[::1] parent, Py_ssize_t i) nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@cython.boundscheck(False)
@cython.wraparound(False)
cdef inline void _union(int[::1] parent, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t ra = _find(parent, a)
    cdef Py_ssize_t rb = _find(parent, b)
    if ra != rb:
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = <int>ra


@cython.boundscheck(False)
@cython.wraparound(False)
def label_components(unsigned char[:, ::1] img, int connectivity):
    """Pixel-at-a-time two-pass labeling; compacts labels in row-major
    first-pixel order, matching the run-based fallback exactly."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    cdef Py_ssize_t cap = (h * w) // 2 + 2
    parent_arr = np.arange(cap, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int next_prov = 1
    cdef Py_ssize_t y, x, i, root
    cdef int best, lab, nn
    cdef bint eight = connectivity == 8
    cdef int[4] nb

    for y in range(h):
        for x in range(w):
            if not img[y, x]:
                continue
            nn = 0
            if x > 0 and labels[y, x - 1] > 0:
                nb[nn] = labels[y, x - 1]; nn += 1
            if y > 0:
                if labels[y - 1, x] > 0:
                    nb[nn] = labels[y - 1, x]; nn += 1
                if eight:
                    if x > 0 and labels[y - 1, x - 1] > 0:
                        nb[nn] = labels[y - 1, x - 1]; nn += 1
                    if x < w - 1 and labels[y - 1, x + 1] > 0:
                        nb[nn] = labels[y - 1, x + 1]; nn += 1
            if nn == 0:
                labels[y, x] = next_prov
                next_prov += 1
            else:
                best = nb[0]
                for i in range(1, nn):
                    if nb[i] < best:
                        best = nb[i]
                labels[y, x] = best
                for i in range(nn):
                    _union(parent, best, nb[i])

    compact_arr = np.zeros(next_prov, dtype=np.int32)
    cdef int[::1] compact = compact_arr
    cdef int n_out = 0
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab == 0:
                continue
            root = _find(parent, lab)
            if compact[root] == 0:
                n_out += 1
                compact[root] = n_out
            labels[y, x] = compact[root]
    return labels_arr, n_out


@cython.boundscheck(False)
@cython.wraparound(False)
def hough_line_accumulate(long long[::1] ys, long long[::1] xs,
                          double[::1] cos_t, double[::1] sin_t,
                          double rho_res, double rho_offset, Py_ssize_t n_rho):
    cdef Py_ssize_t n = ys.shape[0], n_theta = cos_t.shape[0]
    acc_arr = np.zeros((n_theta, n_rho), dtype=np.int64)
    cdef long long[:, ::1] acc = acc_arr
    cdef Py_ssize_t t, i
    cdef double rho, c, s
    cdef long long idx
    for t in range(n_theta):
        c = cos_t[t]
        s = sin_t[t]
        for i in range(n):
            rho = (<double>xs[i]) * c + (<double>ys[i]) * s
            idx = <long long>floor((rho + rho_offset) / rho_res + 0.5)
            if 0 <= idx < n_rho:
                acc[t, idx] += 1
    return acc_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def hough_circle_accumulate(long long[::1] ys, long long[::1] xs,
                            double[::1] ux, double[::1] uy,
                            int r_min, int r_max,
                            Py_ssize_t height, Py_ssize_t width):
    cdef Py_ssize_t n = ys.shape[0]
    acc_arr = np.zeros((height, width), dtype=np.int64)
    cdef long long[:, ::1] acc = acc_arr
    cdef Py_ssize_t i
    cdef int r, sign_i
    cdef double sr, cxf, cyf, sign
    cdef long long cx, cy
    for sign_i in range(2):
        sign = 1.0 if sign_i == 0 else -1.0
        for i in range(n):
            for r in range(r_min, r_max + 1):
                sr = sign * (<double>r)
                cxf = floor((<double>xs[i]) + sr * ux[i] + 0.5)
                cyf = floor((<double>ys[i]) + sr * uy[i] + 0.5)
                cx = <long long>cxf
                cy = <long long>cyf
                if 0 <= cx < width and 0 <= cy < height:
                    acc[cy, cx] += 1
    return acc_arr
