"""Grayscale conversion, scaling, binarization, and edge detection."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import FormatError, ParameterError

_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114


@dataclass(frozen=True)
class RasterImage:
    """Single-channel 8-bit image. The wrapped array is treated as immutable."""

    data: np.ndarray

    def __post_init__(self):
        if not isinstance(self.data, np.ndarray) or self.data.ndim != 2:
            raise FormatError("RasterImage requires a 2-D array")
        if self.data.dtype != np.uint8:
            raise FormatError(f"RasterImage requires uint8 data, got {self.data.dtype}")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise FormatError("RasterImage must be at least 1x1")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BinaryImage:
    """Mask image whose pixels are 0 (background) or 1 (foreground)."""

    data: np.ndarray

    def __post_init__(self):
        if not isinstance(self.data, np.ndarray) or self.data.ndim != 2:
            raise FormatError("BinaryImage requires a 2-D array")
        if self.data.dtype != np.uint8:
            raise FormatError(f"BinaryImage requires uint8 data, got {self.data.dtype}")
        if self.data.size and self.data.max() > 1:
            raise FormatError("BinaryImage pixels must be 0 or 1")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def foreground_count(self) -> int:
        return int(self.data.sum())


def _round_half_up(x):
    """floor(x + 0.5), the rounding used everywhere in this package."""
    return np.floor(x + 0.5)


def to_grayscale(data: np.ndarray) -> RasterImage:
    """Collapse 1-4 channel uint8 image data to single-channel luma.

    RGB uses the 0.299/0.587/0.114 weights with round-half-up; an alpha
    channel is ignored; 2-channel data is treated as gray+alpha.
    """
    if not isinstance(data, np.ndarray):
        raise FormatError("to_grayscale expects a numpy array")
    if data.dtype != np.uint8:
        raise FormatError(f"unsupported bit depth {data.dtype}, expected uint8")
    if data.ndim == 2:
        return RasterImage(data.copy())
    if data.ndim != 3 or data.shape[2] not in (1, 2, 3, 4):
        raise FormatError(f"unsupported image shape {data.shape}")
    channels = data.shape[2]
    if channels in (1, 2):
        return RasterImage(data[:, :, 0].copy())
    luma = (
        _LUMA_R * data[:, :, 0].astype(np.float64)
        + _LUMA_G * data[:, :, 1].astype(np.float64)
        + _LUMA_B * data[:, :, 2].astype(np.float64)
    )
    return RasterImage(_round_half_up(luma).astype(np.uint8))


def resize_to_min_width(image: RasterImage, min_width: int = 1000) -> RasterImage:
    """Upscale with bilinear interpolation so width >= min_width.

    Images already wide enough are returned unchanged (same object).  The
    aspect ratio is preserved: height scales by the same factor, rounded
    half up.  Sampling uses pixel-center alignment with edge clamping.
    """
    if min_width < 1:
        raise ParameterError("min_width must be positive")
    h, w = image.height, image.width
    if w >= min_width:
        return image
    scale = min_width / w
    out_w = min_width
    out_h = max(1, int(_round_half_up(h * scale)))

    src_y = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
    src_x = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
    y0 = np.clip(np.floor(src_y).astype(np.int64), 0, h - 1)
    x0 = np.clip(np.floor(src_x).astype(np.int64), 0, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = np.clip(src_y - y0, 0.0, 1.0)
    wx = np.clip(src_x - x0, 0.0, 1.0)

    src = image.data.astype(np.float64)
    top = src[y0][:, x0] * (1.0 - wx)[None, :] + src[y0][:, x1] * wx[None, :]
    bot = src[y1][:, x0] * (1.0 - wx)[None, :] + src[y1][:, x1] * wx[None, :]
    out = top * (1.0 - wy)[:, None] + bot * wy[:, None]
    return RasterImage(_round_half_up(out).astype(np.uint8))


def otsu_threshold(image: RasterImage) -> int:
    """Global Otsu threshold maximizing between-class variance.

    The returned t splits intensities into {v < t} and {v >= t}.  Ties are
    broken toward the smallest t.  A uniform image yields its own single
    intensity.
    """
    hist = np.bincount(image.data.ravel(), minlength=256).astype(np.int64)
    present = np.nonzero(hist)[0]
    if len(present) == 1:
        return int(present[0])
    total = np.int64(image.data.size)
    values = np.arange(256, dtype=np.int64)
    weighted = values * hist
    total_sum = weighted.sum()
    # w0/s0 at threshold t cover the class {v < t}
    w0 = np.concatenate(([np.int64(0)], np.cumsum(hist)[:-1]))
    s0 = np.concatenate(([np.int64(0)], np.cumsum(weighted)[:-1]))
    w1 = total - w0
    s1 = total_sum - s0
    # between-class variance = (s0*w1 - s1*w0)^2 / (w0*w1); numerators stay
    # exact in int64 (< 2^53) so converting to float here cannot reorder ties
    a = (s0 * w1 - s1 * w0).astype(np.float64)
    denom = (w0 * w1).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where(denom > 0.0, (a * a) / denom, -1.0)
    return int(np.argmax(sigma))


def _tile_threshold_map(image: RasterImage, tile_size: int) -> np.ndarray:
    """Per-pixel threshold surface from tile-wise Otsu, bilinearly blended."""
    h, w = image.height, image.width
    ty = max(1, math.ceil(h / tile_size))
    tx = max(1, math.ceil(w / tile_size))
    thresholds = np.empty((ty, tx), dtype=np.float64)
    centers_y = np.empty(ty, dtype=np.float64)
    centers_x = np.empty(tx, dtype=np.float64)
    for i in range(ty):
        y0, y1 = i * tile_size, min(h, (i + 1) * tile_size)
        centers_y[i] = (y0 + y1 - 1) / 2.0
        for j in range(tx):
            x0, x1 = j * tile_size, min(w, (j + 1) * tile_size)
            if i == 0:
                centers_x[j] = (x0 + x1 - 1) / 2.0
            tile = RasterImage(np.ascontiguousarray(image.data[y0:y1, x0:x1]))
            thresholds[i, j] = otsu_threshold(tile)

    def blend_axis(values, centers, n):
        # values: (rows, len(centers)) -> (rows, n), linear between centers,
        # clamped flat outside the first/last center
        if len(centers) == 1:
            return np.repeat(values, n, axis=1)
        pos = np.arange(n, dtype=np.float64)
        idx = np.clip(np.searchsorted(centers, pos, side="right") - 1, 0, len(centers) - 2)
        span = centers[idx + 1] - centers[idx]
        frac = np.clip((pos - centers[idx]) / span, 0.0, 1.0)
        return values[:, idx] * (1.0 - frac)[None, :] + values[:, idx + 1] * frac[None, :]

    by_x = blend_axis(thresholds, centers_x, w)
    return blend_axis(by_x.T, centers_y, h).T


def binarize(
    image: RasterImage,
    polarity: str = "ink-dark",
    mode: str = "global",
    tile_size: int = 64,
) -> BinaryImage:
    """Threshold to a foreground mask.

    polarity "ink-dark" marks pixels below the threshold as foreground (dark
    ink on light paper); "ink-light" negates the image first, so light ink on
    a dark background produces exactly the mask its negative would.  mode
    "local" thresholds against a tiled Otsu surface instead of one global
    value.  "dark"/"light" are accepted as aliases.
    """
    if polarity in ("ink-dark", "dark"):
        dark = True
    elif polarity in ("ink-light", "light"):
        dark = False
    else:
        raise ParameterError(f"polarity must be 'ink-dark' or 'ink-light', got {polarity!r}")
    if mode not in ("global", "local"):
        raise ParameterError(f"mode must be 'global' or 'local', got {mode!r}")
    if tile_size < 8:
        raise ParameterError("tile_size must be at least 8")
    work = image if dark else RasterImage(255 - image.data)
    if mode == "global":
        t = otsu_threshold(work)
        fg = work.data < t
    else:
        tmap = _tile_threshold_map(work, tile_size)
        fg = work.data.astype(np.float64) < tmap
    return BinaryImage(fg.astype(np.uint8))


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Normalized 2-D Gaussian, separable product of 1-D profiles."""
    if size < 1 or size % 2 == 0:
        raise ParameterError("kernel size must be odd and positive")
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    half = size // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(coords * coords) / (2.0 * sigma * sigma))
    g /= g.sum()
    return g[:, None] * g[None, :]


SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = np.array([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]])


def filter2(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Correlate a float image with a small kernel, reflect-padded borders."""
    kh, kw = kernel.shape
    ph, pw = kh // 2, kw // 2
    if img.shape[0] <= ph or img.shape[1] <= pw:
        padded = np.pad(img, ((ph, ph), (pw, pw)), mode="edge")
    else:
        padded = np.pad(img, ((ph, ph), (pw, pw)), mode="reflect")
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            if kernel[i, j] != 0.0:
                out += kernel[i, j] * padded[i : i + h, j : j + w]
    return out


def sobel_gradients(img: np.ndarray):
    """Return (gx, gy, magnitude) of a float image."""
    gx = filter2(img, SOBEL_X)
    gy = filter2(img, SOBEL_Y)
    return gx, gy, np.hypot(gx, gy)


def canny_edges(
    image: RasterImage | BinaryImage,
    low: float = 50.0,
    high: float = 150.0,
    sigma: float = 1.4,
) -> BinaryImage:
    """Canny edge mask: Gaussian smoothing, Sobel gradients, non-maximum
    suppression, then hysteresis linking of the double threshold.

    A BinaryImage input is scaled to 0/255 before smoothing so the default
    thresholds behave the same as on grayscale input.
    """
    if not (0 <= low <= high <= 255):
        raise ParameterError(f"need 0 <= low <= high <= 255, got low={low} high={high}")
    if isinstance(image, BinaryImage):
        src = image.data.astype(np.float64) * 255.0
    else:
        src = image.data.astype(np.float64)
    smoothed = filter2(src, gaussian_kernel(5, sigma))
    gx, gy, mag = sobel_gradients(smoothed)
    mag = np.ascontiguousarray(mag)
    keep = K.nonmax_suppress(mag, np.ascontiguousarray(gx), np.ascontiguousarray(gy))
    weak = (keep.astype(bool) & (mag >= low)).astype(np.uint8)
    strong = (keep.astype(bool) & (mag >= high)).astype(np.uint8)
    edges = K.hysteresis(weak, strong)
    return BinaryImage(edges)
