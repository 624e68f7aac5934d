"""Binary morphology, the exact distance transform, and noise removal."""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ParameterError
from .raster import BinaryImage


@dataclass(frozen=True)
class StructuringElement:
    """Flat structuring element with odd dimensions, anchored at its center."""

    shape: str = "rect"
    width: int = 3
    height: int = 3

    def __post_init__(self):
        if self.shape not in ("rect", "ellipse"):
            raise ParameterError(f"shape must be 'rect' or 'ellipse', got {self.shape!r}")
        for name, v in (("width", self.width), ("height", self.height)):
            if v < 1 or v % 2 == 0:
                raise ParameterError(f"{name} must be odd and positive, got {v}")

    def offsets(self) -> np.ndarray:
        """(dy, dx) member offsets relative to the anchor, row-major order."""
        hy, hx = self.height // 2, self.width // 2
        offs = []
        for dy in range(-hy, hy + 1):
            for dx in range(-hx, hx + 1):
                if self.shape == "ellipse" and hx > 0 and hy > 0:
                    # integer form of (dx/hx)^2 + (dy/hy)^2 <= 1
                    if dx * dx * hy * hy + dy * dy * hx * hx > hx * hx * hy * hy:
                        continue
                elif self.shape == "ellipse":
                    if (hx == 0 and dx != 0) or (hy == 0 and dy != 0):
                        continue
                offs.append((dy, dx))
        return np.array(offs, dtype=np.int64).reshape(-1, 2)


def erode(image: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Keep a pixel only if every SE member lands on foreground.

    Pixels outside the image count as background, so foreground touching
    the border erodes away.
    """
    return BinaryImage(K.binary_erode(np.ascontiguousarray(image.data), se.offsets()))


def dilate(image: BinaryImage, se: StructuringElement, iterations: int = 1) -> BinaryImage:
    """Grow foreground by the SE, repeated `iterations` times."""
    if iterations < 1:
        raise ParameterError("iterations must be at least 1")
    data = np.ascontiguousarray(image.data)
    offs = se.offsets()
    for _ in range(iterations):
        data = K.binary_dilate(data, offs)
    return BinaryImage(data)


def open_(image: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Erosion followed by dilation with the same SE."""
    return dilate(erode(image, se), se)


def distance_transform(image: BinaryImage) -> np.ndarray:
    """Exact Euclidean distance from each foreground pixel to the nearest
    background pixel; zero on background."""
    return K.distance_transform(np.ascontiguousarray(image.data))


def remove_noise_detailed(
    image: BinaryImage,
    open_se: StructuringElement | None = None,
    dilate_iters: int = 2,
    fg_dist_ratio: float = 0.4,
    min_area: float | None = None,
):
    """Noise removal composite; also returns intermediates for debugging.

    Opens the mask, dilates the opening, and takes the distance transform
    of the dilated mask.  A component of the opened mask is dropped when its
    pixel count falls below the area floor and it sits in a low-distance
    region (far from the thick "sure foreground" cores).  Returns
    (cleaned, opened, removed_mask).
    """
    if not 0.0 <= fg_dist_ratio <= 1.0:
        raise ParameterError("fg_dist_ratio must be in [0, 1]")
    if open_se is None:
        open_se = StructuringElement("rect", 3, 3)
    h, w = image.height, image.width
    floor_area = min_area if min_area is not None else round(1e-4 * w * h)

    opened = open_(image, open_se)
    grown = dilate(opened, open_se, dilate_iters)
    dist = K.distance_transform(np.ascontiguousarray(grown.data))
    max_dist = dist.max()

    labels, count = K.label_components(np.ascontiguousarray(opened.data), 8)
    if count == 0:
        empty = np.zeros_like(image.data)
        return BinaryImage(opened.data.copy()), opened, BinaryImage(empty)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    small = sizes < floor_area
    small[0] = False
    removed = small[labels] & (dist < fg_dist_ratio * max_dist)
    cleaned = opened.data & ~removed
    return BinaryImage(cleaned.astype(np.uint8)), opened, BinaryImage(removed.astype(np.uint8))


def remove_noise(
    image: BinaryImage,
    open_se: StructuringElement | None = None,
    dilate_iters: int = 2,
    fg_dist_ratio: float = 0.4,
    min_area: float | None = None,
) -> BinaryImage:
    cleaned, _, _ = remove_noise_detailed(image, open_se, dilate_iters, fg_dist_ratio, min_area)
    return cleaned
