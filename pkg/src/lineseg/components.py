"""Connected component labeling and bounding box extraction."""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ParameterError
from .raster import BinaryImage


@dataclass(frozen=True, order=True)
class BoundingBox:
    """Axis-aligned box with inclusive integer pixel bounds."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ParameterError(
                f"degenerate box ({self.x_min},{self.y_min})-({self.x_max},{self.y_max})"
            )

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def midpoint(self) -> tuple[float, float]:
        """(cx, cy) center of the box."""
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )

    def intersection_area(self, other: "BoundingBox") -> int:
        iw = min(self.x_max, other.x_max) - max(self.x_min, other.x_min) + 1
        ih = min(self.y_max, other.y_max) - max(self.y_min, other.y_min) + 1
        if iw <= 0 or ih <= 0:
            return 0
        return iw * ih


@dataclass(frozen=True)
class ComponentSet:
    """Bounding boxes of the retained components of one image.

    Boxes are ordered by each component's first pixel in row-major scan
    order.  pixel_counts aligns with boxes.
    """

    boxes: tuple[BoundingBox, ...]
    pixel_counts: tuple[int, ...]
    image_width: int
    image_height: int
    min_area_used: float = 0.0

    def __len__(self) -> int:
        return len(self.boxes)


def label_components(image: BinaryImage, connectivity: int = 8):
    """Label foreground components; returns (labels int32 array, count).

    Labels run 1..count in order of each component's first row-major pixel;
    background is 0.
    """
    if connectivity not in (4, 8):
        raise ParameterError(f"connectivity must be 4 or 8, got {connectivity}")
    return K.label_components(np.ascontiguousarray(image.data), connectivity)


def extract_boxes(
    labels: np.ndarray,
    count: int,
    min_area: float = 0.0,
    area_mode: str = "bbox",
    image_shape: tuple[int, int] | None = None,
) -> ComponentSet:
    """Bounding boxes of labeled components, dropping those with area below
    min_area.  area_mode 'bbox' measures box area, 'pixels' the component's
    pixel count."""
    if area_mode not in ("bbox", "pixels"):
        raise ParameterError(f"area_mode must be 'bbox' or 'pixels', got {area_mode!r}")
    h, w = labels.shape if image_shape is None else image_shape
    if count == 0:
        return ComponentSet((), (), w, h, min_area)

    ys, xs = np.nonzero(labels)
    ls = labels[ys, xs]
    big = np.int64(1 << 40)
    x_min = np.full(count + 1, big, dtype=np.int64)
    y_min = np.full(count + 1, big, dtype=np.int64)
    x_max = np.full(count + 1, -1, dtype=np.int64)
    y_max = np.full(count + 1, -1, dtype=np.int64)
    np.minimum.at(x_min, ls, xs)
    np.minimum.at(y_min, ls, ys)
    np.maximum.at(x_max, ls, xs)
    np.maximum.at(y_max, ls, ys)
    counts = np.bincount(ls, minlength=count + 1)

    boxes = []
    pixel_counts = []
    for lbl in range(1, count + 1):
        box = BoundingBox(int(x_min[lbl]), int(y_min[lbl]), int(x_max[lbl]), int(y_max[lbl]))
        measure = box.area if area_mode == "bbox" else int(counts[lbl])
        if measure < min_area:
            continue
        boxes.append(box)
        pixel_counts.append(int(counts[lbl]))
    return ComponentSet(tuple(boxes), tuple(pixel_counts), w, h, min_area)


def find_components(
    image: BinaryImage,
    connectivity: int = 8,
    min_area: float | None = None,
    area_mode: str = "bbox",
) -> ComponentSet:
    """label_components + extract_boxes with the relative default floor of
    5e-5 of the image area."""
    labels, count = label_components(image, connectivity)
    floor_area = min_area if min_area is not None else 5e-5 * image.width * image.height
    return extract_boxes(labels, count, floor_area, area_mode, (image.height, image.width))
