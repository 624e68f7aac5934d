"""OPTICS clustering of component midpoints into text lines."""

import math
from dataclasses import dataclass

import numpy as np

from .components import BoundingBox, ComponentSet
from .errors import InvariantError, ParameterError
from .raster import RasterImage


@dataclass(frozen=True)
class OpticsParams:
    """min_samples counts the point itself; max_eps bounds the neighbor
    search; eps_cut is the reachability cut used for cluster extraction
    (None means: derive it with auto_eps_cut)."""

    min_samples: int = 3
    max_eps: float = math.inf
    eps_cut: float | None = None

    def __post_init__(self):
        if self.min_samples < 1:
            raise ParameterError("min_samples must be at least 1")
        if not self.max_eps > 0:
            raise ParameterError("max_eps must be positive")
        if self.eps_cut is not None and not self.eps_cut > 0:
            raise ParameterError("eps_cut must be positive when given")


@dataclass(frozen=True)
class TextLine:
    """One assembled text line: 0-based top-to-bottom index, its member
    boxes, and the crop rectangle spanning them."""

    line_index: int
    boxes: tuple[BoundingBox, ...]
    crop: BoundingBox
    y_top: int
    y_bottom: int


def optics_order(points, params: OpticsParams) -> list[tuple[int, float]]:
    """Canonical OPTICS ordering of 1-D points.

    Core distance of p = distance to its min_samples-th nearest neighbor
    (the point itself included, so min_samples=1 gives core distance 0),
    undefined (infinite) when fewer than min_samples points lie within
    max_eps.  Reachability of q from p = max(core(p), d(p, q)).  The seed
    queue pops the smallest (reachability, original index); each new sweep
    starts at the lowest-index unprocessed point with reachability +inf.
    """
    pts = np.asarray(points, dtype=np.float64).ravel()
    n = len(pts)
    if n == 0:
        raise ParameterError("optics_order requires at least one point")
    ms = params.min_samples
    max_eps = params.max_eps

    dist = np.abs(pts[:, None] - pts[None, :])
    within = dist <= max_eps
    core = np.full(n, math.inf)
    for i in range(n):
        neigh = np.sort(dist[i][within[i]])
        if len(neigh) >= ms:
            core[i] = neigh[ms - 1]

    processed = np.zeros(n, dtype=bool)
    order: list[tuple[int, float]] = []
    seeds: dict[int, float] = {}

    def update_seeds(p):
        if not math.isfinite(core[p]):
            return
        for q in np.nonzero(within[p])[0]:
            q = int(q)
            if processed[q]:
                continue
            new_reach = max(core[p], float(dist[p, q]))
            if new_reach < seeds.get(q, math.inf):
                seeds[q] = new_reach

    for start in range(n):
        if processed[start]:
            continue
        processed[start] = True
        order.append((start, math.inf))
        seeds.clear()
        update_seeds(start)
        while seeds:
            q = min(seeds, key=lambda k: (seeds[k], k))
            reach = seeds.pop(q)
            processed[q] = True
            order.append((q, reach))
            update_seeds(q)
    return order


def extract_clusters(ordering, params: OpticsParams) -> np.ndarray:
    """Reachability-cut extraction over an OPTICS ordering.

    A point whose reachability exceeds eps_cut separates clusters and seeds
    the next run (its successors are its close neighbors).  Runs shorter
    than min_samples become noise (-1).  Labels are 0-based in order of
    appearance along the ordering.
    """
    if params.eps_cut is None:
        raise ParameterError("eps_cut is unresolved; derive it with auto_eps_cut first")
    n = len(ordering)
    labels = np.full(n, -1, dtype=np.int64)
    runs: list[list[int]] = []
    current: list[int] = []
    for idx, reach in ordering:
        if reach > params.eps_cut:
            if current:
                runs.append(current)
            current = [idx]
        else:
            current.append(idx)
    if current:
        runs.append(current)

    next_label = 0
    for run in runs:
        if len(run) >= params.min_samples:
            for idx in run:
                labels[idx] = next_label
            next_label += 1
    return labels


def auto_eps_cut(points, image_height: int) -> float:
    """Reachability cut: half the median gap between sorted distinct cy
    values, falling back to 5% of the image height when fewer than 3 points
    (or fewer than 2 distinct values) are available."""
    if image_height < 1:
        raise ParameterError("image_height must be positive")
    fallback = 0.05 * image_height
    pts = np.asarray(points, dtype=np.float64).ravel()
    if len(pts) < 3:
        return fallback
    distinct = np.unique(pts)
    if len(distinct) < 2:
        return fallback
    gaps = np.diff(distinct)
    cut = 0.5 * float(np.median(gaps))
    return cut if cut > 0 else fallback


def assemble_lines(components: ComponentSet, labels) -> list[TextLine]:
    """Group boxes by cluster label into top-to-bottom TextLines.

    Noise boxes (-1) are attached to the cluster with the nearest mean cy
    when that distance is within one median line gap (for a single cluster,
    within its own y extent), otherwise dropped.  Line index follows
    ascending mean member cy.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(components.boxes):
        raise ParameterError(
            f"labels ({len(labels)}) do not align with boxes ({len(components.boxes)})"
        )
    cluster_ids = sorted(int(c) for c in np.unique(labels) if c >= 0)
    if not cluster_ids:
        return []

    members: dict[int, list[int]] = {c: [] for c in cluster_ids}
    for i, lab in enumerate(labels):
        if lab >= 0:
            members[int(lab)].append(i)

    def mean_cy(idxs):
        return sum(components.boxes[i].midpoint[1] for i in idxs) / len(idxs)

    centers = {c: mean_cy(idxs) for c, idxs in members.items()}
    sorted_centers = sorted(centers.values())
    if len(sorted_centers) >= 2:
        gap_limit = float(np.median(np.diff(sorted_centers)))
    else:
        only = members[cluster_ids[0]]
        y_top = min(components.boxes[i].y_min for i in only)
        y_bot = max(components.boxes[i].y_max for i in only)
        gap_limit = float(y_bot - y_top + 1)

    # attachment decisions use the pre-attachment centers, all at once
    attached: dict[int, list[int]] = {c: [] for c in cluster_ids}
    for i, lab in enumerate(labels):
        if lab >= 0:
            continue
        cy = components.boxes[i].midpoint[1]
        best = min(cluster_ids, key=lambda c: (abs(centers[c] - cy), c))
        if abs(centers[best] - cy) <= gap_limit:
            attached[best].append(i)

    lines = []
    for c in cluster_ids:
        idxs = members[c] + attached[c]
        boxes = tuple(components.boxes[i] for i in sorted(idxs))
        crop = boxes[0]
        for b in boxes[1:]:
            crop = crop.union(b)
        lines.append((mean_cy(idxs), boxes, crop))
    lines.sort(key=lambda t: t[0])
    return [
        TextLine(
            line_index=i,
            boxes=boxes,
            crop=crop,
            y_top=crop.y_min,
            y_bottom=crop.y_max,
        )
        for i, (_, boxes, crop) in enumerate(lines)
    ]


def crop_lines(image: RasterImage, lines: list[TextLine]) -> list[RasterImage]:
    """Cut each line's crop rectangle out of the page image."""
    crops = []
    for line in lines:
        c = line.crop
        if c.x_min < 0 or c.y_min < 0 or c.x_max >= image.width or c.y_max >= image.height:
            raise InvariantError(f"line {line.line_index} crop {c} exceeds image bounds")
        crops.append(RasterImage(image.data[c.y_min : c.y_max + 1, c.x_min : c.x_max + 1].copy()))
    return crops
