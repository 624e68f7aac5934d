"""The segmentation pipeline: one image in, text lines and crops out."""

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import components as comp
from . import hough, lineclust, morph, raster
from .config import PipelineConfig
from .dataio import save_png


@dataclass
class SegmentationResult:
    image: raster.RasterImage  # the resized working image
    lines: list
    crops: list
    config: PipelineConfig
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


_PALETTE = (
    (230, 25, 75), (60, 180, 75), (0, 130, 200), (245, 130, 48),
    (145, 30, 180), (70, 240, 240), (240, 50, 230), (210, 245, 60),
    (170, 110, 40), (0, 128, 128), (220, 190, 255), (128, 0, 0),
)


def _to_rgb(gray: np.ndarray) -> np.ndarray:
    return np.repeat(gray[:, :, None], 3, axis=2).copy()


def _mask_to_png(mask: np.ndarray) -> np.ndarray:
    return (mask * 255).astype(np.uint8)


def _draw_rect(rgb, box, color):
    h, w = rgb.shape[:2]
    x0, y0 = max(0, box.x_min), max(0, box.y_min)
    x1, y1 = min(w - 1, box.x_max), min(h - 1, box.y_max)
    rgb[y0, x0 : x1 + 1] = color
    rgb[y1, x0 : x1 + 1] = color
    rgb[y0 : y1 + 1, x0] = color
    rgb[y0 : y1 + 1, x1] = color


def _draw_dot(rgb, x, y, color, radius=3):
    h, w = rgb.shape[:2]
    y0, y1 = max(0, y - radius), min(h, y + radius + 1)
    x0, x1 = max(0, x - radius), min(w, x + radius + 1)
    rgb[y0:y1, x0:x1] = color


class _Dumper:
    """Writes numbered stage images when a debug directory is given."""

    def __init__(self, debug_dir):
        self.dir = Path(debug_dir) if debug_dir is not None else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def dump(self, name: str, data: np.ndarray):
        if self.dir is not None:
            save_png(data, self.dir / f"{name}.png")


def segment_array(data: np.ndarray, cfg: PipelineConfig, debug_dir=None) -> SegmentationResult:
    """Run the full pipeline on raw image data (any supported channel
    layout).  debug_dir, when set, receives the numbered stage dumps."""
    dumper = _Dumper(debug_dir)
    timings: dict[str, float] = {}
    warnings: list[str] = []

    def timed(name):
        class _T:
            def __enter__(self_t):
                self_t.t0 = time.perf_counter()

            def __exit__(self_t, *exc):
                timings[name] = timings.get(name, 0.0) + time.perf_counter() - self_t.t0

        return _T()

    with timed("resize"):
        gray = raster.to_grayscale(data)
        gray = raster.resize_to_min_width(gray, cfg.min_width)
    dumper.dump("01_gray", gray.data)
    h, w = gray.height, gray.width

    with timed("binarize"):
        binary = raster.binarize(gray, cfg.polarity, cfg.otsu_mode, cfg.otsu_tile_size)
    dumper.dump("02_binary", _mask_to_png(binary.data))

    with timed("canny"):
        edge_src = binary if cfg.canny_input == "binary" else gray
        edges = raster.canny_edges(edge_src, cfg.canny_low, cfg.canny_high, cfg.canny_sigma)
    dumper.dump("03_edges", _mask_to_png(edges.data))

    with timed("denoise"):
        se = morph.StructuringElement(cfg.open_se_shape, cfg.open_se_width, cfg.open_se_height)
        denoised, opened, removed = morph.remove_noise_detailed(
            binary, se, cfg.dilate_iters, cfg.fg_dist_ratio, cfg.noise_min_area
        )
    dumper.dump("04_opened", _mask_to_png(opened.data))
    dumper.dump("05_sure_fg", _mask_to_png(removed.data))
    dumper.dump("06_denoised", _mask_to_png(denoised.data))

    with timed("hough_lines"):
        min_len = cfg.line_min_len if cfg.line_min_len is not None else 0.05 * w
        line_hits = hough.hough_lines(
            edges,
            rho_res=cfg.line_rho_res,
            theta_res=math.radians(cfg.line_theta_res_deg),
            votes_min=cfg.line_votes_min,
            min_len=min_len,
            max_gap=cfg.line_max_gap,
            theta_window=math.radians(cfg.line_theta_window_deg),
        )
        reinforced = hough.reinforce_matra(denoised, line_hits, cfg.matra_thickness)
    if dumper.dir is not None:
        vis = _to_rgb(_mask_to_png(denoised.data))
        for hit in line_hits:
            for x, y in hough._bresenham(hit.x1, hit.y1, hit.x2, hit.y2):
                if 0 <= y < h and 0 <= x < w:
                    vis[y, x] = (230, 25, 75)
        dumper.dump("07_hough_lines", vis)

    with timed("hough_circles"):
        circle_hits = hough.hough_circles(
            reinforced,
            r_min=cfg.circle_r_min,
            r_max=cfg.circle_r_max,
            votes_min=cfg.circle_votes_min,
            center_min_dist=cfg.circle_center_min_dist,
            sigma=cfg.canny_sigma,
        )
        broken = hough.break_circles(reinforced, circle_hits, cfg.circle_erase_thickness)
    dumper.dump("08_circles_removed", _mask_to_png(broken.data))

    with timed("components"):
        boxes = comp.find_components(
            broken, cfg.connectivity, cfg.box_min_area, cfg.box_area_mode
        )
    if dumper.dir is not None:
        vis = _to_rgb(_mask_to_png(broken.data))
        for b in boxes.boxes:
            _draw_rect(vis, b, (60, 180, 75))
            cx, cy = b.midpoint
            _draw_dot(vis, int(cx), int(cy), (230, 25, 75), 2)
        dumper.dump("09_boxes", vis)

    with timed("cluster"):
        lines: list[lineclust.TextLine] = []
        labels = np.zeros(0, dtype=np.int64)
        if len(boxes) > 0:
            cys = [b.midpoint[1] for b in boxes.boxes]
            eps_cut = (
                cfg.optics_eps_cut
                if cfg.optics_eps_cut is not None
                else lineclust.auto_eps_cut(cys, h)
            )
            params = lineclust.OpticsParams(
                min_samples=cfg.optics_min_samples,
                max_eps=cfg.resolved_max_eps(),
                eps_cut=eps_cut,
            )
            ordering = lineclust.optics_order(cys, params)
            labels = lineclust.extract_clusters(ordering, params)
            lines = lineclust.assemble_lines(boxes, labels)
        if not lines:
            warnings.append("no text lines detected")
    if dumper.dir is not None:
        vis = _to_rgb(np.full((h, w), 255, dtype=np.uint8))
        for b, lab in zip(boxes.boxes, labels):
            cx, cy = b.midpoint
            color = _PALETTE[lab % len(_PALETTE)] if lab >= 0 else (128, 128, 128)
            _draw_dot(vis, int(cx), int(cy), color)
        dumper.dump("10_clusters", vis)
        vis = _to_rgb(gray.data)
        for line in lines:
            _draw_rect(vis, line.crop, _PALETTE[line.line_index % len(_PALETTE)])
        dumper.dump("11_line_boxes", vis)

    with timed("crop"):
        crops = lineclust.crop_lines(gray, lines)

    return SegmentationResult(
        image=gray,
        lines=lines,
        crops=crops,
        config=cfg,
        timings=timings,
        warnings=warnings,
    )
