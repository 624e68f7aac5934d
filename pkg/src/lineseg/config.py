"""Pipeline configuration: every tunable, JSON-loadable, CLI-overridable."""

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ParameterError


@dataclass(frozen=True)
class PipelineConfig:
    """All segmentation tunables with their defaults.

    Values of None mean "derive from the image": min_len defaults to 5% of
    the image width, noise_min_area to 1e-4 and box_min_area to 5e-5 of the
    image area, eps_cut to the auto rule.  Angles are degrees in the config
    for readability and converted where used.
    """

    # raster
    min_width: int = 1000
    polarity: str = "ink-dark"
    otsu_mode: str = "global"
    otsu_tile_size: int = 64
    canny_low: float = 50.0
    canny_high: float = 150.0
    canny_sigma: float = 1.4
    canny_input: str = "binary"  # or "gray"
    # morph
    open_se_shape: str = "rect"
    open_se_width: int = 3
    open_se_height: int = 3
    dilate_iters: int = 2
    fg_dist_ratio: float = 0.4
    noise_min_area: float | None = None
    # hough lines
    line_rho_res: float = 1.0
    line_theta_res_deg: float = 1.0
    line_theta_window_deg: float = 5.0
    line_votes_min: int = 80
    line_min_len: float | None = None
    line_max_gap: float = 10.0
    matra_thickness: int = 3
    # hough circles
    circle_r_min: int = 8
    circle_r_max: int = 40
    circle_votes_min: int = 40
    circle_center_min_dist: float = 20.0
    circle_erase_thickness: int = 2
    # components
    connectivity: int = 8
    box_min_area: float | None = None
    box_area_mode: str = "bbox"
    # clustering
    optics_min_samples: int = 3
    optics_max_eps: float | None = None  # None = unbounded
    optics_eps_cut: float | None = None  # None = auto rule
    # evaluation defaults (used by the evaluate command)
    eval_t_a: float = 0.80
    eval_score_mode: str = "iou"
    eval_assignment: str = "greedy"
    eval_ap_mode: str = "interp"

    def resolved_max_eps(self) -> float:
        return math.inf if self.optics_max_eps is None else self.optics_max_eps

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_dict(cls, values: dict) -> "PipelineConfig":
        unknown = sorted(set(values) - set(cls.field_names()))
        if unknown:
            raise ParameterError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**values)

    @classmethod
    def from_file(cls, path: Path) -> "PipelineConfig":
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParameterError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(values, dict):
            raise ParameterError(f"config file {path} must hold a JSON object")
        return cls.from_dict(values)

    def replaced(self, **overrides) -> "PipelineConfig":
        return dataclasses.replace(self, **overrides)

    def save(self, path: Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
