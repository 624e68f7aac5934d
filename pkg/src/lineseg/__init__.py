"""Text-line segmentation for scanned handwritten pages.

Unsupervised pipeline (threshold, edges, morphology, Hough stroke/loop
handling, connected components, OPTICS clustering over midpoint heights)
plus a matching-based segmentation evaluator.
"""

from . import _kernels
from .components import BoundingBox, ComponentSet, find_components, label_components
from .config import PipelineConfig
from .errors import (
    AnnotationParseError,
    FormatError,
    InvariantError,
    LinesegError,
    ParameterError,
    UndefinedRateError,
)
from .evaluation import (
    EvalCounts,
    EvalReport,
    MatchConfig,
    compute_fm,
    eleven_point_ap,
    evaluate_dataset,
    match_lines,
    mean_ap,
)
from .lineclust import OpticsParams, TextLine
from .pipeline import SegmentationResult, segment_array
from .raster import BinaryImage, RasterImage

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Which kernel backend this process is using ('compiled' or 'python')."""
    return _kernels.BACKEND


__all__ = [
    "AnnotationParseError",
    "BinaryImage",
    "BoundingBox",
    "ComponentSet",
    "EvalCounts",
    "EvalReport",
    "FormatError",
    "InvariantError",
    "LinesegError",
    "MatchConfig",
    "OpticsParams",
    "ParameterError",
    "PipelineConfig",
    "RasterImage",
    "SegmentationResult",
    "TextLine",
    "UndefinedRateError",
    "compute_fm",
    "eleven_point_ap",
    "evaluate_dataset",
    "find_components",
    "kernel_backend",
    "label_components",
    "match_lines",
    "mean_ap",
    "segment_array",
]
