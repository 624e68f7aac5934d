"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
always available.  Set LINESEG_KERNELS=python or LINESEG_KERNELS=compiled
to force a backend (forcing an unavailable compiled backend is an error).
Both backends produce byte-identical outputs, so the choice only affects
speed.
"""

import os

from . import _fallback

_KERNEL_NAMES = (
    "nonmax_suppress",
    "hysteresis",
    "binary_erode",
    "binary_dilate",
    "distance_transform",
    "label_components",
    "hough_line_accumulate",
    "hough_circle_accumulate",
)

try:
    from . import _core
except ImportError:
    _core = None

_impl = None
BACKEND = ""


def available_backends():
    names = ["python"]
    if _core is not None:
        names.insert(0, "compiled")
    return names


def use_backend(name):
    """Rebind the exported kernels to the named backend."""
    global _impl, BACKEND
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernels requested but the extension is not built")
        _impl = _core
    elif name == "python":
        _impl = _fallback
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    BACKEND = name
    for fn in _KERNEL_NAMES:
        globals()[fn] = getattr(_impl, fn)


_forced = os.environ.get("LINESEG_KERNELS", "").strip().lower()
if _forced:
    use_backend(_forced)
else:
    use_backend("compiled" if _core is not None else "python")
