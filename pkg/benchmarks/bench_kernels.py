"""Compare the compiled kernel backend against the numpy fallback.

Times each low-level kernel on a realistic synthetic page, checks that
both backends return identical results, then times one full pipeline
run per backend.

    python3 benchmarks/bench_kernels.py [--repeats 5] [--seed 0]
"""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from synth import TUNED_CONFIG, make_page  # noqa: E402

from lineseg import _kernels as K  # noqa: E402
from lineseg.config import PipelineConfig  # noqa: E402
from lineseg.morph import StructuringElement  # noqa: E402
from lineseg.pipeline import segment_array  # noqa: E402


def build_inputs(seed):
    """One argument tuple per kernel, dtypes matching production calls."""
    page = make_page(seed)
    mask = np.ascontiguousarray((page.image < 128).astype(np.uint8))
    h, w = mask.shape

    field = page.image.astype(np.float64)
    gy, gx = np.gradient(field)
    gx = np.ascontiguousarray(gx)
    gy = np.ascontiguousarray(gy)
    mag = np.ascontiguousarray(np.hypot(gx, gy))
    strong = (mag >= np.percentile(mag, 99)).astype(np.uint8)
    weak = (mag >= np.percentile(mag, 95)).astype(np.uint8)

    ys, xs = np.nonzero(mask)
    ys = ys.astype(np.int64)
    xs = xs.astype(np.int64)
    thetas = np.linspace(math.pi / 2 - 0.1, math.pi / 2 + 0.1, 21)
    diag = math.hypot(w - 1, h - 1)
    n_rho = int(math.floor(2.0 * diag + 0.5)) + 1

    m = np.maximum(np.hypot(gx[ys, xs], gy[ys, xs]), 1e-12)
    ux = np.ascontiguousarray(gx[ys, xs] / m)
    uy = np.ascontiguousarray(gy[ys, xs] / m)

    offsets = StructuringElement("rect", 3, 3).offsets()
    return {
        "nonmax_suppress": (mag, gx, gy),
        "hysteresis": (weak, strong),
        "binary_erode": (mask, offsets),
        "binary_dilate": (mask, offsets),
        "distance_transform": (mask,),
        "label_components": (mask, 8),
        "hough_line_accumulate": (ys, xs, np.cos(thetas), np.sin(thetas), 1.0, diag, n_rho),
        "hough_circle_accumulate": (ys, xs, ux, uy, 18, 60, h, w),
    }


def equal(a, b):
    if isinstance(a, tuple):
        return all(equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def best_of(fn, args, repeats):
    best = math.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    parser.add_argument("--seed", type=int, default=0, help="synthetic page seed")
    args = parser.parse_args(argv)

    backends = K.available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; timing the python fallback only")

    inputs = build_inputs(args.seed)
    original = K.BACKEND
    times = {name: {} for name in inputs}
    results = {}
    try:
        for backend in backends:
            K.use_backend(backend)
            for name, kernel_args in inputs.items():
                dt, result = best_of(getattr(K, name), kernel_args, args.repeats)
                times[name][backend] = dt
                if name in results and not equal(results[name], result):
                    raise AssertionError(f"{name}: backends disagree")
                results[name] = result

        page_times = {}
        cfg = PipelineConfig(**TUNED_CONFIG)
        image = make_page(args.seed).image
        for backend in backends:
            K.use_backend(backend)
            page_times[backend], _ = best_of(segment_array, (image, cfg), max(1, args.repeats // 2))
    finally:
        K.use_backend(original)

    width = max(len(n) for n in inputs) + 2
    header = f"{'kernel':<{width}}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name in inputs:
        row = f"{name:<{width}}"
        for backend in backends:
            row += f"{times[name][backend] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            ratio = times[name]["python"] / times[name]["compiled"]
            row += f"{ratio:>9.1f}x"
        print(row)
    print("-" * len(header))
    row = f"{'full pipeline':<{width}}"
    for backend in backends:
        row += f"{page_times[backend] * 1e3:>10.2f}ms"
    if len(backends) == 2:
        row += f"{page_times['python'] / page_times['compiled']:>9.1f}x"
    print(row)
    print("\nall kernels agree across backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
