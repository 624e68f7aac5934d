"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure to cythonize or compile downgrades to a pure
Python build instead of aborting the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "lineseg._kernels._core",
            ["src/lineseg/_kernels/_core.pyx"],
            include_dirs=[np.get_include()],
            # fp-contract off: fused multiply-add would round differently from
            # the numpy fallback, and the two backends must match bit for bit.
            extra_compile_args=["-O3", "-ffp-contract=off"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # noqa: BLE001 - degrade to pure build on any toolchain issue
    print(f"lineseg: compiled kernels disabled ({exc}); using pure Python fallback")
    ext_modules = []

setup(ext_modules=ext_modules)
