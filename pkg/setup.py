"""Build script for the optional compiled simulation kernels.

The package works without the extension (a pure-Python kernel module is
selected at import time); building it just makes stepping and camera
rasterization much faster.  -ffp-contract=off keeps the compiled float
pipeline bit-identical to the pure-Python one (no FMA contraction).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "hivekit.sim._kernels",
                ["src/hivekit/sim/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
