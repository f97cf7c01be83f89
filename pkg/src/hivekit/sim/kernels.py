"""Kernel backend selection: compiled extension if available, else pure Python.

Set HIVEKIT_PURE_PYTHON=1 to force the fallback (used by the comparison
benchmark and the bit-parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HIVEKIT_PURE_PYTHON") == "1":
    _impl = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        _impl = _kernels_py
        COMPILED = False

step_chain = _impl.step_chain
raster_scene = _impl.raster_scene

MODE_POSITION = _kernels_py.MODE_POSITION
MODE_VELOCITY = _kernels_py.MODE_VELOCITY
MODE_TORQUE = _kernels_py.MODE_TORQUE
KIND_ARM = _kernels_py.KIND_ARM
KIND_PENDULUM = _kernels_py.KIND_PENDULUM


def active_kernel() -> str:
    return "compiled" if COMPILED else "pure-python"


def load_impl(name: str):
    """Load a kernel implementation by name ('compiled' or 'pure-python')."""
    if name == "pure-python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels  # raises ImportError if not built

        return _kernels
    raise ValueError(f"unknown kernel implementation {name!r}")
