"""Compiled and pure-Python kernels must agree bit-for-bit."""

import numpy as np
import pytest

from hivekit.rng import CounterRng
from hivekit.sim import kernels
from hivekit.sim import _kernels_py

compiled = pytest.importorskip(
    "hivekit.sim._kernels", reason="compiled kernels not built"
)


def _random_inputs(seed, n_joints=2, n_obj=2, kind=0):
    rng = CounterRng(seed)
    q = np.array([rng.uniform(-2.5, 2.5) for _ in range(n_joints)])
    qd = np.array([rng.uniform(-3, 3) for _ in range(n_joints)])
    cmd = np.array([rng.uniform(-2, 2) for _ in range(n_joints)])
    L = np.array([rng.uniform(0.3, 1.0) for _ in range(n_joints)])
    lo = np.full(n_joints, -3.1)
    hi = np.full(n_joints, 3.1)
    tq = np.full(n_joints, 20.0)
    opos = np.array([[rng.uniform(-1, 1), rng.uniform(-1, 1)] for _ in range(n_obj)])
    ovel = np.array([[rng.uniform(-1, 1), rng.uniform(-1, 1)] for _ in range(n_obj)])
    orad = np.full(n_obj, 0.06)
    grasped = rng.randbelow(n_obj + 1) - 1
    mode = rng.randbelow(3)
    return q, qd, mode, cmd, L, lo, hi, tq, opos, ovel, orad, grasped, kind


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("kind", [0, 1])
def test_step_chain_bit_parity(seed, kind):
    n = 1 if kind == 1 else 2
    args = _random_inputs(seed, n_joints=n, kind=kind)
    a = [x.copy() if isinstance(x, np.ndarray) else x for x in args]
    b = [x.copy() if isinstance(x, np.ndarray) else x for x in args]
    common = dict(dt=0.01, n_sub=7, kp=100.0, kd=20.0, obj_damping=2.0,
                  gravity=9.81, pend_mass=1.0, pend_damping=0.2, ee_radius=0.05)
    compiled.step_chain(*a, **common)
    _kernels_py.step_chain(*b, **common)
    for x, y in zip(a, b):
        if isinstance(x, np.ndarray):
            assert np.array_equal(x, y)  # exact float bits


@pytest.mark.parametrize("seed", range(6))
def test_raster_bit_parity(seed):
    rng = CounterRng(100 + seed)
    q = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2)])
    L = np.array([0.8, 0.6])
    opos = np.array([[rng.uniform(-1, 1), rng.uniform(-1, 1)] for _ in range(3)])
    orad = np.array([0.06, 0.1, 0.08])
    ocolor = np.array([0, 3, 7], dtype=np.int32)
    out_a = np.zeros(48 * 32)
    out_b = np.zeros(48 * 32)
    compiled.raster_scene(out_a, 48, 32, 1.54, q, L, opos, orad, ocolor, 0.04, 8)
    _kernels_py.raster_scene(out_b, 48, 32, 1.54, q, L, opos, orad, ocolor, 0.04, 8)
    assert np.array_equal(out_a, out_b)


def test_selection_honors_env_var(monkeypatch):
    import importlib
    import hivekit.sim.kernels as km

    monkeypatch.setenv("HIVEKIT_PURE_PYTHON", "1")
    importlib.reload(km)
    assert km.active_kernel() == "pure-python"
    monkeypatch.delenv("HIVEKIT_PURE_PYTHON")
    importlib.reload(km)
    assert km.active_kernel() == "compiled"


def test_load_impl_names():
    assert kernels.load_impl("pure-python") is _kernels_py
    assert kernels.load_impl("compiled") is compiled
    with pytest.raises(ValueError):
        kernels.load_impl("gpu")
