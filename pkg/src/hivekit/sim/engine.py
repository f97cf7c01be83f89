"""Planar physics engine: kinematic chain, free discs, grasping, pendulum.

All stepping is a pure function of (state, model, command, dt): no hidden
globals, no wall clock, no platform-dependent float ordering.  Constants
are fixed here and documented in docs/sim_model.md.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from ..config import ControlMode, RandomizationSpec, RobotKind, RobotModelSpec
from ..rng import CounterRng
from . import kernels
from .state import SimState

# Control and contact constants.  kp/kd give a critically damped position
# loop for unit joint inertia; disc damping keeps pushed objects from
# coasting forever.  Stable at dt = 0.01 s with frame_skip up to 5.
KP = 100.0
KD = 20.0
OBJ_DAMPING = 2.0
GRAVITY = 9.81
PENDULUM_MASS = 1.0
PENDULUM_JOINT_DAMPING = 0.2
LINK_HALF_WIDTH = 0.04
EE_CONTACT_RADIUS = 0.05  # the end effector is a paddle, not a point
PALETTE_SIZE = 8

# Canonical home pose: bent-elbow arm, hanging pendulum.
ARM_HOME_ANGLE = 0.5
PENDULUM_HOME_ANGLE = -math.pi / 2.0

_MODE_CODE = {
    ControlMode.POSITION: kernels.MODE_POSITION,
    ControlMode.VELOCITY: kernels.MODE_VELOCITY,
    ControlMode.TORQUE: kernels.MODE_TORQUE,
}

_KIND_CODE = {
    RobotKind.PLANAR_ARM: kernels.KIND_ARM,
    RobotKind.PENDULUM: kernels.KIND_PENDULUM,
}


def canonical_joint_pos(model: RobotModelSpec) -> np.ndarray:
    if model.kind is RobotKind.PENDULUM:
        return np.array([PENDULUM_HOME_ANGLE])
    return np.full(model.n_joints, ARM_HOME_ANGLE)


def forward_kinematics(model: RobotModelSpec, joint_pos) -> np.ndarray:
    """Frame positions of the chain: (n+1, 2), frames[0] = origin, last = EE."""
    q = np.asarray(joint_pos, dtype=np.float64)
    if q.shape != (model.n_joints,):
        raise ValueError(
            f"joint_pos has dimension {q.shape}, robot has {model.n_joints} joints"
        )
    frames = np.zeros((model.n_joints + 1, 2))
    acc = 0.0
    x = 0.0
    y = 0.0
    for k in range(model.n_joints):
        acc = acc + float(q[k])
        x = x + model.link_lengths[k] * math.cos(acc)
        y = y + model.link_lengths[k] * math.sin(acc)
        frames[k + 1, 0] = x
        frames[k + 1, 1] = y
    return frames


def end_effector(model: RobotModelSpec, joint_pos) -> np.ndarray:
    return forward_kinematics(model, joint_pos)[-1]


def ee_xy(model: RobotModelSpec, joint_pos) -> tuple[float, float]:
    """End-effector position as plain floats (hot-path variant)."""
    acc = 0.0
    x = 0.0
    y = 0.0
    lengths = model.link_lengths
    for k in range(len(lengths)):
        acc = acc + float(joint_pos[k])
        x = x + lengths[k] * math.cos(acc)
        y = y + lengths[k] * math.sin(acc)
    return x, y


def jacobian(model: RobotModelSpec, joint_pos) -> np.ndarray:
    """End-effector Jacobian, (2, n)."""
    q = np.asarray(joint_pos, dtype=np.float64)
    n = model.n_joints
    J = np.zeros((2, n))
    acc = 0.0
    # column j accumulates contributions of links j..n-1
    sums = np.cumsum(q)
    for j in range(n):
        sx = 0.0
        sy = 0.0
        for k in range(j, n):
            sx += -model.link_lengths[k] * math.sin(sums[k])
            sy += model.link_lengths[k] * math.cos(sums[k])
        J[0, j] = sx
        J[1, j] = sy
    return J


@functools.lru_cache(maxsize=64)
def model_arrays(model: RobotModelSpec):
    """Kernel-ready arrays for a robot model (cached; models are frozen)."""
    return (
        np.asarray(model.link_lengths, dtype=np.float64),
        np.array([l for l, _ in model.joint_limits]),
        np.array([h for _, h in model.joint_limits]),
        np.asarray(model.torque_limits, dtype=np.float64),
        _KIND_CODE[model.kind],
    )


def _check_command(model: RobotModelSpec, values: np.ndarray) -> None:
    if values.shape != (model.n_joints,):
        raise ValueError(
            f"command has dimension {values.shape[0] if values.ndim else '?'}, "
            f"robot has {model.n_joints} joints"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("command contains non-finite values")


def step_n(
    state: SimState,
    model: RobotModelSpec,
    mode: ControlMode,
    values,
    dt: float,
    n_sub: int,
) -> SimState:
    """n_sub semi-implicit Euler substeps of dt each; returns a new state."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    values = np.asarray(values, dtype=np.float64)
    _check_command(model, values)
    out = state.copy()
    link, lo, hi, tq, kind_code = model_arrays(model)
    kernels.step_chain(
        out.joint_pos,
        out.joint_vel,
        _MODE_CODE[mode],
        values,
        link,
        lo,
        hi,
        tq,
        out.obj_pos,
        out.obj_vel,
        out.obj_radius,
        out.grasped,
        kind_code,
        dt,
        n_sub,
        KP,
        KD,
        OBJ_DAMPING,
        GRAVITY,
        PENDULUM_MASS,
        PENDULUM_JOINT_DAMPING,
        EE_CONTACT_RADIUS,
    )
    out.time = state.time + n_sub * dt
    return out


def sim_step(
    state: SimState, model: RobotModelSpec, mode: ControlMode, values, dt: float
) -> SimState:
    """One physics substep."""
    return step_n(state, model, mode, values, dt, 1)


def attempt_grasp(state: SimState, model: RobotModelSpec) -> SimState:
    """Grasp the nearest disc whose center is within gripper_radius of the EE.

    No-op when already holding or nothing is in range; equidistant discs go
    to the lowest index.
    """
    if state.grasped >= 0 or state.n_objects == 0:
        return state
    ee = end_effector(model, state.joint_pos)
    r2 = model.gripper_radius * model.gripper_radius
    best = -1
    best_d2 = math.inf
    for i in range(state.n_objects):
        dx = float(state.obj_pos[i, 0]) - float(ee[0])
        dy = float(state.obj_pos[i, 1]) - float(ee[1])
        d2 = dx * dx + dy * dy
        if d2 <= r2 and d2 < best_d2:
            best = i
            best_d2 = d2
    if best < 0:
        return state
    out = state.copy()
    out.grasped = best
    return out


def release_grasp(state: SimState) -> SimState:
    if state.grasped < 0:
        return state
    out = state.copy()
    out.grasped = -1
    return out


def randomize_scene(
    state: SimState, spec: RandomizationSpec, rng: CounterRng
) -> SimState:
    """Draw object positions, then masses, then the palette permutation.

    Draw order is frozen: per object index, x then y from the box; then one
    mass per object; then, if enabled, a Fisher-Yates shuffle of the color
    indices (descending i, j = randbelow(i + 1)).
    """
    out = state.copy()
    x0, y0, x1, y1 = spec.object_position_box
    for i in range(out.n_objects):
        out.obj_pos[i, 0] = rng.uniform(x0, x1)
        out.obj_pos[i, 1] = rng.uniform(y0, y1)
    m_lo, m_hi = spec.object_mass_range
    for i in range(out.n_objects):
        out.obj_mass[i] = rng.uniform(m_lo, m_hi)
    if spec.scene_palette_randomize:
        colors = out.obj_color
        for i in range(out.n_objects - 1, 0, -1):
            j = rng.randbelow(i + 1)
            colors[i], colors[j] = int(colors[j]), int(colors[i])
    out.rng_state = rng.state
    return out


def pendulum_energy(model: RobotModelSpec, state: SimState) -> float:
    """Total mechanical energy; potential reference at the bottom pose."""
    length = model.link_lengths[0]
    inertia = PENDULUM_MASS * length * length
    theta = float(state.joint_pos[0])
    omega = float(state.joint_vel[0])
    kinetic = 0.5 * inertia * omega * omega
    potential = PENDULUM_MASS * GRAVITY * length * (1.0 + math.sin(theta))
    return kinetic + potential


def camera_extent(model: RobotModelSpec) -> float:
    """Half-width of the square viewport the grid camera samples."""
    return 1.1 * float(sum(model.link_lengths))


def render_camera(
    model: RobotModelSpec, state: SimState, width: int, height: int
) -> np.ndarray:
    """Rasterize the scene into a flat row-major [0,1] occupancy image."""
    out = np.zeros(width * height)
    kernels.raster_scene(
        out,
        width,
        height,
        camera_extent(model),
        state.joint_pos,
        np.asarray(model.link_lengths, dtype=np.float64),
        state.obj_pos,
        state.obj_radius,
        state.obj_color,
        LINK_HALF_WIDTH,
        PALETTE_SIZE,
    )
    return out
