"""Task semantics: dense rewards, success predicates, goal randomization.

Success is a pure predicate on state and never reads the reward; reward
shapes and coefficients are fixed here.  The boundary rule is strict:
distance exactly equal to success_radius is a failure.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Optional

import numpy as np

from ..config import RandomizationSpec, RobotModelSpec, TaskKind, TaskSpec
from ..rng import CounterRng
from ..sim import engine
from ..sim.state import SimState

# reward coefficients
PUSH_EE_WEIGHT = 0.5
PENDULUM_VEL_WEIGHT = 0.01
PENDULUM_TORQUE_WEIGHT = 0.001
PENDULUM_MAX_VEL = 1.0  # rad/s bound inside the success predicate


def wrap_angle(a: float) -> float:
    """Wrap to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def draw_goal(task: TaskSpec, randomization: Optional[RandomizationSpec], rng: CounterRng) -> tuple[float, ...]:
    """Episode target: the configured one, or a draw from the randomization box."""
    if not task.goal_randomize:
        return task.target
    if randomization is None:
        raise ValueError("goal_randomize requires a randomization spec")
    x0, y0, x1, y1 = randomization.object_position_box
    return (rng.uniform(x0, x1), rng.uniform(y0, y1))


def episode_task(task: TaskSpec, goal: tuple[float, ...]) -> TaskSpec:
    return replace(task, target=goal)


def goal_marker(task: TaskSpec, model: RobotModelSpec) -> np.ndarray:
    """Workspace-coordinates marker for the active goal (pendulum: the tip pose)."""
    if task.kind is TaskKind.PENDULUM_SWINGUP:
        angle = task.target[0]
        length = model.link_lengths[0]
        return np.array([length * math.cos(angle), length * math.sin(angle)])
    if task.kind is TaskKind.PICK_PLACE:
        return np.asarray(task.bin_center, dtype=np.float64)
    return np.asarray(task.target, dtype=np.float64)


def _goal_point(task: TaskSpec) -> np.ndarray:
    if task.kind is TaskKind.PICK_PLACE:
        return np.asarray(task.bin_center, dtype=np.float64)
    return np.asarray(task.target, dtype=np.float64)


def compute_reward(
    task: TaskSpec,
    state: SimState,
    model: RobotModelSpec,
    command_values: Optional[np.ndarray] = None,
    ee=None,
) -> float:
    """Dense shaping reward; command_values feeds the pendulum torque penalty."""
    if ee is None:
        ee = engine.ee_xy(model, state.joint_pos)
    if task.kind is TaskKind.REACH:
        dx = float(ee[0]) - task.target[0]
        dy = float(ee[1]) - task.target[1]
        return -math.sqrt(dx * dx + dy * dy)
    if task.kind in (TaskKind.PUSH, TaskKind.PICK_PLACE):
        gx, gy = _goal_point(task)
        ox = float(state.obj_pos[0, 0])
        oy = float(state.obj_pos[0, 1])
        d_goal = math.sqrt((ox - gx) ** 2 + (oy - gy) ** 2)
        d_ee = math.sqrt((float(ee[0]) - ox) ** 2 + (float(ee[1]) - oy) ** 2)
        return -d_goal - PUSH_EE_WEIGHT * d_ee
    if task.kind is TaskKind.PENDULUM_SWINGUP:
        err = wrap_angle(float(state.joint_pos[0]) - task.target[0])
        omega = float(state.joint_vel[0])
        u = float(command_values[0]) if command_values is not None else 0.0
        return -(err * err) - PENDULUM_VEL_WEIGHT * omega * omega - PENDULUM_TORQUE_WEIGHT * u * u
    raise ValueError(f"unknown task kind {task.kind!r}")


def compute_success(
    task: TaskSpec,
    state: SimState,
    model: RobotModelSpec,
    ee=None,
) -> bool:
    """Pure predicate on state; strict inequality at the boundary."""
    if task.kind is TaskKind.REACH:
        if ee is None:
            ee = engine.ee_xy(model, state.joint_pos)
        dx = float(ee[0]) - task.target[0]
        dy = float(ee[1]) - task.target[1]
        return math.sqrt(dx * dx + dy * dy) < task.success_radius
    if task.kind is TaskKind.PUSH:
        dx = float(state.obj_pos[0, 0]) - task.target[0]
        dy = float(state.obj_pos[0, 1]) - task.target[1]
        return math.sqrt(dx * dx + dy * dy) < task.success_radius
    if task.kind is TaskKind.PICK_PLACE:
        dx = float(state.obj_pos[0, 0]) - task.bin_center[0]
        dy = float(state.obj_pos[0, 1]) - task.bin_center[1]
        in_bin = math.sqrt(dx * dx + dy * dy) < task.bin_radius
        return in_bin and state.grasped != 0
    if task.kind is TaskKind.PENDULUM_SWINGUP:
        err = abs(wrap_angle(float(state.joint_pos[0]) - task.target[0]))
        return err < task.success_radius and abs(float(state.joint_vel[0])) < PENDULUM_MAX_VEL
    raise ValueError(f"unknown task kind {task.kind!r}")
