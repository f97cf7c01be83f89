"""Simulation state: a plain value, copied on every step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class ObjectView:
    """Read-only view of one disc (spec-shaped accessor)."""

    position: np.ndarray
    velocity: np.ndarray
    radius: float
    mass: float
    color_index: int


@dataclass
class SimState:
    time: float
    joint_pos: np.ndarray  # (n,) radians
    joint_vel: np.ndarray  # (n,) rad/s
    obj_pos: np.ndarray  # (m, 2) meters
    obj_vel: np.ndarray  # (m, 2) m/s
    obj_radius: np.ndarray  # (m,) meters
    obj_mass: np.ndarray  # (m,) kg
    obj_color: np.ndarray  # (m,) int32 palette indices
    grasped: int = -1  # object index, -1 when nothing is held
    rng_state: tuple[int, int, int, int] = (0, 0, 0, 0)

    @property
    def n_joints(self) -> int:
        return self.joint_pos.shape[0]

    @property
    def n_objects(self) -> int:
        return self.obj_pos.shape[0]

    @property
    def objects(self) -> list[ObjectView]:
        return [
            ObjectView(
                position=self.obj_pos[i],
                velocity=self.obj_vel[i],
                radius=float(self.obj_radius[i]),
                mass=float(self.obj_mass[i]),
                color_index=int(self.obj_color[i]),
            )
            for i in range(self.n_objects)
        ]

    def copy(self) -> "SimState":
        return SimState(
            time=self.time,
            joint_pos=self.joint_pos.copy(),
            joint_vel=self.joint_vel.copy(),
            obj_pos=self.obj_pos.copy(),
            obj_vel=self.obj_vel.copy(),
            obj_radius=self.obj_radius.copy(),
            obj_mass=self.obj_mass.copy(),
            obj_color=self.obj_color.copy(),
            grasped=self.grasped,
            rng_state=self.rng_state,
        )

    def as_vector(self) -> np.ndarray:
        """Dynamic quantities as one flat vector (used for replay diffs)."""
        return np.concatenate(
            [
                self.joint_pos,
                self.joint_vel,
                self.obj_pos.reshape(-1),
                self.obj_vel.reshape(-1),
            ]
        )

    def validate(self, n_joints: int) -> None:
        if self.joint_pos.shape != (n_joints,) or self.joint_vel.shape != (n_joints,):
            raise ValueError("joint arrays must match the robot joint count")
        if np.any(self.obj_radius <= 0) or np.any(self.obj_mass <= 0):
            raise ValueError("object radius and mass must be positive")
        if self.grasped >= self.n_objects:
            raise ValueError("grasped_object must index a valid object")


def make_state(
    joint_pos,
    joint_vel=None,
    obj_pos=None,
    obj_radius=None,
    obj_mass=None,
    obj_color=None,
    time: float = 0.0,
    grasped: int = -1,
    rng_state: Optional[tuple[int, int, int, int]] = None,
) -> SimState:
    """Convenience constructor normalizing array dtypes and shapes."""
    q = np.asarray(joint_pos, dtype=np.float64).copy()
    qd = (
        np.zeros_like(q)
        if joint_vel is None
        else np.asarray(joint_vel, dtype=np.float64).copy()
    )
    if obj_pos is None:
        m = 0
        opos = np.zeros((0, 2))
    else:
        opos = np.asarray(obj_pos, dtype=np.float64).reshape(-1, 2).copy()
        m = opos.shape[0]
    return SimState(
        time=time,
        joint_pos=q,
        joint_vel=qd,
        obj_pos=opos,
        obj_vel=np.zeros((m, 2)),
        obj_radius=(
            np.full(m, 0.06) if obj_radius is None else np.asarray(obj_radius, dtype=np.float64).copy()
        ),
        obj_mass=(
            np.full(m, 0.1) if obj_mass is None else np.asarray(obj_mass, dtype=np.float64).copy()
        ),
        obj_color=(
            np.arange(m, dtype=np.int32) if obj_color is None else np.asarray(obj_color, dtype=np.int32).copy()
        ),
        grasped=grasped,
        rng_state=rng_state if rng_state is not None else (0, 0, 0, 0),
    )


def states_equal(a: SimState, b: SimState) -> bool:
    """Exact (bitwise) equality of all dynamic fields."""
    return (
        a.time == b.time
        and a.grasped == b.grasped
        and np.array_equal(a.joint_pos, b.joint_pos)
        and np.array_equal(a.joint_vel, b.joint_vel)
        and np.array_equal(a.obj_pos, b.obj_pos)
        and np.array_equal(a.obj_vel, b.obj_vel)
        and np.array_equal(a.obj_radius, b.obj_radius)
        and np.array_equal(a.obj_mass, b.obj_mass)
        and np.array_equal(a.obj_color, b.obj_color)
    )
