"""Actuation/sensing contract shared by the sim and hardware backends."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..config import ControlMode


class Gripper(Enum):
    NO_CHANGE = 0
    GRASP = 1
    RELEASE = 2


MODE_CODE = {
    ControlMode.POSITION: 0,
    ControlMode.VELOCITY: 1,
    ControlMode.TORQUE: 2,
}
CODE_MODE = {v: k for k, v in MODE_CODE.items()}


@dataclass
class RobotCommand:
    mode: ControlMode
    values: np.ndarray  # rad | rad/s | N*m depending on mode
    gripper: Gripper = Gripper.NO_CHANGE

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)

    def as_row(self) -> np.ndarray:
        """Flat serialized form: values + gripper code column."""
        return np.concatenate([self.values, [float(self.gripper.value)]])

    @classmethod
    def from_row(cls, mode: ControlMode, row: np.ndarray) -> "RobotCommand":
        return cls(mode=mode, values=np.asarray(row[:-1], dtype=np.float64),
                   gripper=Gripper(int(round(float(row[-1])))))


@dataclass
class SensorFrame:
    timestamp: float
    readings: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class SceneView:
    """Ground-truth snapshot the sensor pipeline reads from.

    Both backends produce this uniformly: the sim from its state, the
    hardware client from the wire state echo merged with configured static
    object attributes.
    """

    time: float
    joint_pos: np.ndarray
    joint_vel: np.ndarray
    obj_pos: np.ndarray
    obj_vel: np.ndarray
    obj_radius: np.ndarray
    obj_color: np.ndarray
    grasped: int
    target: np.ndarray  # active goal marker, (2,)


class RobotError(Exception):
    pass


class ModeMismatchError(RobotError):
    def __init__(self, expected: ControlMode, got: ControlMode):
        super().__init__(
            f"command mode {got.value!r} does not match configured control mode "
            f"{expected.value!r}"
        )


class EpisodeSeedError(RobotError):
    pass
