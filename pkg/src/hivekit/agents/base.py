"""Policy interface and the random baseline.

A policy maps a named observation dict to a RobotCommand.  Policies with
internal controllers (state machines) reset per episode via reset_episode().
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config import ControlMode, EnvConfig
from ..rng import CounterRng
from ..robot import Gripper, RobotCommand

RANDOM_VELOCITY_MAX = 2.0  # rad/s, sampling range for velocity-mode actions


@dataclass
class PolicyDescriptor:
    kind: str
    env_id: str = ""
    obs_keys: tuple[str, ...] = ()


class Policy:
    descriptor = PolicyDescriptor(kind="abstract")

    def reset_episode(self) -> None:
        pass

    def act(self, obs: dict[str, np.ndarray], rng: CounterRng) -> RobotCommand:
        raise NotImplementedError


class RandomPolicy(Policy):
    """Uniform actions in the robot's native command space; gripper untouched."""

    def __init__(self, cfg: EnvConfig):
        self.mode = cfg.control_mode
        self.model = cfg.robot
        self.descriptor = PolicyDescriptor(kind="random", env_id=cfg.env_id)

    def act(self, obs: dict[str, np.ndarray], rng: CounterRng) -> RobotCommand:
        n = self.model.n_joints
        values = np.zeros(n)
        if self.mode is ControlMode.POSITION:
            for j, (lo, hi) in enumerate(self.model.joint_limits):
                values[j] = rng.uniform(lo, hi)
        elif self.mode is ControlMode.VELOCITY:
            for j in range(n):
                values[j] = rng.uniform(-RANDOM_VELOCITY_MAX, RANDOM_VELOCITY_MAX)
        else:
            for j, tq in enumerate(self.model.torque_limits):
                values[j] = rng.uniform(-tq, tq)
        return RobotCommand(mode=self.mode, values=values, gripper=Gripper.NO_CHANGE)


class ZeroPolicy(Policy):
    """Holds still: zero velocity/torque, or position at the current joints."""

    def __init__(self, cfg: EnvConfig):
        self.mode = cfg.control_mode
        self.n = cfg.robot.n_joints
        self.descriptor = PolicyDescriptor(kind="zero", env_id=cfg.env_id)

    def act(self, obs: dict[str, np.ndarray], rng: CounterRng) -> RobotCommand:
        if self.mode is ControlMode.POSITION and "jointpos" in obs:
            return RobotCommand(self.mode, np.asarray(obs["jointpos"], dtype=np.float64))
        return RobotCommand(self.mode, np.zeros(self.n))


@dataclass(frozen=True)
class PolicyRef:
    """Serializable policy reference, resolvable inside worker processes."""

    kind: str  # "random" | "zero" | "expert" | "bc"
    path: Optional[str] = None  # model file for kind="bc"


def resolve_policy(ref: PolicyRef, cfg: EnvConfig) -> Policy:
    if ref.kind == "random":
        return RandomPolicy(cfg)
    if ref.kind == "zero":
        return ZeroPolicy(cfg)
    if ref.kind == "expert":
        from .experts import scripted_expert

        return scripted_expert(cfg.task, cfg.robot)
    if ref.kind == "bc":
        from .bc import BCPolicy, load_bc

        if ref.path is None:
            raise ValueError("bc policy reference needs a model path")
        return BCPolicy(load_bc(ref.path))
    raise ValueError(f"unknown policy kind {ref.kind!r}")
