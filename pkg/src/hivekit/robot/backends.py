"""The unified Robot over the sim and hardware backends.

Both backends expose the same surface: reset/apply_command/get_sensors plus
a ground-truth SceneView; the sensor pipeline (delay, noise, grid camera)
runs client-side so a command script produces identical SensorFrames on
either backend.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..config import Backend, EnvConfig
from ..rng import STREAM_SCENE, STREAM_SENSOR, CounterRng
from ..scene import canonical_scene
from ..sim import engine
from ..sim.state import SimState
from .base import (
    MODE_CODE,
    Gripper,
    ModeMismatchError,
    RobotCommand,
    RobotError,
    SceneView,
    SensorFrame,
)
from .sensors import SensorPipeline
from .wire import WireClient


class Robot:
    """Backend-independent surface; construct via robot_connect()."""

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        self.model = cfg.robot
        self.pipeline = SensorPipeline(cfg.sensors, cfg.robot)
        self._frame: Optional[SensorFrame] = None
        self._target = np.zeros(2)

    # -- shared ------------------------------------------------------------

    def set_target(self, target) -> None:
        """Active goal marker; part of the scene the sensors observe."""
        self._target = np.asarray(target, dtype=np.float64).reshape(2)

    def get_sensors(self) -> SensorFrame:
        if self._frame is None:
            raise RobotError("robot not reset")
        return self._frame

    def apply_command(self, cmd: RobotCommand) -> None:
        if cmd.mode is not self.cfg.control_mode:
            raise ModeMismatchError(self.cfg.control_mode, cmd.mode)
        if cmd.values.shape != (self.model.n_joints,):
            raise RobotError(
                f"command dimension {cmd.values.shape} != joint count {self.model.n_joints}"
            )
        if not np.all(np.isfinite(cmd.values)):
            raise RobotError("command contains non-finite values")
        self._actuate(cmd)
        self._frame = self.pipeline.capture(self.scene())

    def reset(self, episode_seed: int) -> SensorFrame:
        self._reset_backend(episode_seed)
        self.pipeline.reset(CounterRng(episode_seed, STREAM_SENSOR))
        self._frame = self.pipeline.capture(self.scene())
        return self._frame

    # -- backend hooks -----------------------------------------------------

    def _actuate(self, cmd: RobotCommand) -> None:
        raise NotImplementedError

    def _reset_backend(self, episode_seed: int) -> None:
        raise NotImplementedError

    def scene(self) -> SceneView:
        raise NotImplementedError

    @property
    def sim_time(self) -> float:
        return self.scene().time

    def snapshot_state(self) -> Optional[SimState]:
        """Full state snapshot; None when the backend cannot provide one."""
        return None

    def peek_state(self) -> Optional[SimState]:
        """Live state for read-only use (reward/success); never mutate it."""
        return None

    def close(self) -> None:
        pass


class SimRobot(Robot):
    def __init__(self, cfg: EnvConfig):
        super().__init__(cfg)
        cfg.robot.validate()
        self.state: Optional[SimState] = None

    def _canonical_state(self) -> SimState:
        opos, orad, omass, ocolor = canonical_scene(self.cfg.task)
        n = self.model.n_joints
        return SimState(
            time=0.0,
            joint_pos=engine.canonical_joint_pos(self.model),
            joint_vel=np.zeros(n),
            obj_pos=opos.copy(),
            obj_vel=np.zeros_like(opos),
            obj_radius=orad.copy(),
            obj_mass=omass.copy(),
            obj_color=ocolor.copy(),
            grasped=-1,
        )

    def _reset_backend(self, episode_seed: int) -> None:
        state = self._canonical_state()
        if self.cfg.randomization is not None:
            rng = CounterRng(episode_seed, STREAM_SCENE)
            state = engine.randomize_scene(state, self.cfg.randomization, rng)
        self.state = state

    def _actuate(self, cmd: RobotCommand) -> None:
        if cmd.gripper is Gripper.GRASP:
            self.state = engine.attempt_grasp(self.state, self.model)
        elif cmd.gripper is Gripper.RELEASE:
            self.state = engine.release_grasp(self.state)
        self.state = engine.step_n(
            self.state, self.model, cmd.mode, cmd.values, self.cfg.dt, self.cfg.frame_skip
        )

    def scene(self) -> SceneView:
        s = self.state
        if s is None:
            raise RobotError("robot not reset")
        return SceneView(
            time=s.time,
            joint_pos=s.joint_pos,
            joint_vel=s.joint_vel,
            obj_pos=s.obj_pos,
            obj_vel=s.obj_vel,
            obj_radius=s.obj_radius,
            obj_color=s.obj_color,
            grasped=s.grasped,
            target=self._target,
        )

    def snapshot_state(self) -> SimState:
        if self.state is None:
            raise RobotError("robot not reset")
        return self.state.copy()

    def peek_state(self) -> SimState:
        if self.state is None:
            raise RobotError("robot not reset")
        return self.state

    def restore_state(self, state: SimState) -> None:
        """Replay entry point: bypasses randomization, clears delay buffers."""
        state.validate(self.model.n_joints)
        self.state = state.copy()
        self.pipeline.reset(CounterRng(0, STREAM_SENSOR))
        self._frame = self.pipeline.capture(self.scene())


class HardwareRobot(Robot):
    """Client of the wire protocol; static object attributes (radius, color)
    come from the configured canonical scene since the state echo carries
    only poses."""

    def __init__(self, cfg: EnvConfig, timeout: float = 2.0):
        super().__init__(cfg)
        host, _, port = (cfg.hardware_endpoint or "").rpartition(":")
        if not host:
            raise RobotError(f"bad hardware endpoint {cfg.hardware_endpoint!r}")
        self.client = WireClient(host, int(port), timeout=timeout)
        _, orad, _, ocolor = canonical_scene(cfg.task)
        self._static_radius = orad
        self._static_color = ocolor
        self._joint_pos = np.zeros(cfg.robot.n_joints)
        self._joint_vel = np.zeros(cfg.robot.n_joints)
        self._obj_pos = np.zeros((orad.shape[0], 2))
        self._obj_vel = np.zeros((orad.shape[0], 2))
        self._grasped = -1
        self._steps = 0

    def _store(self, state_tuple) -> None:
        pos, vel, opos, ovel = state_tuple
        if pos.shape != (self.model.n_joints,):
            raise RobotError("hardware reports a different joint count")
        self._joint_pos, self._joint_vel = pos, vel
        self._obj_pos, self._obj_vel = opos, ovel

    def _reset_backend(self, episode_seed: int) -> None:
        self._store(self.client.reset(episode_seed))
        self._grasped = -1
        self._steps = 0

    def _actuate(self, cmd: RobotCommand) -> None:
        self.client.set_command(
            MODE_CODE[cmd.mode], cmd.gripper.value, cmd.values
        )
        self._store(self.client.get_state())
        self._steps += 1
        # Grasp belief mirrors the sim rule on the post-step echo; exact in
        # lockstep except when a disc crosses the capture boundary during
        # the very step the grasp lands.
        if cmd.gripper is Gripper.GRASP and self._grasped < 0:
            ee = engine.forward_kinematics(self.model, self._joint_pos)[-1]
            d2 = np.sum((self._obj_pos - ee) ** 2, axis=1)
            if d2.size and d2.min() <= self.model.gripper_radius**2:
                self._grasped = int(np.argmin(d2))
        elif cmd.gripper is Gripper.RELEASE:
            self._grasped = -1

    def scene(self) -> SceneView:
        return SceneView(
            time=self._steps * self.cfg.frame_skip * self.cfg.dt,
            joint_pos=self._joint_pos,
            joint_vel=self._joint_vel,
            obj_pos=self._obj_pos,
            obj_vel=self._obj_vel,
            obj_radius=self._static_radius,
            obj_color=self._static_color,
            grasped=self._grasped,
            target=self._target,
        )

    def close(self) -> None:
        self.client.close()


def robot_connect(cfg: EnvConfig, timeout: float = 2.0) -> Robot:
    """Backend selection consumes only cfg.backend."""
    if cfg.backend is Backend.SIM:
        return SimRobot(cfg)
    return HardwareRobot(cfg, timeout=timeout)
