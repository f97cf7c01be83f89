"""The environment step loop: robot + task + episode bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..config import EnvConfig, TaskKind, TaskSpec
from ..rng import STREAM_GOAL, CounterRng, derive_episode_seed
from ..robot import Robot, RobotCommand, robot_connect
from ..sim import engine
from ..sim.state import SimState
from . import tasks

# Consecutive successful steps after which a pick-place episode latches done.
DEFAULT_SUCCESS_LATCH = 5


class EpisodeFinishedError(RuntimeError):
    def __init__(self) -> None:
        super().__init__("episode finished; call reset")


@dataclass
class StepResult:
    obs: dict[str, np.ndarray]
    reward: float
    success: bool
    done: bool
    info: dict = field(default_factory=dict)


RewardFn = Callable[[TaskSpec, SimState, object, Optional[np.ndarray]], float]


class Env:
    """Single-threaded environment instance; share nothing across threads."""

    def __init__(
        self,
        cfg: EnvConfig,
        reward_fn: Optional[RewardFn] = None,
        success_latch: int = DEFAULT_SUCCESS_LATCH,
        connect_timeout: float = 2.0,
    ):
        cfg.validate()
        self.cfg = cfg
        self.robot: Robot = robot_connect(cfg, timeout=connect_timeout)
        self._reward_fn: RewardFn = reward_fn or tasks.compute_reward
        self._success_latch = success_latch
        self._episode = 0
        self._episode_seed: Optional[int] = None
        self._task: TaskSpec = cfg.task
        self._steps = 0
        self._done = True
        self._latch_run = 0

    # -- episode control ----------------------------------------------------

    @property
    def task(self) -> TaskSpec:
        """The active episode task (goal already drawn)."""
        return self._task

    @property
    def episode_seed(self) -> Optional[int]:
        return self._episode_seed

    @property
    def steps(self) -> int:
        return self._steps

    @property
    def done(self) -> bool:
        return self._done

    @property
    def action_dim(self) -> int:
        return self.cfg.robot.n_joints

    def reset(self, episode_seed: Optional[int] = None) -> dict[str, np.ndarray]:
        if episode_seed is None:
            episode_seed = derive_episode_seed(self.cfg.seed, self._episode)
        self._episode += 1
        self._episode_seed = episode_seed
        goal = tasks.draw_goal(
            self.cfg.task, self.cfg.randomization, CounterRng(episode_seed, STREAM_GOAL)
        )
        self._task = tasks.episode_task(self.cfg.task, goal)
        self.robot.set_target(tasks.goal_marker(self._task, self.cfg.robot))
        frame = self.robot.reset(episode_seed)
        self._steps = 0
        self._done = False
        self._latch_run = 0
        return frame.readings

    def step(self, action: RobotCommand) -> StepResult:
        if self._done:
            raise EpisodeFinishedError()
        self.robot.apply_command(action)
        frame = self.robot.get_sensors()
        state = self._state_for_task()
        ee = engine.ee_xy(self.cfg.robot, state.joint_pos)
        reward = float(
            self._reward_fn(self._task, state, self.cfg.robot, action.values, ee=ee)
        )
        success = tasks.compute_success(self._task, state, self.cfg.robot, ee=ee)
        self._steps += 1

        if success:
            self._latch_run += 1
        else:
            self._latch_run = 0
        latched = (
            self.cfg.task.kind is TaskKind.PICK_PLACE
            and self._latch_run >= self._success_latch
        )
        done = self._steps >= self.cfg.horizon or latched
        self._done = done
        return StepResult(
            obs=frame.readings,
            reward=reward,
            success=success,
            done=done,
            info={"solved": success, "time": frame.timestamp, "steps": self._steps},
        )

    def _state_for_task(self) -> SimState:
        snapshot = self.robot.peek_state()
        if snapshot is not None:
            return snapshot
        # hardware backend: reconstruct the task-relevant view from the wire echo
        scene = self.robot.scene()
        return SimState(
            time=scene.time,
            joint_pos=scene.joint_pos,
            joint_vel=scene.joint_vel,
            obj_pos=scene.obj_pos,
            obj_vel=scene.obj_vel,
            obj_radius=scene.obj_radius,
            obj_mass=np.ones(scene.obj_pos.shape[0]),
            obj_color=scene.obj_color,
            grasped=scene.grasped,
        )

    def snapshot_state(self) -> Optional[SimState]:
        return self.robot.snapshot_state()

    def close(self) -> None:
        self.robot.close()

    def __enter__(self) -> "Env":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
