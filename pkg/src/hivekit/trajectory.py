"""Episode records: time-indexed arrays plus the state snapshots replay needs.

The serialized action row is the joint command vector with the gripper code
appended as a final real column (0 no-change, 1 grasp, 2 release), so a
trajectory replays exactly, including grasp events.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .sim.state import SimState


class TrajectorySource(Enum):
    EXPERT_POLICY = 0
    HUMAN_TELEOP = 1
    SCRIPTED = 2
    RANDOM = 3


SOURCE_LABEL = {
    TrajectorySource.EXPERT_POLICY: "Expert Policy",
    TrajectorySource.HUMAN_TELEOP: "Human TeleOp",
    TrajectorySource.SCRIPTED: "Scripted",
    TrajectorySource.RANDOM: "Random",
}


@dataclass
class Trajectory:
    env_id: str
    seed: int  # episode seed the rollout was produced with
    observations: dict[str, np.ndarray]  # name -> (T, dim)
    actions: np.ndarray  # (T, n_joints + 1), last column = gripper code
    rewards: np.ndarray  # (T,)
    successes: np.ndarray  # (T,) bool
    initial_state: Optional[SimState]
    final_state: Optional[SimState]
    source: TrajectorySource
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def length(self) -> int:
        return int(self.actions.shape[0])

    @property
    def action_dim(self) -> int:
        return int(self.actions.shape[1])

    def validate(self) -> None:
        T = self.length
        if T < 1:
            raise ValueError("trajectory must contain at least one step")
        for name, arr in self.observations.items():
            if arr.shape[0] != T:
                raise ValueError(f"observation {name!r} length != {T}")
        if self.rewards.shape != (T,) or self.successes.shape != (T,):
            raise ValueError("rewards/successes must have length T")


def trajectories_equal(a: Trajectory, b: Trajectory) -> bool:
    """Field-exact equality (float bits, metadata, snapshots)."""
    from .sim.state import states_equal

    if (
        a.env_id != b.env_id
        or a.seed != b.seed
        or a.source != b.source
        or a.metadata != b.metadata
        or sorted(a.observations) != sorted(b.observations)
    ):
        return False
    for name in a.observations:
        if not np.array_equal(a.observations[name], b.observations[name]):
            return False
    if not (
        np.array_equal(a.actions, b.actions)
        and np.array_equal(a.rewards, b.rewards)
        and np.array_equal(a.successes, b.successes)
    ):
        return False
    for sa, sb in ((a.initial_state, b.initial_state), (a.final_state, b.final_state)):
        if (sa is None) != (sb is None):
            return False
        if sa is not None and not states_equal(sa, sb):
            return False
    return True


class TrajectoryRecorder:
    """Accumulates per-step records between episode boundaries."""

    def __init__(self, env_id: str, seed: int, initial_state: Optional[SimState]):
        self.env_id = env_id
        self.seed = seed
        self.initial_state = initial_state.copy() if initial_state is not None else None
        self._obs: list[dict[str, np.ndarray]] = []
        self._actions: list[np.ndarray] = []
        self._rewards: list[float] = []
        self._successes: list[bool] = []

    def __len__(self) -> int:
        return len(self._actions)

    def record(self, obs: dict[str, np.ndarray], action_row: np.ndarray,
               reward: float, success: bool) -> None:
        self._obs.append({k: np.array(v, dtype=np.float64, copy=True) for k, v in obs.items()})
        self._actions.append(np.array(action_row, dtype=np.float64, copy=True))
        self._rewards.append(float(reward))
        self._successes.append(bool(success))

    def finish(
        self,
        final_state: Optional[SimState],
        source: TrajectorySource,
        metadata: Optional[dict[str, str]] = None,
    ) -> Trajectory:
        if not self._actions:
            raise ValueError("cannot finish an empty recording")
        names = list(self._obs[0].keys())
        observations = {
            name: np.stack([o[name] for o in self._obs]) for name in names
        }
        traj = Trajectory(
            env_id=self.env_id,
            seed=self.seed,
            observations=observations,
            actions=np.stack(self._actions),
            rewards=np.array(self._rewards),
            successes=np.array(self._successes, dtype=bool),
            initial_state=self.initial_state,
            final_state=final_state.copy() if final_state is not None else None,
            source=source,
            metadata=dict(metadata or {}),
        )
        traj.validate()
        return traj
