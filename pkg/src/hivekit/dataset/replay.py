"""Replay verification: re-run recorded actions, measure state discrepancy.

The environment is restored to the trajectory's initial state (bypassing
randomization), sensor noise is disabled, and the recorded action rows are
applied in order.  final_state_diff is the L2 norm between the replayed
terminal state vector and the recorded one; per_step_max_diff is the max
over steps of the infinity-norm between replayed and recorded observations
(exactly zero for noiseless configs; of noise magnitude otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import Backend, EnvConfig, config_digest
from ..envs import tasks
from ..robot import RobotCommand, SimRobot
from ..rng import STREAM_GOAL, CounterRng
from ..trajectory import Trajectory
from .container import DIGEST_KEY, DatasetContainer, DatasetError, DigestMismatchError


@dataclass
class ReplayReport:
    final_state_diff: float
    per_step_max_diff: float
    steps: int


@dataclass
class BatchReplayReport:
    reports: list[ReplayReport] = field(default_factory=list)

    @property
    def max_final_state_diff(self) -> float:
        return max((r.final_state_diff for r in self.reports), default=0.0)

    def histogram(self, n_bins: int = 10) -> tuple[list[float], list[int]]:
        """Full histogram of final-state discrepancies (first bin: exact zeros)."""
        diffs = [r.final_state_diff for r in self.reports]
        zeros = sum(1 for d in diffs if d == 0.0)
        nonzero = [d for d in diffs if d > 0.0]
        edges: list[float] = [0.0]
        counts: list[int] = [zeros]
        if nonzero:
            lo = min(nonzero)
            hi = max(nonzero) * (1 + 1e-12)
            bins = np.logspace(np.log10(lo), np.log10(hi), n_bins + 1)
            hist, _ = np.histogram(nonzero, bins=bins)
            edges.extend(float(b) for b in bins)
            counts.extend(int(c) for c in hist)
        return edges, counts

    def histogram_text(self) -> str:
        edges, counts = self.histogram()
        lines = [f"  = 0.0            : {counts[0]}"]
        for i, c in enumerate(counts[1:]):
            lines.append(f"  ({edges[i + 1]:.3e}, {edges[i + 2]:.3e}]: {c}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        edges, counts = self.histogram()
        return {
            "schema_version": 1,
            "n_trajectories": len(self.reports),
            "max_final_state_diff": self.max_final_state_diff,
            "final_state_diffs": [r.final_state_diff for r in self.reports],
            "per_step_max_diffs": [r.per_step_max_diff for r in self.reports],
            "histogram": {"edges": edges, "counts": counts},
        }


def replay_trajectory(traj: Trajectory, cfg: EnvConfig) -> ReplayReport:
    if cfg.backend is not Backend.SIM:
        raise DatasetError("replay requires a sim-backend config")
    stamped = traj.metadata.get(DIGEST_KEY)
    if stamped is not None and stamped != config_digest(cfg).hex():
        raise DigestMismatchError(
            "trajectory was recorded under a different config; refusing to replay"
        )
    if traj.initial_state is None or traj.final_state is None:
        raise DatasetError("trajectory carries no state snapshots; cannot replay")
    if traj.length > cfg.horizon:
        raise DatasetError("trajectory longer than the config horizon")
    if traj.action_dim != cfg.robot.n_joints + 1:
        raise DatasetError("action dimension does not match the robot")

    robot = SimRobot(cfg)
    robot.pipeline.noise_enabled = False
    # the goal marker observed by the objects sensor is a pure function of
    # the episode seed; rebuild it so replayed observations line up
    goal = tasks.draw_goal(
        cfg.task, cfg.randomization, CounterRng(traj.seed, STREAM_GOAL)
    )
    robot.set_target(tasks.goal_marker(tasks.episode_task(cfg.task, goal), cfg.robot))
    robot.restore_state(traj.initial_state)

    # observations follow the acted-on convention: obs[t] is the frame the
    # policy saw before action t, so the restored frame matches obs[0] and
    # the frame after action t matches obs[t+1]
    per_step = 0.0

    def _frame_diff(frame, t: int) -> None:
        nonlocal per_step
        for name, recorded in traj.observations.items():
            if recorded.shape[1] == 0:
                continue
            diff = float(np.max(np.abs(frame.readings[name] - recorded[t])))
            if diff > per_step:
                per_step = diff

    _frame_diff(robot.get_sensors(), 0)
    for t in range(traj.length):
        cmd = RobotCommand.from_row(cfg.control_mode, traj.actions[t])
        robot.apply_command(cmd)
        if t + 1 < traj.length:
            _frame_diff(robot.get_sensors(), t + 1)

    final = robot.snapshot_state()
    delta = final.as_vector() - traj.final_state.as_vector()
    final_diff = float(np.sqrt(np.sum(delta * delta)))
    return ReplayReport(final_state_diff=final_diff, per_step_max_diff=per_step, steps=traj.length)


def replay_container(container: DatasetContainer) -> BatchReplayReport:
    report = BatchReplayReport()
    for traj in container:
        report.reports.append(replay_trajectory(traj, container.config))
    return report
