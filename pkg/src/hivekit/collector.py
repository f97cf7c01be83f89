"""Rollout collection: batched sequential and asynchronous multi-worker.

Async collection spawns one process per worker, each owning a private
environment and RNG streams; the coordinator forwards batches to the sink
strictly in completion order (first ready, first served) over a bounded
queue, blocking workers under sink backpressure instead of dropping data.
Counting happens at delivery.  Partial final batches are delivered and
flagged, never discarded.

Recording convention: a step's observation is the one the policy acted on;
reward/success are post-step.
"""

from __future__ import annotations

import multiprocessing as mp
import time
import traceback
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .agents.base import PolicyRef, resolve_policy
from .config import config_digest, parse_env_config, serialize_env_config
from .envs.env import Env
from .registry import EnvRegistry, default_registry, visual_variant_id
from .rng import STREAM_POLICY, CounterRng, derive_episode_seed
from .trajectory import Trajectory, TrajectoryRecorder, TrajectorySource


class CollectorError(Exception):
    pass


class WorkerError(CollectorError):
    def __init__(self, worker_id: int, detail: str):
        super().__init__(f"worker {worker_id} failed:\n{detail}")
        self.worker_id = worker_id


@dataclass(frozen=True)
class CollectorConfig:
    env_id: str
    n_workers: int
    batch_size: int
    total_steps: int
    policy: PolicyRef
    seeds: tuple[int, ...]  # per-worker base seeds

    def validate(self) -> None:
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.total_steps < self.batch_size:
            raise ValueError("total_steps must be >= batch_size")
        if len(self.seeds) != self.n_workers:
            raise ValueError("need one base seed per worker")


@dataclass
class RolloutBatch:
    worker_id: int
    seq: int  # per-worker batch sequence number
    obs: dict[str, np.ndarray]  # name -> (B, dim)
    actions: np.ndarray  # (B, n_joints + 1)
    rewards: np.ndarray  # (B,)
    successes: np.ndarray  # (B,) bool
    dones: np.ndarray  # (B,) bool
    final_partial: bool = False

    def __len__(self) -> int:
        return int(self.actions.shape[0])

    @property
    def episode_boundaries(self) -> np.ndarray:
        return np.nonzero(self.dones)[0]


@dataclass
class CollectionReport:
    total_steps: int
    wall_time_s: float
    steps_per_sec: float
    per_worker_steps: dict[int, int]
    n_batches: int


class _BatchBuffer:
    def __init__(self, sensor_names: Sequence[str]):
        self.names = list(sensor_names)
        self.clear()

    def clear(self) -> None:
        self.obs: dict[str, list] = {n: [] for n in self.names}
        self.actions: list = []
        self.rewards: list = []
        self.successes: list = []
        self.dones: list = []

    def __len__(self) -> int:
        return len(self.actions)

    def push(self, obs, action_row, reward, success, done) -> None:
        for n in self.names:
            self.obs[n].append(np.asarray(obs[n], dtype=np.float64))
        self.actions.append(action_row)
        self.rewards.append(reward)
        self.successes.append(success)
        self.dones.append(done)

    def pop_batch(self, worker_id: int, seq: int, final_partial: bool) -> RolloutBatch:
        batch = RolloutBatch(
            worker_id=worker_id,
            seq=seq,
            obs={n: np.stack(v) for n, v in self.obs.items()},
            actions=np.stack(self.actions),
            rewards=np.array(self.rewards),
            successes=np.array(self.successes, dtype=bool),
            dones=np.array(self.dones, dtype=bool),
            final_partial=final_partial,
        )
        self.clear()
        return batch


def _batch_stream(
    env: Env,
    policy,
    base_seed: int,
    batch_size: int,
    worker_id: int,
    should_stop: Callable[[], bool],
) -> Iterator[RolloutBatch]:
    """Step the env forever (auto-resetting), yielding full batches; a final
    partial batch is flushed when should_stop() turns true."""
    buffer = _BatchBuffer(env.cfg.sensor_names)
    seq = 0
    episode = 0
    obs = env.reset(derive_episode_seed(base_seed, episode))
    policy.reset_episode()
    rng = CounterRng(env.episode_seed, STREAM_POLICY)
    while True:
        cmd = policy.act(obs, rng)
        result = env.step(cmd)
        buffer.push(obs, cmd.as_row(), result.reward, result.success, result.done)
        obs = result.obs
        if result.done:
            episode += 1
            obs = env.reset(derive_episode_seed(base_seed, episode))
            policy.reset_episode()
            rng = CounterRng(env.episode_seed, STREAM_POLICY)
        if len(buffer) >= batch_size:
            yield buffer.pop_batch(worker_id, seq, final_partial=False)
            seq += 1
            if should_stop():
                return
        elif should_stop():
            if len(buffer):
                yield buffer.pop_batch(worker_id, seq, final_partial=True)
            return


def _worker_main(
    worker_id: int,
    cfg_text: str,
    policy_ref: PolicyRef,
    base_seed: int,
    batch_size: int,
    queue,
    stop,
) -> None:
    try:
        cfg = parse_env_config(cfg_text)
        env = Env(cfg)
        policy = resolve_policy(policy_ref, cfg)
        for batch in _batch_stream(
            env, policy, base_seed, batch_size, worker_id, stop.is_set
        ):
            queue.put(("batch", batch))
        queue.put(("done", worker_id))
    except Exception:
        queue.put(("error", worker_id, traceback.format_exc()))


def collect_async(
    cfg: CollectorConfig,
    sink: Optional[Callable[[RolloutBatch], None]] = None,
    registry: Optional[EnvRegistry] = None,
    queue_factor: int = 2,
) -> CollectionReport:
    """First-ready-first-served collection across n_workers processes."""
    cfg.validate()
    registry = registry if registry is not None else default_registry()
    env_cfg = registry.config(cfg.env_id)
    cfg_text = serialize_env_config(env_cfg)

    ctx = mp.get_context("fork" if "fork" in mp.get_all_start_methods() else "spawn")
    queue = ctx.Queue(maxsize=queue_factor * cfg.n_workers)
    stop = ctx.Event()
    workers = [
        ctx.Process(
            target=_worker_main,
            args=(i, cfg_text, cfg.policy, cfg.seeds[i], cfg.batch_size, queue, stop),
            daemon=True,
        )
        for i in range(cfg.n_workers)
    ]

    t0 = time.monotonic()
    for w in workers:
        w.start()

    delivered = 0
    n_batches = 0
    per_worker: dict[int, int] = {i: 0 for i in range(cfg.n_workers)}
    finished: set[int] = set()
    error: Optional[WorkerError] = None

    def handle(msg) -> None:
        nonlocal delivered, n_batches, error
        if msg[0] == "batch":
            batch: RolloutBatch = msg[1]
            if sink is not None:
                sink(batch)
            delivered += len(batch)
            n_batches += 1
            per_worker[batch.worker_id] += len(batch)
        elif msg[0] == "done":
            finished.add(msg[1])
        elif msg[0] == "error":
            error = WorkerError(msg[1], msg[2])

    try:
        while delivered < cfg.total_steps and error is None:
            handle(queue.get())
        stop.set()
        # drain everything produced before the workers observed the stop flag
        while len(finished) < cfg.n_workers and error is None:
            handle(queue.get())
        while True:
            try:
                handle(queue.get_nowait())
            except Exception:
                break
    finally:
        stop.set()
        for w in workers:
            w.join(timeout=10.0)
        for w in workers:
            if w.is_alive():
                w.terminate()
    if error is not None:
        raise error

    wall = time.monotonic() - t0
    return CollectionReport(
        total_steps=delivered,
        wall_time_s=wall,
        steps_per_sec=delivered / wall if wall > 0 else float("inf"),
        per_worker_steps=per_worker,
        n_batches=n_batches,
    )


def collect_sequential(
    cfg: CollectorConfig,
    sink: Optional[Callable[[RolloutBatch], None]] = None,
    registry: Optional[EnvRegistry] = None,
) -> CollectionReport:
    """Single-process reference path; identical batches to a 1-worker async run."""
    cfg.validate()
    registry = registry if registry is not None else default_registry()
    env_cfg = registry.config(cfg.env_id)
    env = Env(parse_env_config(serialize_env_config(env_cfg)))
    policy = resolve_policy(cfg.policy, env.cfg)

    delivered = 0
    n_batches = 0
    t0 = time.monotonic()
    for batch in _batch_stream(
        env, policy, cfg.seeds[0], cfg.batch_size, 0, lambda: delivered >= cfg.total_steps
    ):
        if sink is not None:
            sink(batch)
        delivered += len(batch)
        n_batches += 1
    wall = time.monotonic() - t0
    env.close()
    return CollectionReport(
        total_steps=delivered,
        wall_time_s=wall,
        steps_per_sec=delivered / wall if wall > 0 else float("inf"),
        per_worker_steps={0: delivered},
        n_batches=n_batches,
    )


# -- trajectory collection ----------------------------------------------------


_POLICY_SOURCE = {
    "random": TrajectorySource.RANDOM,
    "zero": TrajectorySource.SCRIPTED,
    "expert": TrajectorySource.EXPERT_POLICY,
    "bc": TrajectorySource.EXPERT_POLICY,
}


def collect_trajectories(
    env_id: str,
    policy_ref: PolicyRef,
    n_episodes: int,
    base_seed: int = 0,
    seeds: Optional[Sequence[int]] = None,
    registry: Optional[EnvRegistry] = None,
    source: Optional[TrajectorySource] = None,
) -> list[Trajectory]:
    """Roll out full episodes in-process, with state snapshots for replay."""
    registry = registry if registry is not None else default_registry()
    env_cfg = registry.config(env_id)
    env = Env(env_cfg)
    policy = resolve_policy(policy_ref, env_cfg)
    if seeds is None:
        seeds = [derive_episode_seed(base_seed, i) for i in range(n_episodes)]
    digest_hex = config_digest(env_cfg).hex()
    if source is None:
        source = _POLICY_SOURCE.get(policy_ref.kind, TrajectorySource.SCRIPTED)

    out: list[Trajectory] = []
    for ep_seed in seeds:
        obs = env.reset(ep_seed)
        policy.reset_episode()
        rng = CounterRng(ep_seed, STREAM_POLICY)
        recorder = TrajectoryRecorder(env_id, ep_seed, env.snapshot_state())
        while True:
            cmd = policy.act(obs, rng)
            result = env.step(cmd)
            recorder.record(obs, cmd.as_row(), result.reward, result.success)
            obs = result.obs
            if result.done:
                break
        out.append(
            recorder.finish(
                env.snapshot_state(),
                source,
                metadata={"config_digest": digest_hex, "policy": policy_ref.kind},
            )
        )
    env.close()
    return out


def _traj_worker(args) -> list[tuple[int, Trajectory]]:
    cfg_text, policy_ref, indexed_seeds, source = args
    cfg = parse_env_config(cfg_text)
    reg = EnvRegistry()
    reg.register(cfg)
    out = []
    for idx, seed in indexed_seeds:
        (traj,) = collect_trajectories(
            cfg.env_id, policy_ref, 1, seeds=[seed], registry=reg, source=source
        )
        out.append((idx, traj))
    return out


def collect_trajectories_parallel(
    env_id: str,
    policy_ref: PolicyRef,
    seeds: Sequence[int],
    n_workers: int,
    registry: Optional[EnvRegistry] = None,
    source: Optional[TrajectorySource] = None,
) -> list[Trajectory]:
    """Episode-parallel collection; output is seed-ordered and identical to a
    sequential run (episodes are independent given their seeds)."""
    registry = registry if registry is not None else default_registry()
    if n_workers <= 1 or len(seeds) <= 1:
        return collect_trajectories(
            env_id, policy_ref, len(seeds), seeds=seeds, registry=registry, source=source
        )
    cfg_text = serialize_env_config(registry.config(env_id))
    n_workers = min(n_workers, len(seeds))
    chunks = [
        (cfg_text, policy_ref, list(enumerate(seeds))[w::n_workers], source)
        for w in range(n_workers)
    ]
    ctx = mp.get_context("fork" if "fork" in mp.get_all_start_methods() else "spawn")
    with ctx.Pool(n_workers) as pool:
        results = pool.map(_traj_worker, chunks)
    merged: list[tuple[int, Trajectory]] = [pair for chunk in results for pair in chunk]
    merged.sort(key=lambda pair: pair[0])
    return [traj for _, traj in merged]


# -- throughput benchmark -------------------------------------------------------


@dataclass
class ThroughputRun:
    seed: int
    steps: int
    wall_time_s: float
    steps_per_sec: float
    per_worker_steps: dict[int, int]


@dataclass
class ThroughputReport:
    env_id: str
    n_workers: int
    obs_mode: str
    seeds: tuple[int, ...]
    runs: list[ThroughputRun] = field(default_factory=list)

    @property
    def steps_per_sec_mean(self) -> float:
        return float(np.mean([r.steps_per_sec for r in self.runs]))

    @property
    def steps_per_sec_std(self) -> float:
        return float(np.std([r.steps_per_sec for r in self.runs]))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "env_id": self.env_id,
            "n_workers": self.n_workers,
            "obs_mode": self.obs_mode,
            "seeds": list(self.seeds),
            "steps_per_sec_mean": self.steps_per_sec_mean,
            "steps_per_sec_std": self.steps_per_sec_std,
            "per_worker_steps": self.runs[-1].per_worker_steps if self.runs else {},
            "runs": [
                {
                    "seed": r.seed,
                    "steps": r.steps,
                    "wall_time_s": r.wall_time_s,
                    "steps_per_sec": r.steps_per_sec,
                }
                for r in self.runs
            ],
        }


OBS_MODE_STATE = "state"
OBS_MODE_VISUAL = "visual"


def benchmark_throughput(
    env_id: str,
    n_workers: int,
    total_steps: int,
    obs_mode: str = OBS_MODE_STATE,
    seeds: Sequence[int] = (0, 1, 2),
    batch_size: int = 500,
    registry: Optional[EnvRegistry] = None,
) -> ThroughputReport:
    """Random-policy steps/sec, mean and std over seeded runs.

    Visual mode benchmarks the _v2d variant so camera rasterization cost is
    inside the measured loop.
    """
    registry = registry if registry is not None else default_registry()
    bench_env_id = visual_variant_id(env_id) if obs_mode == OBS_MODE_VISUAL else env_id
    if bench_env_id not in registry:
        raise CollectorError(f"env {bench_env_id!r} is not registered")
    batch_size = min(batch_size, total_steps)
    report = ThroughputReport(
        env_id=bench_env_id, n_workers=n_workers, obs_mode=obs_mode, seeds=tuple(seeds)
    )
    for seed in seeds:
        cc = CollectorConfig(
            env_id=bench_env_id,
            n_workers=n_workers,
            batch_size=batch_size,
            total_steps=total_steps,
            policy=PolicyRef(kind="random"),
            seeds=tuple(derive_episode_seed(seed, w) for w in range(n_workers)),
        )
        r = collect_async(cc, sink=None, registry=registry)
        report.runs.append(
            ThroughputRun(
                seed=seed,
                steps=r.total_steps,
                wall_time_s=r.wall_time_s,
                steps_per_sec=r.steps_per_sec,
                per_worker_steps=r.per_worker_steps,
            )
        )
    return report
