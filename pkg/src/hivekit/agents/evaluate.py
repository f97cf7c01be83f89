"""Policy evaluation by success rate over seeded episodes.

success_rate counts episodes whose final step reports success (pick-place
episodes that latch done early end on a successful step, so the latch is
covered); mean return is reported separately and never feeds success_rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..registry import EnvRegistry, default_registry
from ..rng import STREAM_POLICY, CounterRng, derive_episode_seed
from .base import Policy


@dataclass
class EpisodeRow:
    seed: int
    success: bool
    episode_return: float
    steps: int


@dataclass
class EvalReport:
    env_id: str
    policy_kind: str
    success_rate: float
    mean_return: float
    episodes: list[EpisodeRow] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "env_id": self.env_id,
            "policy": self.policy_kind,
            "success_rate": self.success_rate,
            "mean_return": self.mean_return,
            "episodes": [
                {
                    "seed": e.seed,
                    "success": e.success,
                    "return": e.episode_return,
                    "steps": e.steps,
                }
                for e in self.episodes
            ],
        }


def rollout_episode(env, policy: Policy, episode_seed: int) -> EpisodeRow:
    obs = env.reset(episode_seed)
    policy.reset_episode()
    rng = CounterRng(episode_seed, STREAM_POLICY)
    total = 0.0
    success = False
    steps = 0
    while True:
        result = env.step(policy.act(obs, rng))
        obs = result.obs
        total += result.reward
        success = result.success
        steps += 1
        if result.done:
            break
    return EpisodeRow(seed=episode_seed, success=success, episode_return=total, steps=steps)


def evaluate_policy(
    policy: Policy,
    env_id: str,
    n_episodes: int,
    seeds: Optional[Sequence[int]] = None,
    registry: Optional[EnvRegistry] = None,
    base_seed: int = 0,
    **env_kwargs,
) -> EvalReport:
    if n_episodes < 1:
        raise ValueError("empty evaluation")
    registry = registry if registry is not None else default_registry()
    if seeds is None:
        seeds = [derive_episode_seed(base_seed, i) for i in range(n_episodes)]
    elif len(seeds) != n_episodes:
        raise ValueError("seeds must match n_episodes")
    env = registry.make(env_id, **env_kwargs)
    try:
        episodes = [rollout_episode(env, policy, s) for s in seeds]
    finally:
        env.close()
    n = len(episodes)
    return EvalReport(
        env_id=env_id,
        policy_kind=policy.descriptor.kind,
        success_rate=sum(e.success for e in episodes) / n,
        mean_return=sum(e.episode_return for e in episodes) / n,
        episodes=episodes,
    )
