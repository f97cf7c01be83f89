from .base import Policy, PolicyDescriptor, PolicyRef, RandomPolicy, ZeroPolicy, resolve_policy
from .bc import BCPolicy, LinearBCModel, bc_loss, feature_layout_for_config, load_bc, save_bc, train_bc
from .evaluate import EpisodeRow, EvalReport, evaluate_policy, rollout_episode
from .experts import scripted_expert

__all__ = [
    "Policy",
    "PolicyDescriptor",
    "PolicyRef",
    "RandomPolicy",
    "ZeroPolicy",
    "resolve_policy",
    "scripted_expert",
    "LinearBCModel",
    "BCPolicy",
    "train_bc",
    "bc_loss",
    "save_bc",
    "load_bc",
    "feature_layout_for_config",
    "evaluate_policy",
    "rollout_episode",
    "EvalReport",
    "EpisodeRow",
]
