"""hivekit: a self-contained robot-learning environment kit.

Unified sim/hardware robot abstraction, config-registered task envs with
decoupled rewards and success criteria, batched rollout collection,
verified trajectory datasets, and live teleoperation.
"""

__version__ = "0.1.0"

from .config import (
    Backend,
    ConfigError,
    ControlMode,
    EnvConfig,
    RandomizationSpec,
    RobotModelSpec,
    SensorKind,
    SensorSpec,
    TaskKind,
    TaskSpec,
    config_digest,
    parse_env_config,
    serialize_env_config,
)
from .registry import (
    EnvRegistry,
    default_registry,
    make,
    register_env,
    visual_variant_id,
)
from .robot import Gripper, RobotCommand, SensorFrame, robot_connect
from .envs import Env, EpisodeFinishedError, StepResult
from .trajectory import Trajectory, TrajectorySource

__all__ = [
    "__version__",
    "EnvConfig",
    "RobotModelSpec",
    "SensorSpec",
    "TaskSpec",
    "RandomizationSpec",
    "Backend",
    "ControlMode",
    "SensorKind",
    "TaskKind",
    "parse_env_config",
    "serialize_env_config",
    "config_digest",
    "ConfigError",
    "EnvRegistry",
    "register_env",
    "make",
    "default_registry",
    "visual_variant_id",
    "RobotCommand",
    "SensorFrame",
    "Gripper",
    "robot_connect",
    "Env",
    "StepResult",
    "EpisodeFinishedError",
    "Trajectory",
    "TrajectorySource",
]
