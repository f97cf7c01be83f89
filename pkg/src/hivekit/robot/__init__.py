from .backends import HardwareRobot, Robot, SimRobot, robot_connect
from .base import (
    CODE_MODE,
    MODE_CODE,
    Gripper,
    ModeMismatchError,
    RobotCommand,
    RobotError,
    SceneView,
    SensorFrame,
)
from .mock_server import MODE_FREERUN, MODE_LOCKSTEP, MockHardwareServer, mock_server_for_config
from .sensors import SensorPipeline

__all__ = [
    "Robot",
    "SimRobot",
    "HardwareRobot",
    "robot_connect",
    "RobotCommand",
    "SensorFrame",
    "SceneView",
    "Gripper",
    "RobotError",
    "ModeMismatchError",
    "MODE_CODE",
    "CODE_MODE",
    "SensorPipeline",
    "MockHardwareServer",
    "mock_server_for_config",
    "MODE_LOCKSTEP",
    "MODE_FREERUN",
]
