"""Robot surface: sensor pipeline semantics, command validation, reset."""

from dataclasses import replace

import numpy as np
import pytest

from hivekit.config import ControlMode, SensorSpec, SensorKind
from hivekit.registry import EnvRegistry, register_builtin
from hivekit.robot import Gripper, ModeMismatchError, RobotCommand, SimRobot
from hivekit.rng import CounterRng


@pytest.fixture(scope="module")
def registry():
    reg = EnvRegistry()
    register_builtin(reg)
    return reg


def _hold(cfg, robot):
    q = robot.scene().joint_pos.copy()
    return RobotCommand(cfg.control_mode, q)


def test_identity_pipeline(registry):
    cfg = registry.config("reach-v0")
    robot = SimRobot(cfg)
    robot.set_target((0.9, 0.0))
    frame = robot.reset(1)
    scene = robot.scene()
    assert np.array_equal(frame.readings["jointpos"], scene.joint_pos)
    assert np.array_equal(frame.readings["jointvel"], scene.joint_vel)
    assert list(frame.readings) == list(cfg.sensor_names)


def test_obs_key_order_stable(registry):
    cfg = registry.config("push-v0")
    robot = SimRobot(cfg)
    robot.set_target((1.0, 0.0))
    robot.reset(3)
    for _ in range(20):
        robot.apply_command(_hold(cfg, robot))
        assert list(robot.get_sensors().readings) == list(cfg.sensor_names)


@pytest.mark.parametrize("delay", [0, 1, 3, 10])
def test_delay_is_pure_shift(registry, delay):
    cfg = registry.config("reach-v0")
    sensors = tuple(replace(s, delay_steps=delay) for s in cfg.sensors)
    cfg = replace(cfg, sensors=sensors)
    robot = SimRobot(cfg)
    robot.set_target((0.9, 0.0))
    frame = robot.reset(5)

    truths = [robot.scene().joint_pos.copy()]
    readings = [frame.readings["jointpos"].copy()]
    rng = CounterRng(2)
    for t in range(100):
        cmd = RobotCommand(
            cfg.control_mode, np.array([rng.uniform(-1, 1), rng.uniform(-1, 1)])
        )
        robot.apply_command(cmd)
        truths.append(robot.scene().joint_pos.copy())
        readings.append(robot.get_sensors().readings["jointpos"].copy())
    for t in range(101):
        assert np.array_equal(readings[t], truths[max(0, t - delay)])


def test_noise_determinism_and_clamp(registry):
    cfg = registry.config("reach_v2d-v0")
    sensors = tuple(replace(s, noise_sigma=0.05) for s in cfg.sensors)
    cfg = replace(cfg, sensors=sensors)

    frames = []
    for _ in range(2):
        robot = SimRobot(cfg)
        robot.set_target((0.9, 0.0))
        robot.reset(7)
        run = []
        for _ in range(5):
            robot.apply_command(_hold(cfg, robot))
            run.append({k: v.copy() for k, v in robot.get_sensors().readings.items()})
        frames.append(run)
    for fa, fb in zip(*frames):
        for name in fa:
            assert np.array_equal(fa[name], fb[name])
    cam = frames[0][-1]["camera"]
    assert np.all((cam >= 0.0) & (cam <= 1.0))
    assert not np.array_equal(
        frames[0][0]["jointpos"], np.full(2, 0.5)
    )  # noise actually applied


def test_noise_single_sample_per_step(registry):
    cfg = registry.config("reach-v0")
    sensors = tuple(replace(s, noise_sigma=0.05) for s in cfg.sensors)
    cfg = replace(cfg, sensors=sensors)
    robot = SimRobot(cfg)
    robot.set_target((0.9, 0.0))
    robot.reset(7)
    a = robot.get_sensors().readings["jointpos"]
    b = robot.get_sensors().readings["jointpos"]
    assert np.array_equal(a, b)  # repeated reads do not resample


def test_reset_clears_delay_buffers(registry):
    cfg = registry.config("reach-v0")
    sensors = tuple(replace(s, delay_steps=3) for s in cfg.sensors)
    cfg = replace(cfg, sensors=sensors)
    robot = SimRobot(cfg)
    robot.set_target((0.9, 0.0))
    robot.reset(1)
    for _ in range(5):
        robot.apply_command(RobotCommand(cfg.control_mode, np.array([1.2, -0.8])))
    frame = robot.reset(2)
    assert np.array_equal(frame.readings["jointpos"], robot.scene().joint_pos)


def test_reset_same_seed_identical(registry):
    cfg = registry.config("push-v0")
    robot = SimRobot(cfg)
    robot.set_target((1.0, 0.0))
    fa = robot.reset(11)
    fb = robot.reset(11)
    for name in fa.readings:
        assert np.array_equal(fa.readings[name], fb.readings[name])


def test_mode_mismatch_rejected(registry):
    cfg = registry.config("reach-v0")
    robot = SimRobot(cfg)
    robot.set_target((0.9, 0.0))
    robot.reset(1)
    with pytest.raises(ModeMismatchError):
        robot.apply_command(RobotCommand(ControlMode.TORQUE, np.zeros(2)))


def test_frame_skip_advances_time_exactly(registry):
    cfg = replace(registry.config("reach-v0"), frame_skip=5, dt=0.01)
    robot = SimRobot(cfg)
    robot.set_target((0.9, 0.0))
    robot.reset(1)
    robot.apply_command(_hold(cfg, robot))
    assert robot.sim_time == pytest.approx(0.05, abs=1e-15)


def test_gripper_commands_route_to_grasp(registry):
    cfg = registry.config("pickplace-v0")
    robot = SimRobot(cfg)
    robot.set_target((1.0, -0.35))
    robot.reset(1)
    # teleport the disc to the EE and grasp
    from hivekit.sim import engine

    ee = engine.end_effector(cfg.robot, robot.state.joint_pos)
    robot.state.obj_pos[0] = ee
    robot.apply_command(
        RobotCommand(cfg.control_mode, robot.state.joint_pos.copy(), Gripper.GRASP)
    )
    assert robot.state.grasped == 0
    robot.apply_command(
        RobotCommand(cfg.control_mode, robot.state.joint_pos.copy(), Gripper.RELEASE)
    )
    assert robot.state.grasped == -1
