"""Sensor pipeline: raw readings -> delay ring buffer -> additive noise.

The pipeline runs identically over both backends.  Readings advance once
per control step (on apply_command / reset), never on repeated reads, so
noise is sampled exactly once per step per sensor.  Before a delay buffer
fills, the oldest available reading is returned.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..config import RobotModelSpec, SensorKind, SensorSpec
from ..rng import CounterRng
from ..sim import engine
from ..sim.state import SimState
from .base import SceneView, SensorFrame


def _raw_reading(spec: SensorSpec, scene: SceneView, model: RobotModelSpec) -> np.ndarray:
    kind = spec.kind
    if kind is SensorKind.JOINT_POS:
        return scene.joint_pos.copy()
    if kind is SensorKind.JOINT_VEL:
        return scene.joint_vel.copy()
    if kind is SensorKind.EE_POS:
        return np.array(engine.ee_xy(model, scene.joint_pos))
    if kind is SensorKind.OBJECT_POSE:
        # free disc positions in index order, then the active goal marker
        return np.concatenate([scene.obj_pos.reshape(-1), scene.target])
    if kind is SensorKind.PROPRIO:
        ee = engine.ee_xy(model, scene.joint_pos)
        return np.concatenate([scene.joint_pos, scene.joint_vel, ee])
    if kind is SensorKind.GRID_CAMERA:
        w, h = spec.camera_resolution
        state = SimState(
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
        return engine.render_camera(model, state, w, h)
    raise ValueError(f"unknown sensor kind {kind!r}")


class SensorPipeline:
    def __init__(self, sensors: tuple[SensorSpec, ...], model: RobotModelSpec):
        self.sensors = sensors
        self.model = model
        self._buffers: dict[str, deque] = {}
        self._rng: CounterRng | None = None
        self.noise_enabled = True

    def reset(self, rng: CounterRng) -> None:
        self._rng = rng
        self._buffers = {
            s.name: deque(maxlen=s.delay_steps + 1) for s in self.sensors
        }

    def capture(self, scene: SceneView) -> SensorFrame:
        """Push ground truth through delay and noise; returns the new frame."""
        if self._rng is None:
            raise RuntimeError("pipeline used before reset")
        readings: dict[str, np.ndarray] = {}
        for spec in self.sensors:
            truth = np.asarray(_raw_reading(spec, scene, self.model), dtype=np.float64)
            buf = self._buffers[spec.name]
            buf.append(truth)
            value = buf[0].copy()
            if self.noise_enabled and spec.noise_sigma > 0.0:
                for i in range(value.shape[0]):
                    value[i] += self._rng.normal(spec.noise_sigma)
                if spec.kind is SensorKind.GRID_CAMERA:
                    np.clip(value, 0.0, 1.0, out=value)
            readings[spec.name] = value
        return SensorFrame(timestamp=scene.time, readings=readings)
