"""Linear behavior cloning: ridge regression from state sensors to actions.

Features are the declared non-camera sensors concatenated in declaration
order plus a trailing bias term; targets are the serialized action rows
(joint commands + gripper code column).  Weights solve the ridge normal
equations (X^T X + lambda I) W^T = X^T Y by a direct dense solve; lambda
penalizes every coefficient including the bias.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import ControlMode, EnvConfig, SensorKind
from ..rng import CounterRng
from ..robot import Gripper, RobotCommand
from ..trajectory import Trajectory
from .base import Policy, PolicyDescriptor

BC_MAGIC = b"RBC1"


@dataclass
class LinearBCModel:
    weights: np.ndarray  # (action_dim, n_features + 1), bias column last
    feature_layout: tuple[tuple[str, int], ...]  # (sensor name, dim) in order
    ridge_lambda: float
    control_mode: ControlMode

    @property
    def n_features(self) -> int:
        return int(self.weights.shape[1]) - 1

    @property
    def action_dim(self) -> int:
        return int(self.weights.shape[0])


def feature_layout_for_config(cfg: EnvConfig) -> tuple[tuple[str, int], ...]:
    layout = []
    n = cfg.robot.n_joints
    dims = {
        SensorKind.JOINT_POS: n,
        SensorKind.JOINT_VEL: n,
        SensorKind.EE_POS: 2,
        SensorKind.PROPRIO: 2 * n + 2,
    }
    for s in cfg.sensors:
        if s.kind is SensorKind.GRID_CAMERA:
            continue  # visual BC is an extension point, not a v1 feature
        if s.kind is SensorKind.OBJECT_POSE:
            from ..scene import canonical_scene

            m = canonical_scene(cfg.task)[0].shape[0]
            layout.append((s.name, 2 * m + 2))
        else:
            layout.append((s.name, dims[s.kind]))
    return tuple(layout)


def _features(obs: dict[str, np.ndarray], layout) -> np.ndarray:
    parts = [np.asarray(obs[name], dtype=np.float64).reshape(-1) for name, _ in layout]
    parts.append(np.ones(1))
    return np.concatenate(parts)


def assemble_design(trajectories: list[Trajectory], layout) -> tuple[np.ndarray, np.ndarray]:
    """Pool (features, action) pairs across trajectories."""
    xs = []
    ys = []
    for traj in trajectories:
        T = traj.length
        cols = [traj.observations[name] for name, _ in layout]
        X = np.concatenate(cols + [np.ones((T, 1))], axis=1)
        xs.append(X)
        ys.append(traj.actions)
    return np.concatenate(xs, axis=0), np.concatenate(ys, axis=0)


def train_bc(
    trajectories: list[Trajectory],
    ridge_lambda: float,
    layout: tuple[tuple[str, int], ...],
    control_mode: ControlMode = ControlMode.POSITION,
) -> LinearBCModel:
    if not trajectories:
        raise ValueError("cannot train on an empty dataset")
    if ridge_lambda <= 0:
        raise ValueError("ridge coefficient must be positive")
    X, Y = assemble_design(trajectories, layout)
    expected = sum(d for _, d in layout) + 1
    if X.shape[1] != expected:
        raise ValueError("dataset observations do not match the feature layout")
    A = X.T @ X + ridge_lambda * np.eye(X.shape[1])
    B = X.T @ Y
    W_t = np.linalg.solve(A, B)  # (features+1, action_dim)
    return LinearBCModel(
        weights=W_t.T.copy(),
        feature_layout=layout,
        ridge_lambda=float(ridge_lambda),
        control_mode=control_mode,
    )


def bc_loss(model: LinearBCModel, X: np.ndarray, Y: np.ndarray) -> float:
    """Ridge objective the training solve minimizes."""
    resid = X @ model.weights.T - Y
    return float(np.sum(resid * resid) + model.ridge_lambda * np.sum(model.weights**2))


class BCPolicy(Policy):
    def __init__(self, model: LinearBCModel, joint_limits=None):
        self.model = model
        self.joint_limits = joint_limits
        self.descriptor = PolicyDescriptor(
            kind="bc", obs_keys=tuple(name for name, _ in model.feature_layout)
        )

    def act(self, obs: dict[str, np.ndarray], rng: CounterRng) -> RobotCommand:
        phi = _features(obs, self.model.feature_layout)
        y = self.model.weights @ phi
        values = y[:-1]
        if self.joint_limits is not None and self.model.control_mode is ControlMode.POSITION:
            lo = np.array([l for l, _ in self.joint_limits])
            hi = np.array([h for _, h in self.joint_limits])
            values = np.clip(values, lo, hi)
        code = int(round(float(y[-1])))
        gripper = Gripper(min(max(code, 0), 2))
        return RobotCommand(self.model.control_mode, values, gripper)


# -- model files --------------------------------------------------------------
# RBC1 | u8 control_mode | u16 n_sensors | per sensor (u8 name_len, name,
# u32 dim) | u32 action_dim | u32 n_cols | f64-LE weights row-major | f64-LE lambda


def save_bc(model: LinearBCModel, path: str | Path) -> None:
    out = [BC_MAGIC]
    mode_code = {ControlMode.POSITION: 0, ControlMode.VELOCITY: 1, ControlMode.TORQUE: 2}
    out.append(struct.pack("<B", mode_code[model.control_mode]))
    out.append(struct.pack("<H", len(model.feature_layout)))
    for name, dim in model.feature_layout:
        raw = name.encode("utf-8")
        out.append(struct.pack("<B", len(raw)))
        out.append(raw)
        out.append(struct.pack("<I", dim))
    rows, cols = model.weights.shape
    out.append(struct.pack("<II", rows, cols))
    out.append(np.ascontiguousarray(model.weights, dtype="<f8").tobytes())
    out.append(struct.pack("<d", model.ridge_lambda))
    Path(path).write_bytes(b"".join(out))


def load_bc(path: str | Path) -> LinearBCModel:
    data = Path(path).read_bytes()
    if data[:4] != BC_MAGIC:
        raise ValueError("not a hivekit BC model file")
    off = 4
    (mode_code,) = struct.unpack_from("<B", data, off)
    off += 1
    (n_sensors,) = struct.unpack_from("<H", data, off)
    off += 2
    layout = []
    for _ in range(n_sensors):
        (name_len,) = struct.unpack_from("<B", data, off)
        off += 1
        name = data[off : off + name_len].decode("utf-8")
        off += name_len
        (dim,) = struct.unpack_from("<I", data, off)
        off += 4
        layout.append((name, dim))
    rows, cols = struct.unpack_from("<II", data, off)
    off += 8
    weights = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=off).reshape(rows, cols).copy()
    off += 8 * rows * cols
    (lam,) = struct.unpack_from("<d", data, off)
    modes = {0: ControlMode.POSITION, 1: ControlMode.VELOCITY, 2: ControlMode.TORQUE}
    return LinearBCModel(
        weights=weights,
        feature_layout=tuple(layout),
        ridge_lambda=lam,
        control_mode=modes[mode_code],
    )
