"""Behavior cloning: ridge solve properties, model file round trip."""

import numpy as np
import pytest

from hivekit.agents import (
    PolicyRef,
    bc_loss,
    feature_layout_for_config,
    load_bc,
    save_bc,
    train_bc,
)
from hivekit.agents.bc import BCPolicy, assemble_design
from hivekit.collector import collect_trajectories
from hivekit.config import ControlMode
from hivekit.registry import EnvRegistry, register_builtin
from hivekit.rng import CounterRng
from hivekit.trajectory import Trajectory, TrajectorySource


@pytest.fixture(scope="module")
def registry():
    reg = EnvRegistry()
    register_builtin(reg)
    return reg


def _linear_dataset(W, n_traj=6, T=40, obs_dim=4, seed=0):
    """Trajectories whose actions are an exact linear map of the features."""
    rng = CounterRng(seed)
    layout = (("obs", obs_dim),)
    out = []
    for k in range(n_traj):
        X = np.array([[rng.uniform(-1, 1) for _ in range(obs_dim)] for _ in range(T)])
        phi = np.concatenate([X, np.ones((T, 1))], axis=1)
        Y = phi @ W.T
        out.append(
            Trajectory(
                env_id="lin-v0",
                seed=k,
                observations={"obs": X},
                actions=Y,
                rewards=np.zeros(T),
                successes=np.zeros(T, dtype=bool),
                initial_state=None,
                final_state=None,
                source=TrajectorySource.SCRIPTED,
            )
        )
    return out, layout


def test_recovers_exactly_linear_policy():
    true_W = np.array([[0.5, -1.0, 0.25, 2.0, 0.1], [1.5, 0.0, -0.5, 0.75, -0.2]])
    trajs, layout = _linear_dataset(true_W)
    model = train_bc(trajs, 1e-8, layout, ControlMode.POSITION)
    assert np.allclose(model.weights, true_W, atol=1e-6)


def test_ridge_limit_shrinks_to_zero():
    true_W = np.array([[0.5, -1.0, 0.25, 2.0, 0.1]])
    trajs, layout = _linear_dataset(true_W)
    model = train_bc(trajs, 1e12, layout, ControlMode.POSITION)
    assert np.max(np.abs(model.weights)) < 1e-3


def test_training_deterministic():
    true_W = np.array([[0.5, -1.0, 0.25, 2.0, 0.1]])
    trajs, layout = _linear_dataset(true_W)
    a = train_bc(trajs, 1e-3, layout, ControlMode.POSITION)
    b = train_bc(trajs, 1e-3, layout, ControlMode.POSITION)
    assert np.array_equal(a.weights, b.weights)


def test_first_order_optimality():
    # the returned W beats random unit-scale perturbations of size 1e-4
    true_W = np.array([[0.5, -1.0, 0.25, 2.0, 0.1], [0.0, 1.0, 0.0, -1.0, 0.3]])
    trajs, layout = _linear_dataset(true_W, seed=5)
    model = train_bc(trajs, 0.1, layout, ControlMode.POSITION)
    X, Y = assemble_design(trajs, layout)
    base = bc_loss(model, X, Y)
    rng = CounterRng(11)
    for _ in range(20):
        delta = np.array(
            [[rng.standard_normal() for _ in range(model.weights.shape[1])]
             for _ in range(model.weights.shape[0])]
        )
        delta /= np.sqrt(np.sum(delta * delta))
        perturbed = type(model)(
            weights=model.weights + 1e-4 * delta,
            feature_layout=model.feature_layout,
            ridge_lambda=model.ridge_lambda,
            control_mode=model.control_mode,
        )
        assert bc_loss(perturbed, X, Y) >= base


def test_empty_dataset_rejected():
    with pytest.raises(ValueError, match="empty"):
        train_bc([], 1e-3, (("obs", 4),), ControlMode.POSITION)


def test_nonpositive_lambda_rejected():
    true_W = np.array([[0.5, -1.0, 0.25, 2.0, 0.1]])
    trajs, layout = _linear_dataset(true_W)
    with pytest.raises(ValueError, match="positive"):
        train_bc(trajs, 0.0, layout, ControlMode.POSITION)


def test_model_file_roundtrip(tmp_path):
    true_W = np.array([[0.5, -1.0, 0.25, 2.0, 0.1], [1.5, 0.0, -0.5, 0.75, -0.2]])
    trajs, layout = _linear_dataset(true_W)
    model = train_bc(trajs, 1e-3, layout, ControlMode.VELOCITY)
    path = tmp_path / "model.rbc"
    save_bc(model, path)
    loaded = load_bc(path)
    assert np.array_equal(loaded.weights, model.weights)
    assert loaded.feature_layout == model.feature_layout
    assert loaded.ridge_lambda == model.ridge_lambda
    assert loaded.control_mode is ControlMode.VELOCITY
    assert path.read_bytes()[:4] == b"RBC1"


def test_camera_excluded_from_features(registry):
    cfg = registry.config("reach_v2d-v0")
    layout = feature_layout_for_config(cfg)
    assert [name for name, _ in layout] == ["jointpos", "jointvel", "eepos", "objects"]


def test_bc_policy_rounds_gripper(registry):
    cfg = registry.config("reach-v0")
    trajs = collect_trajectories("reach-v0", PolicyRef("expert"), 2, base_seed=0, registry=registry)
    layout = feature_layout_for_config(cfg)
    model = train_bc(trajs, 1e-3, layout, cfg.control_mode)
    pol = BCPolicy(model, joint_limits=cfg.robot.joint_limits)
    obs = {name: trajs[0].observations[name][0] for name, _ in layout}
    cmd = pol.act(obs, CounterRng(0))
    assert cmd.gripper.value in (0, 1, 2)
    for j, (lo, hi) in enumerate(cfg.robot.joint_limits):
        assert lo <= cmd.values[j] <= hi
