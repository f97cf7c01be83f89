"""Environment loop: episode control, rewards, success, decoupling."""

import math
from dataclasses import replace

import numpy as np
import pytest

from hivekit.config import TaskKind, TaskSpec
from hivekit.envs import Env, EpisodeFinishedError, compute_reward, compute_success
from hivekit.envs.tasks import wrap_angle
from hivekit.registry import EnvRegistry, register_builtin
from hivekit.robot import Gripper, RobotCommand
from hivekit.rng import CounterRng, derive_episode_seed
from hivekit.agents import scripted_expert
from hivekit.sim import engine
from hivekit.sim.state import make_state


@pytest.fixture(scope="module")
def registry():
    reg = EnvRegistry()
    register_builtin(reg)
    return reg


def _run_episode(env, policy, seed):
    obs = env.reset(seed)
    policy.reset_episode()
    rng = CounterRng(seed, 3)
    results = []
    while True:
        res = env.step(policy.act(obs, rng))
        results.append(res)
        obs = res.obs
        if res.done:
            return results


def test_step_after_done_raises(registry):
    env = registry.make("reach-v0")
    obs = env.reset(1)
    cmd = RobotCommand(env.cfg.control_mode, obs["jointpos"])
    for _ in range(env.cfg.horizon):
        res = env.step(cmd)
    assert res.done
    with pytest.raises(EpisodeFinishedError, match="episode finished; call reset"):
        env.step(cmd)


def test_horizon_one_done_immediately(registry):
    cfg = replace(registry.config("reach-v0"), horizon=1)
    env = Env(cfg)
    obs = env.reset(0)
    res = env.step(RobotCommand(cfg.control_mode, obs["jointpos"]))
    assert res.done


def test_info_contract(registry):
    env = registry.make("reach-v0")
    obs = env.reset(1)
    res = env.step(RobotCommand(env.cfg.control_mode, obs["jointpos"]))
    assert res.info["solved"] == res.success
    assert res.info["time"] == pytest.approx(env.cfg.frame_skip * env.cfg.dt)


def test_episode_never_exceeds_horizon(registry):
    env = registry.make("pickplace-v0")
    pol = scripted_expert(env.cfg.task, env.cfg.robot)
    for ep in range(4):
        results = _run_episode(env, pol, derive_episode_seed(0, ep))
        assert len(results) <= env.cfg.horizon


# -- reward shapes (trivial frozen examples) ------------------------------------


def _arm_model(registry):
    return registry.config("reach-v0").robot


def test_reach_reward_zero_at_target(registry):
    model = _arm_model(registry)
    q = np.array([0.5, 0.5])
    ee = engine.end_effector(model, q)
    task = TaskSpec(kind=TaskKind.REACH, target=(float(ee[0]), float(ee[1])), success_radius=0.05)
    state = make_state(q)
    assert compute_reward(task, state, model) == pytest.approx(0.0, abs=1e-12)


def test_reach_reward_unit_distance(registry):
    model = _arm_model(registry)
    task = TaskSpec(kind=TaskKind.REACH, target=(0.0, 0.0), success_radius=0.05)
    # one-link placement: EE exactly at (1.0, 0) via straight arm pose
    q = np.array([0.0, 0.0])
    ee = engine.end_effector(model, q)  # (1.4, 0)
    task = TaskSpec(kind=TaskKind.REACH, target=(float(ee[0]) - 1.0, 0.0), success_radius=0.05)
    state = make_state(q)
    assert compute_reward(task, state, model) == pytest.approx(-1.0, abs=1e-12)


def test_push_reward_zero_when_stacked(registry):
    model = _arm_model(registry)
    q = np.array([0.5, 0.5])
    ee = engine.end_effector(model, q)
    task = TaskSpec(kind=TaskKind.PUSH, target=(float(ee[0]), float(ee[1])), success_radius=0.1)
    state = make_state(q, obj_pos=[ee.tolist()])
    assert compute_reward(task, state, model) == pytest.approx(0.0, abs=1e-12)


def test_pendulum_reward_terms(registry):
    model = replace(_arm_model(registry), kind=_pend(registry).kind)  # unused guard
    pend = _pend(registry)
    task = TaskSpec(kind=TaskKind.PENDULUM_SWINGUP, target=(math.pi / 2,), success_radius=0.15)
    state = make_state([math.pi / 2 - 0.1], [0.5])
    u = np.array([2.0])
    expected = -(0.1**2) - 0.01 * 0.25 - 0.001 * 4.0
    assert compute_reward(task, state, pend, u) == pytest.approx(expected, abs=1e-9)


def _pend(registry):
    return registry.config("pendulum-v0").robot


# -- success predicates ----------------------------------------------------------


def test_success_boundary_is_strict(registry):
    model = _arm_model(registry)
    q = np.array([0.0, 0.0])
    ee = engine.end_effector(model, q)
    task = TaskSpec(
        kind=TaskKind.REACH, target=(float(ee[0]) - 0.05, float(ee[1])), success_radius=0.05
    )
    state = make_state(q)
    assert compute_success(task, state, model) is False  # distance == radius
    task2 = replace(task, success_radius=0.05 + 1e-12)
    assert compute_success(task2, state, model) is True


def test_pickplace_success_requires_released(registry):
    model = _arm_model(registry)
    task = TaskSpec(
        kind=TaskKind.PICK_PLACE,
        target=(1.0, -0.35),
        success_radius=0.1,
        bin_center=(1.0, -0.35),
        bin_radius=0.12,
    )
    state = make_state([0.5, 0.5], obj_pos=[[1.0, -0.35]])
    assert compute_success(task, state, model) is True
    state.grasped = 0
    assert compute_success(task, state, model) is False


def test_pendulum_success_needs_low_velocity(registry):
    pend = _pend(registry)
    task = TaskSpec(kind=TaskKind.PENDULUM_SWINGUP, target=(math.pi / 2,), success_radius=0.15)
    assert compute_success(task, make_state([math.pi / 2], [0.5]), pend) is True
    assert compute_success(task, make_state([math.pi / 2], [1.5]), pend) is False
    assert compute_success(task, make_state([math.pi / 2 + 0.2], [0.0]), pend) is False


def test_wrap_angle():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(2 * math.pi + 0.25) == pytest.approx(0.25, abs=1e-12)
    assert wrap_angle(-math.pi) == -math.pi  # wraps into [-pi, pi)


def test_monotone_reach_reward_along_approach(registry):
    model = _arm_model(registry)
    task = TaskSpec(kind=TaskKind.REACH, target=(0.9, 0.2), success_radius=0.05)
    prev = None
    # straight-line EE approach realized through IK states
    for alpha in np.linspace(0.0, 0.95, 30):
        point = (1 - alpha) * np.array([1.2, -0.5]) + alpha * np.array([0.9, 0.2])
        # pick a joint state whose EE is exactly `point` via two-link inverse kinematics
        x, y = point
        r2 = x * x + y * y
        l1, l2 = model.link_lengths
        c2 = (r2 - l1 * l1 - l2 * l2) / (2 * l1 * l2)
        q2 = math.acos(max(-1.0, min(1.0, c2)))
        q1 = math.atan2(y, x) - math.atan2(l2 * math.sin(q2), l1 + l2 * math.cos(q2))
        state = make_state([q1, q2])
        r = compute_reward(task, state, model)
        if prev is not None:
            assert r > prev
        prev = r


def test_success_implies_reward_bound(registry):
    # success => reward > -success_radius (margin 0) for reach
    model = _arm_model(registry)
    task = TaskSpec(kind=TaskKind.REACH, target=(0.9, 0.2), success_radius=0.07)
    rng = CounterRng(3)
    hits = 0
    for _ in range(200):
        state = make_state([rng.uniform(-2, 2), rng.uniform(-2, 2)])
        if compute_success(task, state, model):
            hits += 1
            assert compute_reward(task, state, model) > -task.success_radius
    assert hits > 0


# -- reward/success decoupling -----------------------------------------------------


def test_zero_reward_injection_changes_no_success_flag(registry):
    for env_id in ("reach-v0", "push-v0", "pickplace-v0", "pendulum-v0"):
        normal = registry.make(env_id)
        injected = registry.make(
            env_id, reward_fn=lambda task, state, model, cmd, ee=None: 0.0
        )
        pol = scripted_expert(normal.cfg.task, normal.cfg.robot)
        for ep in range(3):
            seed = derive_episode_seed(1, ep)
            ra = _run_episode(normal, pol, seed)
            rb = _run_episode(injected, pol, seed)
            assert [r.success for r in ra] == [r.success for r in rb]
            assert all(r.reward == 0.0 for r in rb)
            assert any(r.reward != 0.0 for r in ra)


def test_pickplace_latch_terminates_early(registry):
    env = registry.make("pickplace-v0")
    pol = scripted_expert(env.cfg.task, env.cfg.robot)
    results = _run_episode(env, pol, derive_episode_seed(0, 0))
    assert results[-1].done and results[-1].success
    assert len(results) < env.cfg.horizon
    # exactly 5 consecutive successes at the tail
    assert all(r.success for r in results[-5:])
    assert not results[-6].success


def test_two_instances_same_seed_identical_first_step(registry):
    # independent instances from one registered id, same episode seed
    a = registry.make("reach-v0")
    b = registry.make("reach-v0")
    obs_a = a.reset(99)
    obs_b = b.reset(99)
    for name in obs_a:
        assert np.array_equal(obs_a[name], obs_b[name])
    cmd = RobotCommand(a.cfg.control_mode, np.array([0.7, -0.2]))
    ra = a.step(cmd)
    rb = b.step(cmd)
    assert ra.reward == rb.reward and ra.success == rb.success and ra.done == rb.done
    for name in ra.obs:
        assert np.array_equal(ra.obs[name], rb.obs[name])
