"""Teleop gateway driven by the headless console over real sockets."""

import statistics
import time

import numpy as np
import pytest

from hivekit.dataset import replay_trajectory
from hivekit.registry import EnvRegistry, register_builtin
from hivekit.teleop import HeadlessConsole, TeleopError, TeleopServer
from hivekit.teleop.headless import joints_from_links
from hivekit.teleop.ws import accept_key


@pytest.fixture(scope="module")
def registry():
    reg = EnvRegistry()
    register_builtin(reg)
    return reg


@pytest.fixture()
def server(registry):
    srv = TeleopServer(registry.config("reach-v0"), rate_hz=20.0).start()
    yield srv
    srv.stop()


def test_ws_accept_key_rfc_vector():
    # the worked example from RFC 6455 section 1.3
    assert accept_key("dGhlIHNhbXBsZSBub25jZQ==") == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo="


def test_rate_and_idle_hold(server):
    console = HeadlessConsole(server.host, server.port)
    first = console.next_scene()
    q0 = joints_from_links(first["links"])
    t0 = time.monotonic()
    while len(console.scenes) < 41:
        console.next_scene()
    elapsed = time.monotonic() - t0
    rate = 40 / elapsed
    assert abs(rate - 20.0) / 20.0 < 0.10
    qn = joints_from_links(console.scenes[-1]["links"])
    assert np.allclose(q0, qn, atol=1e-6)  # no input -> robot holds
    # the loop's own interval bookkeeping agrees
    intervals = server.tick_intervals[-40:]
    assert abs(statistics.fmean(intervals) - 0.05) / 0.05 < 0.10
    console.close()


def test_keydown_moves_joint(server):
    console = HeadlessConsole(server.host, server.port)
    scene = console.next_scene()
    q0 = joints_from_links(scene["links"])
    console.send_key("j0+", True)
    for _ in range(20):
        scene = console.next_scene()
    console.send_key("j0+", False)
    q1 = joints_from_links(scene["links"])
    assert q1[0] > q0[0] + 0.05
    console.close()


def test_second_controller_busy_spectator_allowed(server):
    controller = HeadlessConsole(server.host, server.port)
    assert controller.hello["type"] == "hello"
    rejected = HeadlessConsole(server.host, server.port)
    assert rejected.hello["type"] == "busy"
    spectator = HeadlessConsole(server.host, server.port, want="spectate")
    assert spectator.hello["role"] == "spectate"
    scene = spectator.next_scene()
    assert scene["type"] == "scene"
    spectator.send_key("j0+", True)
    deadline = time.monotonic() + 3
    while not spectator.errors and time.monotonic() < deadline:
        spectator.next_scene(timeout=2)
    assert spectator.errors and "spectator" in spectator.errors[0]["msg"]
    controller.close()
    spectator.close()


def test_record_lifecycle_errors(server):
    console = HeadlessConsole(server.host, server.port)
    console.next_scene()
    console.record("stop")  # nothing in progress
    deadline = time.monotonic() + 3
    while not console.errors and time.monotonic() < deadline:
        console.next_scene(timeout=2)
    assert any("no recording" in e["msg"] for e in console.errors)

    console.record("start")
    console.record("start")  # double start
    deadline = time.monotonic() + 3
    while len(console.errors) < 2 and time.monotonic() < deadline:
        console.next_scene(timeout=2)
    assert any("already in progress" in e["msg"] for e in console.errors)
    console.close()


def test_empty_recording_discarded(server):
    console = HeadlessConsole(server.host, server.port)
    console.record("start")
    console.record("stop")
    deadline = time.monotonic() + 3
    msg = None
    while time.monotonic() < deadline:
        console.next_scene(timeout=2)
        stopped = [r for r in console.records if not r.get("active", True)]
        if stopped:
            msg = stopped[0]
            break
    assert msg is not None and "discard" in msg.get("note", "")
    assert server.saved_trajectories == []
    console.close()


def test_scene_message_schema(server):
    console = HeadlessConsole(server.host, server.port)
    scene = console.next_scene()
    assert set(scene) >= {"type", "time", "links", "objects", "target", "success", "reward"}
    assert len(scene["links"]) == 3  # base + two joints
    assert all(len(p) == 2 for p in scene["links"])
    console.close()


def test_scripted_solve_records_replayable_trajectory(registry):
    cfg = registry.config("reach-v0")
    server = TeleopServer(cfg, rate_hz=20.0).start()
    try:
        console = HeadlessConsole(server.host, server.port)
        console.record("start")
        assert console.solve_reach(cfg.robot, timeout=45)
        console.record("stop")
        console.reset()  # boundary finalizes the segment
        deadline = time.monotonic() + 5
        while not server.saved_trajectories and time.monotonic() < deadline:
            console.next_scene(timeout=2)
        trajs = server.saved_trajectories
        assert trajs, "no trajectory captured"
        assert trajs[0].source.name == "HUMAN_TELEOP"
        report = replay_trajectory(trajs[0], cfg)
        assert report.final_state_diff == 0.0
        assert report.per_step_max_diff == 0.0
        console.close()
    finally:
        server.stop()


def test_recording_splits_at_auto_reset(registry):
    cfg = registry.config("reach-v0")
    server = TeleopServer(cfg, rate_hz=40.0).start()  # faster loop: 200-step episodes
    try:
        console = HeadlessConsole(server.host, server.port)
        console.record("start")
        while len(console.episodes) < 2:
            console.next_scene(timeout=20)
        console.record("stop")
        console.reset()
        deadline = time.monotonic() + 5
        while len(server.saved_trajectories) < 2 and time.monotonic() < deadline:
            console.next_scene(timeout=2)
        assert len(server.saved_trajectories) >= 2
        console.close()
    finally:
        server.stop()


def test_rate_out_of_range_rejected(registry):
    with pytest.raises(TeleopError):
        TeleopServer(registry.config("reach-v0"), rate_hz=0.5)


def test_scripted_key_sequence_solves_reach(registry):
    # the criterion-10 interaction shape: pure keydown/keyup events
    cfg = registry.config("reach-v0")
    server = TeleopServer(cfg, rate_hz=20.0).start()
    try:
        console = HeadlessConsole(server.host, server.port)
        assert console.solve_reach(cfg.robot, timeout=60, mode="keys")
        console.close()
    finally:
        server.stop()
