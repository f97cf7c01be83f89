"""Teleoperation gateway: a live env session at fixed rate over WebSocket.

One console controls a session; later control requests get a busy message,
spectators receive read-only scene updates.  Input events fold into a held
command between ticks (last writer wins per axis; keys act while held, axis
values decay toward zero).  Recording splits at episode boundaries and
lands in a RoboSet-lite container, indistinguishable from collector output.

Protocol (JSON text frames, see docs/console_protocol.md):
  client -> server: hello, input, record, reset
  server -> client: hello, scene, episode, record, error, busy
"""

from __future__ import annotations

import json
import socket
import threading
import time
from collections import deque
from typing import Optional

import numpy as np

from ..config import ControlMode, EnvConfig, config_digest
from ..dataset.container import write_trajectories
from ..envs.env import Env
from ..robot import Gripper, RobotCommand
from ..sim import engine
from ..trajectory import Trajectory, TrajectoryRecorder, TrajectorySource
from . import ws

KEY_RATE = 1.2  # rad/s per fully pressed key or axis
AXIS_DECAY = 0.8  # per-tick decay toward zero for axis-sourced intensities
MAX_PENDING_EVENTS = 256


class TeleopError(Exception):
    pass


class _Console:
    def __init__(self, conn: ws.WsConnection, role: str):
        self.conn = conn
        self.role = role
        self.send_lock = threading.Lock()
        self.alive = True

    def send(self, message: dict) -> None:
        if not self.alive:
            return
        try:
            with self.send_lock:
                self.conn.send_json(message)
        except (ws.WsError, OSError):
            self.alive = False


class TeleopServer:
    def __init__(
        self,
        cfg: EnvConfig,
        port: int = 0,
        rate_hz: float = 20.0,
        out_path: Optional[str] = None,
        host: str = "127.0.0.1",
    ):
        if not 1.0 <= rate_hz <= 100.0:
            raise TeleopError("rate_hz must be within [1, 100]")
        self.cfg = cfg
        self.rate_hz = rate_hz
        self.out_path = out_path
        self.env = Env(cfg)
        self._events: deque = deque(maxlen=MAX_PENDING_EVENTS)
        self._lock = threading.Lock()
        self._controller: Optional[_Console] = None
        self._spectators: list[_Console] = []
        self._running = False
        self._threads: list[threading.Thread] = []

        self._keys: dict[str, bool] = {}
        self._axes: dict[str, float] = {}
        self._fresh_axes: set[str] = set()
        self._pending_grip = False
        self._pending_reset = False

        self._recording = False
        self._stop_requested = False
        self._recorder: Optional[TrajectoryRecorder] = None
        self._saved: list[Trajectory] = []
        self._episodes = 0
        self._last_obs: Optional[dict] = None
        self._last_reward = 0.0
        self._last_success = False
        self.tick_intervals: list[float] = []  # instrumentation for rate tests

        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(4)
        self.host = host
        self.port = self._listener.getsockname()[1]

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> "TeleopServer":
        self._running = True
        self._last_obs = self.env.reset()
        accept = threading.Thread(target=self._accept_loop, daemon=True)
        loop = threading.Thread(target=self._session_loop, daemon=True)
        accept.start()
        loop.start()
        self._threads += [accept, loop]
        return self

    def stop(self) -> None:
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        for t in self._threads:
            t.join(timeout=2.0)
        with self._lock:
            consoles = ([self._controller] if self._controller else []) + self._spectators
        for c in consoles:
            c.conn.close()
        self.env.close()

    @property
    def saved_trajectories(self) -> list[Trajectory]:
        return list(self._saved)

    # -- connections -----------------------------------------------------------

    def _accept_loop(self) -> None:
        while self._running:
            try:
                conn_sock, _ = self._listener.accept()
            except OSError:
                return
            threading.Thread(
                target=self._handle_connection, args=(conn_sock,), daemon=True
            ).start()

    def _handle_connection(self, conn_sock: socket.socket) -> None:
        conn_sock.settimeout(30.0)
        try:
            ws.server_handshake(conn_sock)
            conn = ws.WsConnection(conn_sock, mask=False)
            hello = conn.recv_json()
        except (ws.WsError, OSError):
            try:
                conn_sock.close()
            except OSError:
                pass
            return
        if hello.get("type") != "hello":
            conn.send_json({"type": "error", "msg": "expected a hello message"})
            conn.close()
            return
        want = hello.get("want", "control")
        with self._lock:
            if want == "control" and self._controller is None:
                console = _Console(conn, "control")
                self._controller = console
            elif want == "control":
                conn.send_json({"type": "busy"})
                conn.close()
                return
            else:
                console = _Console(conn, "spectate")
                self._spectators.append(console)
        console.send({"type": "hello", "role": console.role, "env_id": self.cfg.env_id})
        self._reader(console)

    def _reader(self, console: _Console) -> None:
        console.conn.sock.settimeout(0.5)
        while self._running and console.alive:
            try:
                msg = console.conn.recv_json()
            except socket.timeout:
                continue
            except (ws.WsClosed, OSError):
                break
            except ws.WsError as e:
                console.send({"type": "error", "msg": str(e)})
                break
            if console.role != "control":
                console.send({"type": "error", "msg": "spectators cannot send commands"})
                continue
            self._events.append(msg)
        console.alive = False
        with self._lock:
            if self._controller is console:
                self._controller = None
                self._keys.clear()
                self._axes.clear()
            elif console in self._spectators:
                self._spectators.remove(console)

    # -- event folding -----------------------------------------------------------

    def _fold_events(self) -> None:
        while self._events:
            msg = self._events.popleft()
            kind = msg.get("type")
            if kind == "input":
                self._fold_input(msg)
            elif kind == "record":
                self._handle_record(msg.get("action"))
            elif kind == "reset":
                self._pending_reset = True
            else:
                self._send_control({"type": "error", "msg": f"unknown message type {kind!r}"})

    def _fold_input(self, msg: dict) -> None:
        event = msg.get("kind")
        code = str(msg.get("code", ""))
        if event == "keydown":
            if code == "grip":
                self._pending_grip = True
            else:
                self._keys[code] = True
        elif event == "keyup":
            self._keys.pop(code, None)
        elif event == "axis":
            try:
                value = float(msg.get("value", 0.0))
            except (TypeError, ValueError):
                value = 0.0
            self._axes[code] = max(-1.0, min(1.0, value))
            self._fresh_axes.add(code)
        else:
            self._send_control({"type": "error", "msg": f"unknown input kind {event!r}"})

    def _intensities(self) -> np.ndarray:
        n = self.cfg.robot.n_joints
        out = np.zeros(n)
        for j in range(n):
            if self._keys.get(f"j{j}+"):
                out[j] = 1.0
            elif self._keys.get(f"j{j}-"):
                out[j] = -1.0
            axis = self._axes.get(f"a{j}")
            if axis is not None and axis != 0.0:
                out[j] = axis  # last writer wins: an active axis overrides keys
        # axes decay toward zero only on ticks without a fresh event
        for code in list(self._axes):
            if code in self._fresh_axes:
                continue
            self._axes[code] *= AXIS_DECAY
            if abs(self._axes[code]) < 1e-3:
                del self._axes[code]
        self._fresh_axes.clear()
        return out

    def _held_command(self) -> RobotCommand:
        n = self._intensities()
        gripper = Gripper.NO_CHANGE
        if self._pending_grip:
            self._pending_grip = False
            held = self.env.robot.scene().grasped >= 0
            gripper = Gripper.RELEASE if held else Gripper.GRASP
        mode = self.cfg.control_mode
        if mode is ControlMode.POSITION:
            # offset whose PD steady state is the commanded joint velocity
            q = self.env.robot.scene().joint_pos
            values = q + n * (KEY_RATE * engine.KD / engine.KP)
        elif mode is ControlMode.VELOCITY:
            values = n * KEY_RATE
        else:
            values = n * np.asarray(self.cfg.robot.torque_limits)
        return RobotCommand(mode, values, gripper)

    # -- recording -----------------------------------------------------------

    def _handle_record(self, action) -> None:
        if action == "start":
            if self._recording:
                self._send_control({"type": "error", "msg": "recording already in progress"})
                return
            self._recording = True
            self._stop_requested = False
            self._recorder = TrajectoryRecorder(
                self.cfg.env_id, self.env.episode_seed or 0, self.env.snapshot_state()
            )
            self._send_control({"type": "record", "active": True, "saved": len(self._saved)})
        elif action == "stop":
            if not self._recording:
                self._send_control({"type": "error", "msg": "no recording in progress"})
                return
            if self._recorder is not None and len(self._recorder) == 0:
                self._recording = False
                self._recorder = None
                self._send_control(
                    {
                        "type": "record",
                        "active": False,
                        "saved": len(self._saved),
                        "note": "empty recording discarded",
                    }
                )
                return
            self._stop_requested = True  # finalize at the next episode boundary
        else:
            self._send_control({"type": "error", "msg": f"unknown record action {action!r}"})

    def _finalize_recording_segment(self) -> None:
        if not self._recording or self._recorder is None:
            return
        if len(self._recorder):
            traj = self._recorder.finish(
                self.env.snapshot_state(),
                TrajectorySource.HUMAN_TELEOP,
                metadata={
                    "config_digest": config_digest(self.cfg).hex(),
                    "policy": "human-teleop",
                },
            )
            self._saved.append(traj)
            if self.out_path:
                write_trajectories(self.out_path, self.cfg, self._saved)
        if self._stop_requested:
            self._recording = False
            self._recorder = None
            self._stop_requested = False
            self._send_control({"type": "record", "active": False, "saved": len(self._saved)})
        else:
            self._recorder = TrajectoryRecorder(
                self.cfg.env_id, self.env.episode_seed or 0, None
            )

    # -- session loop -----------------------------------------------------------

    def _session_loop(self) -> None:
        period = 1.0 / self.rate_hz
        next_tick = time.monotonic()
        last = None
        while self._running:
            now = time.monotonic()
            if last is not None:
                self.tick_intervals.append(now - last)
            last = now
            self._tick()
            next_tick += period
            delay = next_tick - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_tick = time.monotonic()

    def _tick(self) -> None:
        self._fold_events()
        if self._pending_reset:
            self._pending_reset = False
            self._finalize_recording_segment()
            self._episode_boundary("reset")
        cmd = self._held_command()
        obs_before = self._last_obs
        result = self.env.step(cmd)
        self._last_reward = result.reward
        self._last_success = result.success
        self._last_obs = result.obs
        if self._recording and self._recorder is not None and obs_before is not None:
            self._recorder.record(obs_before, cmd.as_row(), result.reward, result.success)
        if result.done:
            self._finalize_recording_segment()
            self._episode_boundary("done")
        self._broadcast(self._scene_message())

    def _episode_boundary(self, event: str) -> None:
        self._episodes += 1
        self._last_obs = self.env.reset()
        if self._recording and self._recorder is not None:
            # new segment starts from the fresh episode state
            self._recorder = TrajectoryRecorder(
                self.cfg.env_id, self.env.episode_seed or 0, self.env.snapshot_state()
            )
        self._broadcast({"type": "episode", "event": event})

    def _scene_message(self) -> dict:
        scene = self.env.robot.scene()
        frames = engine.forward_kinematics(self.cfg.robot, scene.joint_pos)
        return {
            "type": "scene",
            "time": scene.time,
            "links": [[float(x), float(y)] for x, y in frames],
            "objects": [
                {
                    "p": [float(scene.obj_pos[i, 0]), float(scene.obj_pos[i, 1])],
                    "r": float(scene.obj_radius[i]),
                    "c": int(scene.obj_color[i]),
                }
                for i in range(scene.obj_pos.shape[0])
            ],
            "target": [float(scene.target[0]), float(scene.target[1])],
            "success": bool(self._last_success),
            "reward": float(self._last_reward),
            "recording": self._recording,
        }

    def _send_control(self, message: dict) -> None:
        with self._lock:
            controller = self._controller
        if controller is not None:
            controller.send(message)

    def _broadcast(self, message: dict) -> None:
        with self._lock:
            consoles = ([self._controller] if self._controller else []) + list(
                self._spectators
            )
        for c in consoles:
            c.send(message)


def teleop_serve(
    cfg: EnvConfig, port: int = 0, rate_hz: float = 20.0, out_path: Optional[str] = None
) -> TeleopServer:
    """Start a teleop session service; returns the running server."""
    return TeleopServer(cfg, port=port, rate_hz=rate_hz, out_path=out_path).start()
