"""Mock hardware: a TCP service running the wire protocol over an embedded sim.

Lockstep mode advances the embedded simulation only on SET_CMD, which makes
sim/hardware parity tests deterministic.  FreeRun mode advances on a wall
clock timer and injects a configured latency into every response, for
robustness testing.  One client at a time; extra connections get a BUSY
error frame and are closed.
"""

from __future__ import annotations

import socket
import struct
import threading
import time
from typing import Optional

import numpy as np

from ..config import ControlMode, EnvConfig, RandomizationSpec, RobotModelSpec
from ..rng import STREAM_SCENE, CounterRng
from ..scene import canonical_scene
from ..sim import engine
from ..sim.state import SimState
from .base import CODE_MODE, MODE_CODE
from . import wire

MODE_LOCKSTEP = "lockstep"
MODE_FREERUN = "freerun"


class MockHardwareServer:
    def __init__(
        self,
        model: RobotModelSpec,
        port: int = 0,
        mode: str = MODE_LOCKSTEP,
        *,
        control_mode: ControlMode = ControlMode.POSITION,
        dt: float = 0.01,
        frame_skip: int = 1,
        scene=None,  # (obj_pos, obj_radius, obj_mass, obj_color) arrays
        randomization: Optional[RandomizationSpec] = None,
        latency_ms: float = 0.0,
        host: str = "127.0.0.1",
    ):
        if mode not in (MODE_LOCKSTEP, MODE_FREERUN):
            raise ValueError(f"unknown server mode {mode!r}")
        self.model = model
        self.mode = mode
        self.control_mode = control_mode
        self.dt = dt
        self.frame_skip = frame_skip
        self.latency = latency_ms / 1000.0
        self.randomization = randomization
        if scene is None:
            scene = (np.zeros((0, 2)), np.zeros(0), np.zeros(0), np.zeros(0, dtype=np.int32))
        self._scene = scene
        self._lock = threading.Lock()
        self._state = self._canonical_state()
        self._last_cmd: Optional[tuple[int, np.ndarray]] = None
        self._running = False
        self._busy = False
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(4)
        self.host = host
        self.port = self._listener.getsockname()[1]
        self._threads: list[threading.Thread] = []

    # -- embedded sim --------------------------------------------------------

    def _canonical_state(self) -> SimState:
        opos, orad, omass, ocolor = self._scene
        n = self.model.n_joints
        return SimState(
            time=0.0,
            joint_pos=engine.canonical_joint_pos(self.model),
            joint_vel=np.zeros(n),
            obj_pos=opos.copy(),
            obj_vel=np.zeros_like(opos),
            obj_radius=orad.copy(),
            obj_mass=omass.copy(),
            obj_color=ocolor.copy(),
            grasped=-1,
        )

    def _do_reset(self, episode_seed: int) -> None:
        state = self._canonical_state()
        if self.randomization is not None:
            rng = CounterRng(episode_seed, STREAM_SCENE)
            state = engine.randomize_scene(state, self.randomization, rng)
        self._state = state
        self._last_cmd = None

    def _apply(self, mode_code: int, gripper_code: int, values: np.ndarray) -> None:
        if gripper_code == 1:
            self._state = engine.attempt_grasp(self._state, self.model)
        elif gripper_code == 2:
            self._state = engine.release_grasp(self._state)
        self._state = engine.step_n(
            self._state, self.model, CODE_MODE[mode_code], values, self.dt, self.frame_skip
        )
        self._last_cmd = (mode_code, values)

    def _freerun_tick(self) -> None:
        with self._lock:
            if self._last_cmd is not None:
                mode_code, values = self._last_cmd
            elif self.control_mode is ControlMode.POSITION:
                mode_code = MODE_CODE[self.control_mode]
                values = self._state.joint_pos.copy()
            else:
                mode_code = MODE_CODE[self.control_mode]
                values = np.zeros(self.model.n_joints)
            self._state = engine.step_n(
                self._state, self.model, CODE_MODE[mode_code], values, self.dt, self.frame_skip
            )

    # -- service --------------------------------------------------------------

    def start(self) -> "MockHardwareServer":
        self._running = True
        t = threading.Thread(target=self._accept_loop, daemon=True)
        t.start()
        self._threads.append(t)
        if self.mode == MODE_FREERUN:
            t2 = threading.Thread(target=self._timer_loop, daemon=True)
            t2.start()
            self._threads.append(t2)
        return self

    def stop(self) -> None:
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        for t in self._threads:
            t.join(timeout=2.0)

    @property
    def sim_time(self) -> float:
        with self._lock:
            return self._state.time

    def state_copy(self) -> SimState:
        with self._lock:
            return self._state.copy()

    def _timer_loop(self) -> None:
        period = self.dt * self.frame_skip
        while self._running:
            time.sleep(period)
            if self._running:
                self._freerun_tick()

    def _accept_loop(self) -> None:
        while self._running:
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            with self._lock:
                if self._busy:
                    try:
                        conn.sendall(wire.encode_error(0, wire.ERR_BUSY, "busy"))
                        conn.close()
                    except OSError:
                        pass
                    continue
                self._busy = True
            t = threading.Thread(target=self._serve_client, args=(conn,), daemon=True)
            t.start()
            self._threads.append(t)

    def _delay(self) -> None:
        if self.latency > 0:
            time.sleep(self.latency)

    def _serve_client(self, conn: socket.socket) -> None:
        conn.settimeout(0.5)
        try:
            while self._running:
                try:
                    frame = wire.recv_frame(conn)
                except wire.WireTimeout:
                    continue
                except wire.WireError:
                    return
                try:
                    reply = self._handle(frame)
                except wire.WireError as e:
                    reply = wire.encode_error(frame.request_id, wire.ERR_MALFORMED, str(e))
                self._delay()
                try:
                    conn.sendall(reply)
                except OSError:
                    return
        finally:
            try:
                conn.close()
            except OSError:
                pass
            with self._lock:
                self._busy = False

    def _handle(self, frame: wire.Frame) -> bytes:
        op = frame.opcode
        rid = frame.request_id
        if op == wire.OP_PING:
            return wire.encode_frame(wire.OP_PONG, rid)
        if op == wire.OP_RESET:
            if len(frame.payload) != 8:
                return wire.encode_error(rid, wire.ERR_MALFORMED, "RESET needs u64 seed")
            (seed,) = struct.unpack(">Q", frame.payload)
            with self._lock:
                self._do_reset(seed)
                return wire.encode_frame(wire.OP_STATE_ECHO, rid, self._state_payload())
        if op == wire.OP_GET_STATE:
            with self._lock:
                return wire.encode_frame(wire.OP_STATE, rid, self._state_payload())
        if op == wire.OP_SET_CMD:
            mode_code, gripper_code, values = wire.decode_command(frame.payload)
            if mode_code != MODE_CODE[self.control_mode]:
                return wire.encode_error(
                    rid,
                    wire.ERR_MODE_MISMATCH,
                    f"server is configured for {self.control_mode.value} control",
                )
            if values.shape != (self.model.n_joints,):
                return wire.encode_error(rid, wire.ERR_MALFORMED, "bad command dimension")
            with self._lock:
                self._apply(mode_code, gripper_code, values)
            return wire.encode_frame(wire.OP_ACK, rid)
        return wire.encode_error(rid, wire.ERR_UNSUPPORTED, f"opcode {op:#x}")

    def _state_payload(self) -> bytes:
        s = self._state
        return wire.encode_state(s.joint_pos, s.joint_vel, s.obj_pos, s.obj_vel)


def mock_server_for_config(
    cfg: EnvConfig, port: int = 0, mode: str = MODE_LOCKSTEP, latency_ms: float = 0.0
) -> MockHardwareServer:
    """A server whose embedded sim mirrors the given env config."""
    return MockHardwareServer(
        cfg.robot,
        port=port,
        mode=mode,
        control_mode=cfg.control_mode,
        dt=cfg.dt,
        frame_skip=cfg.frame_skip,
        scene=canonical_scene(cfg.task),
        randomization=cfg.randomization,
        latency_ms=latency_ms,
    )
