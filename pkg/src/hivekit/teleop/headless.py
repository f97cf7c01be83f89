"""Headless console: a scripted protocol driver for the teleop gateway.

Stands in for the browser console in tests and CI: speaks the exact wire
protocol (WebSocket + JSON), reconstructs joint angles from scene link
frames, and solves reach tasks with bang-bang key events.
"""

from __future__ import annotations

import math
import socket
import time
from typing import Callable, Optional

import numpy as np

from ..config import RobotModelSpec
from . import ws


def joints_from_links(links: list[list[float]]) -> np.ndarray:
    """Invert forward kinematics: frame deltas -> joint angles."""
    out = []
    prev = 0.0
    for k in range(1, len(links)):
        dx = links[k][0] - links[k - 1][0]
        dy = links[k][1] - links[k - 1][1]
        absolute = math.atan2(dy, dx)
        delta = absolute - prev
        # unwrap into (-pi, pi]
        while delta <= -math.pi:
            delta += 2 * math.pi
        while delta > math.pi:
            delta -= 2 * math.pi
        out.append(delta)
        prev = absolute
    return np.array(out)


class HeadlessConsole:
    def __init__(self, host: str, port: int, want: str = "control", timeout: float = 10.0):
        self.conn = ws.connect(host, port, timeout=timeout)
        self.conn.send_json({"type": "hello", "want": want})
        self.hello = self._next_typed({"hello", "busy"})
        self.role = self.hello.get("role") if self.hello["type"] == "hello" else None
        self.scenes: list[dict] = []
        self.episodes: list[dict] = []
        self.records: list[dict] = []
        self.errors: list[dict] = []
        self._pressed: dict[str, bool] = {}

    # -- plumbing ---------------------------------------------------------

    def _dispatch(self, msg: dict) -> None:
        kind = msg.get("type")
        if kind == "scene":
            self.scenes.append(msg)
        elif kind == "episode":
            self.episodes.append(msg)
        elif kind == "record":
            self.records.append(msg)
        elif kind == "error":
            self.errors.append(msg)

    def _next_typed(self, kinds: set[str], timeout: float = 10.0) -> dict:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            try:
                msg = self.conn.recv_json()
            except socket.timeout:
                continue
            self._dispatch(msg)
            if msg.get("type") in kinds:
                return msg
        raise TimeoutError(f"no {kinds} message within {timeout}s")

    def next_scene(self, timeout: float = 10.0) -> dict:
        return self._next_typed({"scene"}, timeout)

    def close(self) -> None:
        self.conn.close()

    # -- outgoing messages ---------------------------------------------------------

    def send_key(self, code: str, down: bool) -> None:
        self.conn.send_json(
            {"type": "input", "kind": "keydown" if down else "keyup", "code": code}
        )

    def send_axis(self, code: str, value: float) -> None:
        self.conn.send_json({"type": "input", "kind": "axis", "code": code, "value": value})

    def record(self, action: str) -> None:
        self.conn.send_json({"type": "record", "action": action})

    def reset(self) -> None:
        self.conn.send_json({"type": "reset"})

    def _set_pressed(self, code: str, want: bool) -> None:
        # one KeyDown per physical press: emit only on change
        if self._pressed.get(code, False) != want:
            self._pressed[code] = want
            self.send_key(code, want)

    def release_all(self) -> None:
        for code, down in list(self._pressed.items()):
            if down:
                self._set_pressed(code, False)

    # -- scripted reach solver ---------------------------------------------------------

    def solve_reach(
        self,
        model: RobotModelSpec,
        timeout: float = 30.0,
        deadband: float = 0.02,
        hold_success_scenes: int = 3,
        mode: str = "axis",
        on_scene: Optional[Callable[[dict], None]] = None,
    ) -> bool:
        """Drive joints toward the scene target; True when success holds for
        hold_success_scenes consecutive scene updates.

        mode="axis" sends proportional gamepad values, mode="keys" bang-bang
        key presses (coarser; needs a generous success radius).
        """
        from ..agents.experts import ik_step

        deadline = time.monotonic() + timeout
        streak = 0
        while time.monotonic() < deadline:
            scene = self.next_scene(timeout=max(0.1, deadline - time.monotonic()))
            if on_scene is not None:
                on_scene(scene)
            if scene["success"]:
                streak += 1
                if streak >= hold_success_scenes:
                    self.release_all()
                    return True
            else:
                streak = 0
            q = joints_from_links(scene["links"])
            target = np.array(scene["target"])
            ee = np.array(scene["links"][-1])
            err = target - ee
            dq = ik_step(model, q, err)
            if mode == "axis":
                # proportional band: full deflection beyond 0.1 rad of error
                for j in range(model.n_joints):
                    value = max(-1.0, min(1.0, dq[j] / 0.1))
                    self.send_axis(f"a{j}", value)
                continue
            for j in range(model.n_joints):
                if dq[j] > deadband:
                    self._set_pressed(f"j{j}-", False)
                    self._set_pressed(f"j{j}+", True)
                elif dq[j] < -deadband:
                    self._set_pressed(f"j{j}+", False)
                    self._set_pressed(f"j{j}-", True)
                else:
                    self._set_pressed(f"j{j}+", False)
                    self._set_pressed(f"j{j}-", False)
        self.release_all()
        return False
