"""Analytic task controllers playing the expert-policy role.

All experts read the canonical observation keys: "jointpos" (and "jointvel"
for the pendulum), plus "objects" whose last two entries are the active
goal marker.  Arm experts emit position commands via damped-least-squares
IK steps; the pendulum expert is energy-shaping swing-up with a PD capture.
"""

from __future__ import annotations

import math

import numpy as np

from ..config import ControlMode, RobotModelSpec, TaskKind, TaskSpec
from ..rng import CounterRng
from ..scene import CANONICAL_DISC_RADIUS
from ..sim import engine
from ..robot import Gripper, RobotCommand
from .base import Policy, PolicyDescriptor
from ..envs.tasks import wrap_angle

IK_DAMPING = 0.1
IK_MAX_STEP = 0.3  # rad per control step; PD tracks at ~5x this per second


def ik_step(model: RobotModelSpec, q: np.ndarray, error: np.ndarray,
            max_step: float = IK_MAX_STEP) -> np.ndarray:
    """One damped-least-squares joint-space step toward an EE error."""
    J = engine.jacobian(model, q)
    JJt = J @ J.T + (IK_DAMPING**2) * np.eye(2)
    # analytic 2x2 solve
    a, b = JJt[0]
    c, d = JJt[1]
    det = a * d - b * c
    y = np.array(
        [(d * error[0] - b * error[1]) / det, (a * error[1] - c * error[0]) / det]
    )
    dq = J.T @ y
    norm = float(np.sqrt(np.sum(dq * dq)))
    if norm > max_step:
        dq *= max_step / norm
    return dq


def _clip_to_limits(model: RobotModelSpec, q: np.ndarray) -> np.ndarray:
    lo = np.array([l for l, _ in model.joint_limits])
    hi = np.array([h for _, h in model.joint_limits])
    return np.clip(q, lo, hi)


class _ArmExpert(Policy):
    def __init__(self, task: TaskSpec, model: RobotModelSpec, kind: str):
        self.task = task
        self.model = model
        self.descriptor = PolicyDescriptor(
            kind=kind, obs_keys=("jointpos", "objects")
        )

    def _parts(self, obs):
        q = np.asarray(obs["jointpos"], dtype=np.float64)
        objects = np.asarray(obs["objects"], dtype=np.float64)
        goal = objects[-2:]
        ee = engine.forward_kinematics(self.model, q)[-1]
        return q, objects, goal, ee

    def _move_toward(self, q, ee, point, max_step=IK_MAX_STEP) -> np.ndarray:
        dq = ik_step(self.model, q, np.asarray(point) - ee, max_step)
        return _clip_to_limits(self.model, q + dq)


class ReachExpert(_ArmExpert):
    def __init__(self, task: TaskSpec, model: RobotModelSpec):
        super().__init__(task, model, "expert-reach")

    def act(self, obs, rng: CounterRng) -> RobotCommand:
        q, _, goal, ee = self._parts(obs)
        err = goal - ee
        if float(np.sqrt(np.sum(err * err))) < 0.25 * self.task.success_radius:
            return RobotCommand(ControlMode.POSITION, q)
        return RobotCommand(ControlMode.POSITION, self._move_toward(q, ee, goal))


def _point_segment_dist(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(np.dot(ab, ab))
    t = 0.0 if denom == 0.0 else float(np.dot(p - a, ab)) / denom
    t = min(1.0, max(0.0, t))
    d = a + t * ab - p
    return float(np.sqrt(np.sum(d * d)))


class PushExpert(_ArmExpert):
    """Stroke pushing: plow while centered behind the disc, re-align otherwise.

    Point-contact pushing is laterally unstable, so the controller works in
    strokes: once lined up at the standoff point it plows slowly along the
    goal axis and bails out to re-approach when the lateral offset grows.
    Approach paths detour around the disc instead of shoving it.
    """

    CLEARANCE = 0.06
    APPROACH_STEP = 0.3  # rad; PD steady-state joint speed is 5x this per second
    PLOW_STEP = 0.08  # slow plow: more centering correction per meter pushed
    ENTER_TOL = 0.03  # distance to the standoff point that starts a stroke
    EXIT_PERP = 0.035  # lateral offset that ends a stroke

    def __init__(self, task: TaskSpec, model: RobotModelSpec):
        super().__init__(task, model, "expert-push")
        self._pushing = False

    def reset_episode(self) -> None:
        self._pushing = False

    def act(self, obs, rng: CounterRng) -> RobotCommand:
        q, objects, goal, ee = self._parts(obs)
        obj = objects[0:2]
        contact = CANONICAL_DISC_RADIUS + engine.EE_CONTACT_RADIUS
        standoff = contact + self.CLEARANCE

        to_goal = goal - obj
        d_goal = float(np.sqrt(np.sum(to_goal * to_goal)))
        if d_goal < 0.5 * self.task.success_radius:
            self._pushing = False
            return RobotCommand(ControlMode.POSITION, q)
        u = to_goal / d_goal

        rel = ee - obj
        along = float(np.dot(rel, u))
        perp_vec = rel - along * u
        perp = float(np.sqrt(np.sum(perp_vec * perp_vec)))
        behind = obj - u * standoff

        if self._pushing and (perp > self.EXIT_PERP or along > 0.0):
            self._pushing = False
        if not self._pushing:
            gap = behind - ee
            if float(np.sqrt(np.sum(gap * gap))) < self.ENTER_TOL:
                self._pushing = True

        if self._pushing:
            overdrive = contact + (0.1 if d_goal > 0.2 else 0.02)
            waypoint = obj + u * overdrive
            step = self.PLOW_STEP
        else:
            # re-approach the standoff point; when the straight path would
            # shove the disc, orbit around it with bounded angular steps
            d_ee = float(np.sqrt(np.sum(rel * rel)))
            clips = _point_segment_dist(obj, ee, behind) < contact + 0.03
            if clips or d_ee < contact + 0.02:
                phi_ee = math.atan2(float(rel[1]), float(rel[0]))
                phi_behind = math.atan2(float(-u[1]), float(-u[0]))
                dphi = wrap_angle(phi_behind - phi_ee)
                if abs(dphi) < 0.4 and d_ee > contact:
                    waypoint = behind
                else:
                    phi = phi_ee + max(-0.5, min(0.5, dphi))
                    orbit = standoff + 0.03
                    waypoint = obj + orbit * np.array([math.cos(phi), math.sin(phi)])
            else:
                waypoint = behind
            step = self.APPROACH_STEP
        return RobotCommand(
            ControlMode.POSITION, self._move_toward(q, ee, waypoint, step)
        )


class PickPlaceExpert(_ArmExpert):
    """approach -> grasp -> carry -> release -> retreat state machine.

    An un-grasped disc is held off the EE point at its own radius by contact
    projection, so the grasp trigger sits between the disc radius and the
    capture radius; it never fires beyond gripper_radius.
    """

    GRASP_DIST_FACTOR = 0.8  # fraction of the capture radius
    DROP_DIST_FACTOR = 0.35  # fraction of the bin radius

    def __init__(self, task: TaskSpec, model: RobotModelSpec):
        super().__init__(task, model, "expert-pickplace")
        self._stage = "approach"

    def reset_episode(self) -> None:
        self._stage = "approach"

    def act(self, obs, rng: CounterRng) -> RobotCommand:
        q, objects, goal, ee = self._parts(obs)
        obj = objects[0:2]
        bin_center = np.asarray(self.task.bin_center, dtype=np.float64)
        d_obj = float(np.sqrt(np.sum((obj - ee) ** 2)))

        if self._stage == "approach":
            if d_obj <= self.GRASP_DIST_FACTOR * self.model.gripper_radius:
                self._stage = "carry"
                return RobotCommand(ControlMode.POSITION, q, gripper=Gripper.GRASP)
            return RobotCommand(
                ControlMode.POSITION, self._move_toward(q, ee, obj, 0.25)
            )
        if self._stage == "carry":
            d_bin = float(np.sqrt(np.sum((obj - bin_center) ** 2)))
            if d_bin <= self.DROP_DIST_FACTOR * float(self.task.bin_radius):
                self._stage = "retreat"
                return RobotCommand(ControlMode.POSITION, q, gripper=Gripper.RELEASE)
            # steer so the held disc (EE + grasp offset) lands on the bin center
            waypoint = bin_center - (obj - ee)
            return RobotCommand(
                ControlMode.POSITION, self._move_toward(q, ee, waypoint, 0.2)
            )
        # retreat: back away so the freed disc is not shoved out of the bin
        away = ee - bin_center
        norm = float(np.sqrt(np.sum(away * away)))
        direction = away / norm if norm > 1e-9 else np.array([-1.0, 0.0])
        waypoint = bin_center + direction * (float(self.task.bin_radius) + 0.2)
        return RobotCommand(ControlMode.POSITION, self._move_toward(q, ee, waypoint, 0.15))


class PendulumExpert(Policy):
    """Energy-shaping swing-up, PD capture near upright."""

    PUMP_GAIN = 2.0
    CAPTURE_ANGLE = 0.35
    CAPTURE_VEL = 2.5
    KP = 40.0
    KD = 8.0

    def __init__(self, task: TaskSpec, model: RobotModelSpec):
        self.task = task
        self.model = model
        self.descriptor = PolicyDescriptor(kind="expert-pendulum", obs_keys=("jointpos", "jointvel"))

    def act(self, obs, rng: CounterRng) -> RobotCommand:
        theta = float(np.asarray(obs["jointpos"])[0])
        omega = float(np.asarray(obs["jointvel"])[0])
        target = self.task.target[0]
        tau_max = self.model.torque_limits[0]
        length = self.model.link_lengths[0]
        inertia = engine.PENDULUM_MASS * length * length

        err = wrap_angle(theta - target)
        if abs(err) < self.CAPTURE_ANGLE and abs(omega) < self.CAPTURE_VEL:
            u = -self.KP * err - self.KD * omega
        else:
            e_target = engine.PENDULUM_MASS * engine.GRAVITY * length * (
                1.0 + math.sin(target)
            )
            energy = 0.5 * inertia * omega * omega + engine.PENDULUM_MASS * engine.GRAVITY * length * (
                1.0 + math.sin(theta)
            )
            if abs(omega) < 1e-3:
                u = tau_max  # kick off the hanging equilibrium
            else:
                u = self.PUMP_GAIN * (e_target - energy) * omega
        u = max(-tau_max, min(tau_max, u))
        return RobotCommand(ControlMode.TORQUE, np.array([u]))


def scripted_expert(task: TaskSpec, model: RobotModelSpec) -> Policy:
    if task.kind is TaskKind.REACH:
        return ReachExpert(task, model)
    if task.kind is TaskKind.PUSH:
        return PushExpert(task, model)
    if task.kind is TaskKind.PICK_PLACE:
        return PickPlaceExpert(task, model)
    if task.kind is TaskKind.PENDULUM_SWINGUP:
        return PendulumExpert(task, model)
    raise ValueError(f"no scripted expert for task kind {task.kind!r}")
