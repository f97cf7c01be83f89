"""Environment configuration: domain types, the config file format, validation.

The config format is line-oriented UTF-8 text:

    # comment
    [env]
    id = reach-v0
    backend = sim

    [sensors.jointpos]
    kind = jointpos
    noise_sigma = 0.01

Sections: ``[env]``, ``[robot]``, ``[sensors.<name>]`` (one per sensor,
declaration order = file order), ``[task]``, ``[randomization]`` (optional).
Values: scalars, booleans (``true``/``false``), and vectors as
comma-separated reals.  ``#`` starts a comment anywhere on a line.

See docs/config_format.md for the full grammar and annotated fixtures.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

ENV_ID_RE = re.compile(r"^[A-Za-z0-9_]+-v[0-9]+$")


class ConfigError(Exception):
    """Base for config parse/validation failures."""


class ConfigSyntaxError(ConfigError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ConfigValidationError(ConfigError):
    """A well-formed document violating an invariant."""


class Backend(str, Enum):
    SIM = "sim"
    HARDWARE = "hardware"


class ControlMode(str, Enum):
    POSITION = "position"
    VELOCITY = "velocity"
    TORQUE = "torque"


class RobotKind(str, Enum):
    PLANAR_ARM = "planar_arm"
    PENDULUM = "pendulum"


class SensorKind(str, Enum):
    JOINT_POS = "jointpos"
    JOINT_VEL = "jointvel"
    EE_POS = "eepos"
    OBJECT_POSE = "objects"
    GRID_CAMERA = "camera"
    PROPRIO = "proprio"


class TaskKind(str, Enum):
    REACH = "reach"
    PUSH = "push"
    PICK_PLACE = "pickplace"
    PENDULUM_SWINGUP = "pendulum_swingup"


@dataclass(frozen=True)
class SensorSpec:
    name: str
    kind: SensorKind
    noise_sigma: float = 0.0
    delay_steps: int = 0
    camera_resolution: Optional[tuple[int, int]] = None  # (width, height)

    def validate(self) -> None:
        if self.noise_sigma < 0:
            raise ConfigValidationError(f"sensor {self.name}: noise_sigma must be >= 0")
        if self.delay_steps < 0:
            raise ConfigValidationError(f"sensor {self.name}: delay_steps must be >= 0")
        if self.kind is SensorKind.GRID_CAMERA:
            if self.camera_resolution is None:
                raise ConfigValidationError(
                    f"sensor {self.name}: camera requires resolution"
                )
            w, h = self.camera_resolution
            if w < 1 or h < 1:
                raise ConfigValidationError(
                    f"sensor {self.name}: resolution must be positive"
                )
        elif self.camera_resolution is not None:
            raise ConfigValidationError(
                f"sensor {self.name}: resolution only valid for camera sensors"
            )


@dataclass(frozen=True)
class RobotModelSpec:
    kind: RobotKind
    link_lengths: tuple[float, ...]
    joint_limits: tuple[tuple[float, float], ...]  # per-joint (lo, hi), radians
    torque_limits: tuple[float, ...]  # per-joint, N*m
    gripper_radius: float = 0.1  # grasp capture radius, meters

    @property
    def n_joints(self) -> int:
        return len(self.link_lengths)

    def validate(self) -> None:
        n = len(self.link_lengths)
        if n < 1:
            raise ConfigValidationError("robot needs at least one link")
        if any(length <= 0 for length in self.link_lengths):
            raise ConfigValidationError("link_lengths must be positive")
        if len(self.joint_limits) != n or len(self.torque_limits) != n:
            raise ConfigValidationError("joint_limits/torque_limits must match link count")
        for j, (lo, hi) in enumerate(self.joint_limits):
            if not lo < hi:
                raise ConfigValidationError(f"joint {j}: limit lo must be < hi")
        if any(t <= 0 for t in self.torque_limits):
            raise ConfigValidationError("torque_limits must be positive")
        if self.gripper_radius <= 0:
            raise ConfigValidationError("gripper_radius must be positive")
        if self.kind is RobotKind.PENDULUM and n != 1:
            raise ConfigValidationError("pendulum robots have exactly one joint")


@dataclass(frozen=True)
class TaskSpec:
    kind: TaskKind
    target: tuple[float, ...]  # (x, y) meters, or (angle,) for the pendulum
    success_radius: float  # meters, or radians for the pendulum
    goal_randomize: bool = False
    bin_center: Optional[tuple[float, float]] = None  # pick-place only
    bin_radius: Optional[float] = None

    def validate(self) -> None:
        if self.success_radius <= 0:
            raise ConfigValidationError("success_radius must be positive")
        if self.kind is TaskKind.PENDULUM_SWINGUP:
            if len(self.target) != 1:
                raise ConfigValidationError("pendulum target is a single angle")
        elif len(self.target) != 2:
            raise ConfigValidationError("target must be a 2-vector")
        if self.kind is TaskKind.PICK_PLACE:
            if self.bin_center is None or self.bin_radius is None:
                raise ConfigValidationError("pickplace requires bin_center and bin_radius")
            if self.bin_radius <= 0:
                raise ConfigValidationError("bin_radius must be positive")
        elif self.bin_center is not None or self.bin_radius is not None:
            raise ConfigValidationError("bin fields are pickplace-only")


@dataclass(frozen=True)
class RandomizationSpec:
    # (xmin, ymin, xmax, ymax) workspace box objects (and randomized goals)
    # are drawn from.
    object_position_box: tuple[float, float, float, float]
    object_mass_range: tuple[float, float] = (0.1, 0.1)
    scene_palette_randomize: bool = False

    def validate(self) -> None:
        x0, y0, x1, y1 = self.object_position_box
        if x0 > x1 or y0 > y1:
            raise ConfigValidationError("object_position_box must have min <= max")
        lo, hi = self.object_mass_range
        if lo > hi:
            raise ConfigValidationError("object_mass_range must have min <= max")
        if lo <= 0:
            raise ConfigValidationError("object masses must be positive")


@dataclass(frozen=True)
class EnvConfig:
    env_id: str
    robot: RobotModelSpec
    backend: Backend
    control_mode: ControlMode
    sensors: tuple[SensorSpec, ...]
    task: TaskSpec
    horizon: int
    seed: int = 0
    randomization: Optional[RandomizationSpec] = None
    frame_skip: int = 1
    dt: float = 0.01
    hardware_endpoint: Optional[str] = None  # "host:port"

    @property
    def sensor_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sensors)

    def validate(self) -> None:
        if not ENV_ID_RE.match(self.env_id):
            raise ConfigValidationError(
                f"env id {self.env_id!r} must match [A-Za-z0-9_]+-v[0-9]+"
            )
        if self.horizon < 1:
            raise ConfigValidationError("horizon must be >= 1")
        if self.frame_skip < 1:
            raise ConfigValidationError("frame_skip must be >= 1")
        if not self.dt > 0:
            raise ConfigValidationError("dt must be > 0")
        if self.seed < 0 or self.seed > (1 << 64) - 1:
            raise ConfigValidationError("seed must fit in an unsigned 64-bit integer")
        if self.backend is Backend.HARDWARE and not self.hardware_endpoint:
            raise ConfigValidationError("hardware_endpoint required for backend=hardware")
        if not self.sensors:
            raise ConfigValidationError("at least one sensor must be declared")
        names = [s.name for s in self.sensors]
        if len(set(names)) != len(names):
            raise ConfigValidationError("sensor names must be unique")
        self.robot.validate()
        for s in self.sensors:
            s.validate()
        self.task.validate()
        if self.randomization is not None:
            self.randomization.validate()
        if self.task.goal_randomize and self.randomization is None:
            raise ConfigValidationError(
                "goal_randomize requires a [randomization] section"
            )
        if self.task.kind is TaskKind.PENDULUM_SWINGUP:
            if self.robot.kind is not RobotKind.PENDULUM:
                raise ConfigValidationError("pendulum_swingup requires a pendulum robot")
        elif self.robot.kind is RobotKind.PENDULUM:
            raise ConfigValidationError("arm tasks require a planar_arm robot")


# ---------------------------------------------------------------------------
# parsing


def _parse_sections(text: str) -> list[tuple[str, int, dict[str, tuple[str, int]]]]:
    """Split a document into (section_name, line_no, {key: (value, line_no)})."""
    sections: list[tuple[str, int, dict[str, tuple[str, int]]]] = []
    current: Optional[dict[str, tuple[str, int]]] = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigSyntaxError(line_no, "unterminated section header")
            name = line[1:-1].strip()
            if not name:
                raise ConfigSyntaxError(line_no, "empty section name")
            current = {}
            sections.append((name, line_no, current))
            continue
        if "=" not in line:
            raise ConfigSyntaxError(line_no, f"expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigSyntaxError(line_no, "key/value pair outside any section")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigSyntaxError(line_no, "empty key")
        if key in current:
            raise ConfigSyntaxError(line_no, f"duplicate key {key!r}")
        current[key] = (value.strip(), line_no)
    return sections


class _Section:
    def __init__(self, name: str, entries: dict[str, tuple[str, int]]):
        self.name = name
        self._entries = entries
        self._seen: set[str] = set()

    def _raw(self, key: str) -> tuple[str, int]:
        if key not in self._entries:
            raise ConfigValidationError(f"[{self.name}] missing required key {key!r}")
        self._seen.add(key)
        return self._entries[key]

    def has(self, key: str) -> bool:
        return key in self._entries

    def string(self, key: str, default: Optional[str] = None) -> Optional[str]:
        if not self.has(key):
            return default
        return self._raw(key)[0]

    def number(self, key: str, default: Optional[float] = None) -> Optional[float]:
        if not self.has(key):
            return default
        value, line_no = self._raw(key)
        try:
            x = float(value)
        except ValueError:
            raise ConfigSyntaxError(line_no, f"{key}: not a number: {value!r}")
        if not math.isfinite(x):
            raise ConfigSyntaxError(line_no, f"{key}: value must be finite")
        return x

    def integer(self, key: str, default: Optional[int] = None) -> Optional[int]:
        if not self.has(key):
            return default
        value, line_no = self._raw(key)
        try:
            return int(value, 0)
        except ValueError:
            raise ConfigSyntaxError(line_no, f"{key}: not an integer: {value!r}")

    def boolean(self, key: str, default: Optional[bool] = None) -> Optional[bool]:
        if not self.has(key):
            return default
        value, line_no = self._raw(key)
        if value.lower() in ("true", "yes", "1"):
            return True
        if value.lower() in ("false", "no", "0"):
            return False
        raise ConfigSyntaxError(line_no, f"{key}: expected true/false, got {value!r}")

    def vector(self, key: str, default=None) -> Optional[tuple[float, ...]]:
        if not self.has(key):
            return default
        value, line_no = self._raw(key)
        parts = [p.strip() for p in value.split(",")]
        try:
            vec = tuple(float(p) for p in parts if p != "")
        except ValueError:
            raise ConfigSyntaxError(line_no, f"{key}: not a comma-separated vector")
        if not vec:
            raise ConfigSyntaxError(line_no, f"{key}: empty vector")
        if any(not math.isfinite(x) for x in vec):
            raise ConfigSyntaxError(line_no, f"{key}: vector entries must be finite")
        return vec

    def reject_unknown(self) -> None:
        unknown = set(self._entries) - self._seen
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigSyntaxError(
                self._entries[key][1], f"unknown key {key!r} in [{self.name}]"
            )


def _enum(section: _Section, key: str, enum_cls, default=None):
    raw = section.string(key, None)
    if raw is None:
        if default is not None:
            return default
        raise ConfigValidationError(f"[{section.name}] missing required key {key!r}")
    try:
        return enum_cls(raw.lower())
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise ConfigValidationError(
            f"[{section.name}] {key}: {raw!r} is not one of: {choices}"
        )


def parse_env_config(text: str) -> EnvConfig:
    """Parse and validate a config document; defaults filled, invariants enforced."""
    sections = _parse_sections(text)
    by_name: dict[str, _Section] = {}
    sensor_sections: list[_Section] = []
    for name, line_no, entries in sections:
        if name.startswith("sensors."):
            sensor_name = name[len("sensors.") :]
            if not sensor_name:
                raise ConfigSyntaxError(line_no, "sensor section needs a name")
            sensor_sections.append(_Section(name, entries))
        else:
            if name not in ("env", "robot", "task", "randomization"):
                raise ConfigSyntaxError(line_no, f"unknown section [{name}]")
            if name in by_name:
                raise ConfigSyntaxError(line_no, f"duplicate section [{name}]")
            by_name[name] = _Section(name, entries)

    for required in ("env", "robot", "task"):
        if required not in by_name:
            raise ConfigValidationError(f"missing required section [{required}]")

    env = by_name["env"]
    robot_sec = by_name["robot"]
    task_sec = by_name["task"]

    link_lengths = robot_sec.vector("link_lengths")
    lo = robot_sec.vector("joint_limits_lo")
    hi = robot_sec.vector("joint_limits_hi")
    if len(lo) != len(link_lengths) or len(hi) != len(link_lengths):
        raise ConfigValidationError("joint_limits_lo/hi must match link count")
    robot = RobotModelSpec(
        kind=_enum(robot_sec, "kind", RobotKind),
        link_lengths=link_lengths,
        joint_limits=tuple(zip(lo, hi)),
        torque_limits=robot_sec.vector("torque_limits"),
        gripper_radius=robot_sec.number("gripper_radius", 0.1),
    )
    robot_sec.reject_unknown()

    sensors = []
    for sec in sensor_sections:
        name = sec.name[len("sensors.") :]
        resolution = sec.vector("resolution", None)
        camera_resolution = None
        if resolution is not None:
            if len(resolution) != 2:
                raise ConfigValidationError(f"sensor {name}: resolution must be (w, h)")
            camera_resolution = (int(resolution[0]), int(resolution[1]))
        sensors.append(
            SensorSpec(
                name=name,
                kind=_enum(sec, "kind", SensorKind),
                noise_sigma=sec.number("noise_sigma", 0.0),
                delay_steps=sec.integer("delay_steps", 0),
                camera_resolution=camera_resolution,
            )
        )
        sec.reject_unknown()

    task_kind = _enum(task_sec, "kind", TaskKind)
    bin_center = task_sec.vector("bin_center", None)
    task = TaskSpec(
        kind=task_kind,
        target=task_sec.vector("target"),
        success_radius=task_sec.number("success_radius"),
        goal_randomize=task_sec.boolean("goal_randomize", False),
        bin_center=tuple(bin_center) if bin_center is not None else None,
        bin_radius=task_sec.number("bin_radius", None),
    )
    task_sec.reject_unknown()

    randomization = None
    if "randomization" in by_name:
        rand_sec = by_name["randomization"]
        box = rand_sec.vector("object_position_box")
        if len(box) != 4:
            raise ConfigValidationError(
                "object_position_box must be (xmin, ymin, xmax, ymax)"
            )
        mass = rand_sec.vector("object_mass_range", (0.1, 0.1))
        if len(mass) != 2:
            raise ConfigValidationError("object_mass_range must be (min, max)")
        randomization = RandomizationSpec(
            object_position_box=box,
            object_mass_range=mass,
            scene_palette_randomize=rand_sec.boolean("palette_randomize", False),
        )
        rand_sec.reject_unknown()

    cfg = EnvConfig(
        env_id=env.string("id", ""),
        robot=robot,
        backend=_enum(env, "backend", Backend, Backend.SIM),
        control_mode=_enum(env, "control_mode", ControlMode, ControlMode.POSITION),
        sensors=tuple(sensors),
        task=task,
        horizon=env.integer("horizon"),
        seed=env.integer("seed", 0),
        randomization=randomization,
        frame_skip=env.integer("frame_skip", 1),
        dt=env.number("dt", 0.01),
        hardware_endpoint=env.string("endpoint", None),
    )
    env.reject_unknown()
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# serialization


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def serialize_env_config(cfg: EnvConfig) -> str:
    """Canonical text form; parse(serialize(cfg)) == cfg."""
    out = ["[env]"]
    out.append(f"id = {cfg.env_id}")
    out.append(f"backend = {cfg.backend.value}")
    if cfg.hardware_endpoint is not None:
        out.append(f"endpoint = {cfg.hardware_endpoint}")
    out.append(f"control_mode = {cfg.control_mode.value}")
    out.append(f"horizon = {cfg.horizon}")
    out.append(f"seed = {cfg.seed}")
    out.append(f"frame_skip = {cfg.frame_skip}")
    out.append(f"dt = {_fmt(cfg.dt)}")

    out.append("")
    out.append("[robot]")
    out.append(f"kind = {cfg.robot.kind.value}")
    out.append(f"link_lengths = {_fmt(cfg.robot.link_lengths)}")
    out.append(f"joint_limits_lo = {_fmt(tuple(l for l, _ in cfg.robot.joint_limits))}")
    out.append(f"joint_limits_hi = {_fmt(tuple(h for _, h in cfg.robot.joint_limits))}")
    out.append(f"torque_limits = {_fmt(cfg.robot.torque_limits)}")
    out.append(f"gripper_radius = {_fmt(cfg.robot.gripper_radius)}")

    for s in cfg.sensors:
        out.append("")
        out.append(f"[sensors.{s.name}]")
        out.append(f"kind = {s.kind.value}")
        out.append(f"noise_sigma = {_fmt(s.noise_sigma)}")
        out.append(f"delay_steps = {s.delay_steps}")
        if s.camera_resolution is not None:
            w, h = s.camera_resolution
            out.append(f"resolution = {w}, {h}")

    out.append("")
    out.append("[task]")
    out.append(f"kind = {cfg.task.kind.value}")
    out.append(f"target = {_fmt(cfg.task.target)}")
    out.append(f"success_radius = {_fmt(cfg.task.success_radius)}")
    out.append(f"goal_randomize = {_fmt(cfg.task.goal_randomize)}")
    if cfg.task.bin_center is not None:
        out.append(f"bin_center = {_fmt(cfg.task.bin_center)}")
        out.append(f"bin_radius = {_fmt(cfg.task.bin_radius)}")

    if cfg.randomization is not None:
        out.append("")
        out.append("[randomization]")
        out.append(f"object_position_box = {_fmt(cfg.randomization.object_position_box)}")
        out.append(f"object_mass_range = {_fmt(cfg.randomization.object_mass_range)}")
        out.append(
            f"palette_randomize = {_fmt(cfg.randomization.scene_palette_randomize)}"
        )

    out.append("")
    return "\n".join(out)


def config_digest(cfg: EnvConfig) -> bytes:
    """32-byte digest of the canonical serialized config."""
    return hashlib.sha256(serialize_env_config(cfg).encode("utf-8")).digest()


def with_seed(cfg: EnvConfig, seed: int) -> EnvConfig:
    return replace(cfg, seed=seed)
