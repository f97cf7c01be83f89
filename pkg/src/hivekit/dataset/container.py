"""RoboSet-lite: a self-contained hierarchical trajectory container.

Byte layout (integers and floats little-endian; see docs/container_format.md):

    magic "RSL1" | u16 version | u32 config_len | config bytes (canonical
    config text, UTF-8) | 32-byte SHA-256 of the config bytes | u32 n_traj |
    index: n_traj x { u64 offset, u64 length } | trajectory groups

Each group:

    u32 T | u16 action_dim | u16 n_sensors
    | per sensor: u8 name_len, name, u32 vec_dim
    | initial_state block | final_state block
    | per sensor: T x dim f64, column-major
    | actions: T x action_dim f64, column-major
    | rewards: T x f64 | successes: T x u8
    | u8 source code | u32 metadata_len | metadata as "key=value" lines

State block: u8 present | f64 time | u16 n_joints | pos | vel |
u16 n_objects | per object f64 px,py,vx,vy,radius,mass + u8 color |
i32 grasped | 4 x u64 rng state.  The env id and episode seed ride in
reserved metadata keys (__env_id, __seed).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from ..config import EnvConfig, config_digest, parse_env_config, serialize_env_config
from ..sim.state import SimState
from ..trajectory import Trajectory, TrajectorySource

MAGIC = b"RSL1"
FORMAT_VERSION = 1

META_ENV_ID = "__env_id"
META_SEED = "__seed"
DIGEST_KEY = "config_digest"  # hex digest stamped into trajectory metadata


class DatasetError(Exception):
    pass


class NotRobosetFileError(DatasetError):
    def __init__(self) -> None:
        super().__init__("not a RoboSet-lite file")


class DigestMismatchError(DatasetError):
    pass


def _pack_state(state: Optional[SimState]) -> bytes:
    if state is None:
        return struct.pack("<B", 0)
    out = [struct.pack("<B", 1), struct.pack("<d", state.time)]
    n = state.n_joints
    out.append(struct.pack("<H", n))
    out.append(np.ascontiguousarray(state.joint_pos, dtype="<f8").tobytes())
    out.append(np.ascontiguousarray(state.joint_vel, dtype="<f8").tobytes())
    m = state.n_objects
    out.append(struct.pack("<H", m))
    for i in range(m):
        out.append(
            struct.pack(
                "<6dB",
                float(state.obj_pos[i, 0]),
                float(state.obj_pos[i, 1]),
                float(state.obj_vel[i, 0]),
                float(state.obj_vel[i, 1]),
                float(state.obj_radius[i]),
                float(state.obj_mass[i]),
                int(state.obj_color[i]) & 0xFF,
            )
        )
    out.append(struct.pack("<i", state.grasped))
    out.append(struct.pack("<4Q", *state.rng_state))
    return b"".join(out)


def _unpack_state(buf: bytes, off: int) -> tuple[Optional[SimState], int]:
    (present,) = struct.unpack_from("<B", buf, off)
    off += 1
    if not present:
        return None, off
    (time_,) = struct.unpack_from("<d", buf, off)
    off += 8
    (n,) = struct.unpack_from("<H", buf, off)
    off += 2
    pos = np.frombuffer(buf, dtype="<f8", count=n, offset=off).copy()
    off += 8 * n
    vel = np.frombuffer(buf, dtype="<f8", count=n, offset=off).copy()
    off += 8 * n
    (m,) = struct.unpack_from("<H", buf, off)
    off += 2
    opos = np.zeros((m, 2))
    ovel = np.zeros((m, 2))
    orad = np.zeros(m)
    omass = np.zeros(m)
    ocolor = np.zeros(m, dtype=np.int32)
    for i in range(m):
        px, py, vx, vy, r, mass, color = struct.unpack_from("<6dB", buf, off)
        off += 49
        opos[i] = (px, py)
        ovel[i] = (vx, vy)
        orad[i] = r
        omass[i] = mass
        ocolor[i] = color
    (grasped,) = struct.unpack_from("<i", buf, off)
    off += 4
    rng_state = struct.unpack_from("<4Q", buf, off)
    off += 32
    state = SimState(
        time=time_,
        joint_pos=pos,
        joint_vel=vel,
        obj_pos=opos,
        obj_vel=ovel,
        obj_radius=orad,
        obj_mass=omass,
        obj_color=ocolor,
        grasped=grasped,
        rng_state=rng_state,
    )
    return state, off


def _encode_metadata(traj: Trajectory) -> bytes:
    items = [(META_ENV_ID, traj.env_id), (META_SEED, str(traj.seed))]
    for k, v in traj.metadata.items():
        if "=" in k or "\n" in k or "\n" in v:
            raise DatasetError(f"metadata key/value may not contain '=' or newlines: {k!r}")
        items.append((k, v))
    return "".join(f"{k}={v}\n" for k, v in items).encode("utf-8")


def _decode_metadata(raw: bytes) -> tuple[str, int, dict[str, str]]:
    env_id = ""
    seed = 0
    meta: dict[str, str] = {}
    for line in raw.decode("utf-8").splitlines():
        if not line:
            continue
        key, _, value = line.partition("=")
        if key == META_ENV_ID:
            env_id = value
        elif key == META_SEED:
            seed = int(value)
        else:
            meta[key] = value
    return env_id, seed, meta


def encode_group(traj: Trajectory) -> bytes:
    traj.validate()
    T = traj.length
    names = list(traj.observations.keys())
    out = [struct.pack("<IHH", T, traj.action_dim, len(names))]
    for name in names:
        raw = name.encode("utf-8")
        if len(raw) > 255:
            raise DatasetError("sensor name too long")
        dim = int(traj.observations[name].shape[1])
        out.append(struct.pack("<B", len(raw)) + raw + struct.pack("<I", dim))
    out.append(_pack_state(traj.initial_state))
    out.append(_pack_state(traj.final_state))
    for name in names:
        out.append(np.asfortranarray(traj.observations[name], dtype="<f8").tobytes(order="F"))
    out.append(np.asfortranarray(traj.actions, dtype="<f8").tobytes(order="F"))
    out.append(np.ascontiguousarray(traj.rewards, dtype="<f8").tobytes())
    out.append(np.ascontiguousarray(traj.successes, dtype=np.uint8).tobytes())
    out.append(struct.pack("<B", traj.source.value))
    meta = _encode_metadata(traj)
    out.append(struct.pack("<I", len(meta)))
    out.append(meta)
    return b"".join(out)


def decode_group(buf: bytes) -> Trajectory:
    off = 0
    T, action_dim, n_sensors = struct.unpack_from("<IHH", buf, off)
    off += 8
    layout = []
    for _ in range(n_sensors):
        (name_len,) = struct.unpack_from("<B", buf, off)
        off += 1
        name = buf[off : off + name_len].decode("utf-8")
        off += name_len
        (dim,) = struct.unpack_from("<I", buf, off)
        off += 4
        layout.append((name, dim))
    initial_state, off = _unpack_state(buf, off)
    final_state, off = _unpack_state(buf, off)
    observations = {}
    for name, dim in layout:
        arr = np.frombuffer(buf, dtype="<f8", count=T * dim, offset=off)
        observations[name] = arr.reshape((T, dim), order="F").copy()
        off += 8 * T * dim
    actions = (
        np.frombuffer(buf, dtype="<f8", count=T * action_dim, offset=off)
        .reshape((T, action_dim), order="F")
        .copy()
    )
    off += 8 * T * action_dim
    rewards = np.frombuffer(buf, dtype="<f8", count=T, offset=off).copy()
    off += 8 * T
    successes = np.frombuffer(buf, dtype=np.uint8, count=T, offset=off).astype(bool)
    off += T
    (source_code,) = struct.unpack_from("<B", buf, off)
    off += 1
    (meta_len,) = struct.unpack_from("<I", buf, off)
    off += 4
    env_id, seed, metadata = _decode_metadata(buf[off : off + meta_len])
    off += meta_len
    if off != len(buf):
        raise DatasetError("trajectory group has trailing bytes")
    return Trajectory(
        env_id=env_id,
        seed=seed,
        observations=observations,
        actions=actions,
        rewards=rewards,
        successes=successes,
        initial_state=initial_state,
        final_state=final_state,
        source=TrajectorySource(source_code),
        metadata=metadata,
    )


def write_trajectories(path: str | Path, cfg: EnvConfig, trajectories: list[Trajectory]) -> "DatasetContainer":
    """Write a container; trajectories must match cfg (digest-checked)."""
    cfg_text = serialize_env_config(cfg).encode("utf-8")
    digest = config_digest(cfg)
    hex_digest = digest.hex()
    groups = []
    for traj in trajectories:
        stamped = traj.metadata.get(DIGEST_KEY)
        if stamped is None:
            traj.metadata[DIGEST_KEY] = hex_digest
        elif stamped != hex_digest:
            raise DatasetError(
                f"trajectory from a different env: digest {stamped[:12]}... != {hex_digest[:12]}..."
            )
        groups.append(encode_group(traj))

    header_len = len(MAGIC) + 2 + 4 + len(cfg_text) + 32 + 4 + 16 * len(groups)
    offsets = []
    cursor = header_len
    for g in groups:
        offsets.append(cursor)
        cursor += len(g)

    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", FORMAT_VERSION))
        f.write(struct.pack("<I", len(cfg_text)))
        f.write(cfg_text)
        f.write(digest)
        f.write(struct.pack("<I", len(groups)))
        for off, g in zip(offsets, groups):
            f.write(struct.pack("<QQ", off, len(g)))
        for g in groups:
            f.write(g)
    return DatasetContainer(path)


@dataclass
class _IndexEntry:
    offset: int
    length: int


class DatasetContainer:
    """Read-side handle with random access through the index."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        with open(self.path, "rb") as f:
            if f.read(4) != MAGIC:
                raise NotRobosetFileError()
            (self.version,) = struct.unpack("<H", f.read(2))
            if self.version != FORMAT_VERSION:
                raise DatasetError(f"unsupported container version {self.version}")
            (cfg_len,) = struct.unpack("<I", f.read(4))
            self.config_text = f.read(cfg_len).decode("utf-8")
            self.digest = f.read(32)
            (n,) = struct.unpack("<I", f.read(4))
            self.index = []
            prev_end = None
            for _ in range(n):
                off, length = struct.unpack("<QQ", f.read(16))
                if prev_end is not None and off < prev_end:
                    raise DatasetError("index offsets are not strictly increasing")
                prev_end = off + length
                self.index.append(_IndexEntry(off, length))
        self.config = parse_env_config(self.config_text)
        if config_digest(self.config) != self.digest:
            raise DigestMismatchError("embedded config does not match its digest")

    @property
    def env_id(self) -> str:
        return self.config.env_id

    @property
    def n_trajectories(self) -> int:
        return len(self.index)

    def read(self, k: int) -> Trajectory:
        entry = self.index[k]
        with open(self.path, "rb") as f:
            f.seek(entry.offset)
            buf = f.read(entry.length)
        if len(buf) != entry.length:
            raise DatasetError("truncated trajectory group")
        return decode_group(buf)

    def __iter__(self) -> Iterator[Trajectory]:
        for k in range(self.n_trajectories):
            yield self.read(k)

    def read_all(self) -> list[Trajectory]:
        return list(self)
