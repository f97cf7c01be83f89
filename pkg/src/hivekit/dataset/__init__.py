from .container import (
    DIGEST_KEY,
    DatasetContainer,
    DatasetError,
    DigestMismatchError,
    NotRobosetFileError,
    decode_group,
    encode_group,
    write_trajectories,
)
from .manifest import DatasetManifest, ManifestRow, build_manifest
from .replay import BatchReplayReport, ReplayReport, replay_container, replay_trajectory

__all__ = [
    "DatasetContainer",
    "write_trajectories",
    "encode_group",
    "decode_group",
    "DatasetError",
    "NotRobosetFileError",
    "DigestMismatchError",
    "DIGEST_KEY",
    "replay_trajectory",
    "replay_container",
    "ReplayReport",
    "BatchReplayReport",
    "build_manifest",
    "DatasetManifest",
    "ManifestRow",
]
