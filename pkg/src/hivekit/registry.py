"""Environment registration: env_id -> factory of independent instances."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path
from typing import Optional

from .config import EnvConfig, parse_env_config

CONFIG_DIR_ENV_VAR = "HIVEKIT_CONFIG_DIR"


class RegistryError(Exception):
    pass


class DuplicateEnvError(RegistryError):
    def __init__(self, env_id: str):
        super().__init__(f"env id {env_id!r} already registered")


class UnknownEnvError(RegistryError):
    def __init__(self, env_id: str):
        super().__init__(f"unknown env id {env_id!r}")


class EnvRegistry:
    """Immutable-after-setup mapping from env ids to configs."""

    def __init__(self) -> None:
        self._configs: dict[str, EnvConfig] = {}

    def register(self, cfg: EnvConfig) -> None:
        cfg.validate()
        if cfg.env_id in self._configs:
            raise DuplicateEnvError(cfg.env_id)
        self._configs[cfg.env_id] = cfg

    def config(self, env_id: str) -> EnvConfig:
        if env_id not in self._configs:
            raise UnknownEnvError(env_id)
        return self._configs[env_id]

    def make(self, env_id: str, **kwargs):
        from .envs.env import Env

        return Env(self.config(env_id), **kwargs)

    def ids(self) -> list[str]:
        return sorted(self._configs)

    def __contains__(self, env_id: str) -> bool:
        return env_id in self._configs

    def __len__(self) -> int:
        return len(self._configs)


def register_env(cfg: EnvConfig, registry: Optional[EnvRegistry] = None) -> None:
    (registry if registry is not None else default_registry()).register(cfg)


def make(env_id: str, registry: Optional[EnvRegistry] = None, **kwargs):
    return (registry if registry is not None else default_registry()).make(env_id, **kwargs)


def load_config_file(path: str | Path) -> EnvConfig:
    return parse_env_config(Path(path).read_text(encoding="utf-8"))


def load_config_dir(path: str | Path, registry: EnvRegistry) -> int:
    """Register every *.cfg in a directory (sorted); returns the count."""
    n = 0
    for p in sorted(Path(path).glob("*.cfg")):
        registry.register(load_config_file(p))
        n += 1
    return n


def register_builtin(registry: EnvRegistry) -> int:
    """Register the shipped fixture environments."""
    n = 0
    fixture_root = resources.files("hivekit.envs").joinpath("fixtures")
    for entry in sorted(fixture_root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".cfg"):
            registry.register(parse_env_config(entry.read_text(encoding="utf-8")))
            n += 1
    return n


_default: Optional[EnvRegistry] = None


def default_registry() -> EnvRegistry:
    """Global registry: shipped fixtures plus HIVEKIT_CONFIG_DIR extras."""
    global _default
    if _default is None:
        reg = EnvRegistry()
        register_builtin(reg)
        extra = os.environ.get(CONFIG_DIR_ENV_VAR)
        if extra:
            for part in extra.split(os.pathsep):
                if part:
                    load_config_dir(part, reg)
        _default = reg
    return _default


def visual_variant_id(env_id: str) -> str:
    """reach-v0 -> reach_v2d-v0 (identity when already a _v2d id)."""
    base, _, version = env_id.rpartition("-")
    if base.endswith("_v2d"):
        return env_id
    return f"{base}_v2d-{version}"
