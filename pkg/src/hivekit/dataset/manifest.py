"""Dataset manifests: one row per (env, source) aggregated over containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..config import Backend, SensorKind
from ..trajectory import SOURCE_LABEL, TrajectorySource
from .container import DatasetContainer


@dataclass
class ManifestRow:
    domain: str  # env id
    n_trajectories: int
    n_tasks: int
    world: str  # "Sim" | "Real"
    visuals: str  # e.g. "1 cam"
    source: str  # e.g. "Expert Policy"


@dataclass
class DatasetManifest:
    rows: list[ManifestRow] = field(default_factory=list)

    @property
    def total_trajectories(self) -> int:
        return sum(r.n_trajectories for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "rows": [
                {
                    "domain": r.domain,
                    "n_trajectories": r.n_trajectories,
                    "n_tasks": r.n_tasks,
                    "world": r.world,
                    "visuals": r.visuals,
                    "source": r.source,
                }
                for r in self.rows
            ],
            "total_trajectories": self.total_trajectories,
        }

    def to_text(self) -> str:
        headers = ("Domain", "# Trajs", "# Tasks", "World", "Visuals", "Source")
        cells = [headers] + [
            (r.domain, str(r.n_trajectories), str(r.n_tasks), r.world, r.visuals, r.source)
            for r in self.rows
        ]
        widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
        lines = []
        for i, row in enumerate(cells):
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)


def build_manifest(paths: list[str | Path]) -> DatasetManifest:
    """Aggregate trajectory counts per (env_id, source) across containers."""
    buckets: dict[tuple[str, TrajectorySource], dict] = {}
    for path in paths:
        container = DatasetContainer(path)
        cfg = container.config
        n_cams = sum(1 for s in cfg.sensors if s.kind is SensorKind.GRID_CAMERA)
        world = "Real" if cfg.backend is Backend.HARDWARE else "Sim"
        for traj in container:
            key = (cfg.env_id, traj.source)
            bucket = buckets.setdefault(
                key,
                {"count": 0, "tasks": set(), "world": world, "cams": n_cams},
            )
            bucket["count"] += 1
            bucket["tasks"].add(cfg.task.kind.value)
    rows = [
        ManifestRow(
            domain=env_id,
            n_trajectories=bucket["count"],
            n_tasks=len(bucket["tasks"]),
            world=bucket["world"],
            visuals=f"{bucket['cams']} cam",
            source=SOURCE_LABEL[source],
        )
        for (env_id, source), bucket in sorted(
            buckets.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
        )
    ]
    return DatasetManifest(rows=rows)
