"""Canonical scene composition per task kind.

The task implies the furniture: reach and pendulum tasks have an empty
workspace, push and pick-place get one free disc.  Randomization (when
configured) moves/reweighs these objects at reset; the canonical values
below are the fallback and the pre-randomization baseline.
"""

from __future__ import annotations

import numpy as np

from .config import TaskKind, TaskSpec

CANONICAL_DISC_POS = (0.7, 0.0)
CANONICAL_DISC_RADIUS = 0.06
CANONICAL_DISC_MASS = 0.1


def canonical_scene(task: TaskSpec):
    """-> (obj_pos (m,2), obj_radius, obj_mass, obj_color) float64/int32 arrays."""
    if task.kind in (TaskKind.PUSH, TaskKind.PICK_PLACE):
        return (
            np.array([CANONICAL_DISC_POS]),
            np.array([CANONICAL_DISC_RADIUS]),
            np.array([CANONICAL_DISC_MASS]),
            np.array([0], dtype=np.int32),
        )
    return (
        np.zeros((0, 2)),
        np.zeros(0),
        np.zeros(0),
        np.zeros(0, dtype=np.int32),
    )
