"""Grid camera: brute-force per-pixel oracle for the occupancy rasterizer."""

import math

import numpy as np

from hivekit.config import RobotKind, RobotModelSpec
from hivekit.sim import engine
from hivekit.sim.state import make_state

ARM = RobotModelSpec(
    kind=RobotKind.PLANAR_ARM,
    link_lengths=(0.8, 0.6),
    joint_limits=((-3.1, 3.1),) * 2,
    torque_limits=(50.0,) * 2,
    gripper_radius=0.15,
)


def oracle_raster(model, state, width, height):
    """Independent per-pixel point-in-circle / point-near-segment test."""
    extent = 1.1 * sum(model.link_lengths)
    frames = [(0.0, 0.0)]
    acc = 0.0
    for k, length in enumerate(model.link_lengths):
        acc += float(state.joint_pos[k])
        px, py = frames[-1]
        frames.append((px + length * math.cos(acc), py + length * math.sin(acc)))
    img = np.zeros((height, width))
    for i in range(height):
        for j in range(width):
            x = -extent + (j + 0.5) * (2 * extent / width)
            y = extent - (i + 0.5) * (2 * extent / height)
            covered = 0.0
            for k in range(len(model.link_lengths)):
                ax, ay = frames[k]
                bx, by = frames[k + 1]
                # segment distance by projection
                vx, vy = bx - ax, by - ay
                t = ((x - ax) * vx + (y - ay) * vy) / (vx * vx + vy * vy)
                t = min(1.0, max(0.0, t))
                d = math.hypot(ax + t * vx - x, ay + t * vy - y)
                if d <= engine.LINK_HALF_WIDTH:
                    covered = 1.0
                    break
            if covered == 0.0:
                for o in range(state.n_objects):
                    d = math.hypot(x - state.obj_pos[o, 0], y - state.obj_pos[o, 1])
                    if d <= state.obj_radius[o]:
                        covered = (int(state.obj_color[o]) + 1) / engine.PALETTE_SIZE
                        break
            img[i, j] = covered
    return img.reshape(-1)


def test_single_disc_at_center_oracle():
    state = make_state(
        [0.5, 0.5], obj_pos=[[0.0, 0.0]], obj_radius=[0.3], obj_color=[4]
    )
    img = engine.render_camera(ARM, state, 84, 84)
    oracle = oracle_raster(ARM, state, 84, 84)
    assert np.array_equal(img, oracle)
    # the disc region actually shows up with its palette shade
    assert np.count_nonzero(img == (4 + 1) / engine.PALETTE_SIZE) > 50


def test_multi_disc_and_links_oracle():
    state = make_state(
        [-0.4, 1.2],
        obj_pos=[[0.5, 0.5], [-0.6, -0.2], [0.52, 0.48]],
        obj_radius=[0.2, 0.15, 0.2],
        obj_color=[0, 2, 7],
    )
    img = engine.render_camera(ARM, state, 64, 48)
    oracle = oracle_raster(ARM, state, 64, 48)
    assert np.array_equal(img, oracle)


def test_links_take_precedence_and_values_bounded():
    state = make_state([0.5, 0.5], obj_pos=[[0.0, 0.0]], obj_radius=[2.5], obj_color=[0])
    img = engine.render_camera(ARM, state, 32, 32)
    # disc covers everything; links overdraw at 1.0
    assert set(np.unique(img)) <= {1.0 / engine.PALETTE_SIZE, 1.0}
    assert np.any(img == 1.0)
    assert np.all((img >= 0.0) & (img <= 1.0))


def test_empty_scene_draws_arm_only():
    state = make_state([0.5, 0.5])
    img = engine.render_camera(ARM, state, 84, 84)
    assert set(np.unique(img)) <= {0.0, 1.0}
    assert np.count_nonzero(img) > 0
