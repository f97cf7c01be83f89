from .engine import (
    ARM_HOME_ANGLE,
    EE_CONTACT_RADIUS,
    GRAVITY,
    KD,
    KP,
    LINK_HALF_WIDTH,
    OBJ_DAMPING,
    PALETTE_SIZE,
    PENDULUM_HOME_ANGLE,
    PENDULUM_JOINT_DAMPING,
    PENDULUM_MASS,
    attempt_grasp,
    camera_extent,
    canonical_joint_pos,
    end_effector,
    forward_kinematics,
    jacobian,
    pendulum_energy,
    randomize_scene,
    release_grasp,
    render_camera,
    sim_step,
    step_n,
)
from .kernels import COMPILED, active_kernel
from .state import ObjectView, SimState, make_state, states_equal

__all__ = [
    "SimState",
    "ObjectView",
    "make_state",
    "states_equal",
    "forward_kinematics",
    "end_effector",
    "jacobian",
    "sim_step",
    "step_n",
    "attempt_grasp",
    "release_grasp",
    "randomize_scene",
    "render_camera",
    "canonical_joint_pos",
    "camera_extent",
    "pendulum_energy",
    "active_kernel",
    "COMPILED",
    "KP",
    "KD",
    "OBJ_DAMPING",
    "GRAVITY",
    "PENDULUM_MASS",
    "PENDULUM_JOINT_DAMPING",
    "LINK_HALF_WIDTH",
    "EE_CONTACT_RADIUS",
    "PALETTE_SIZE",
    "ARM_HOME_ANGLE",
    "PENDULUM_HOME_ANGLE",
]
