from .env import DEFAULT_SUCCESS_LATCH, Env, EpisodeFinishedError, StepResult
from .tasks import compute_reward, compute_success, draw_goal, goal_marker, wrap_angle

__all__ = [
    "Env",
    "StepResult",
    "EpisodeFinishedError",
    "DEFAULT_SUCCESS_LATCH",
    "compute_reward",
    "compute_success",
    "draw_goal",
    "goal_marker",
    "wrap_angle",
]
