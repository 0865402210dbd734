from ..errors import EnvError
from .base import ArcadeEnv, EnvConfig, dump_transition, obj
from .breakout import BreakoutEnv
from .invaders import InvadersEnv
from .pong import PongEnv
from .splits import EpochSampler, split_fixed, split_fraction
from .text_tasks import TASK_KINDS, TextTask, generate_text_tasks

_GAMES = {
    "pong": PongEnv,
    "breakout": BreakoutEnv,
    "invaders": InvadersEnv,
}


def make_env(config: EnvConfig) -> ArcadeEnv:
    try:
        cls = _GAMES[config.game]
    except KeyError:
        raise EnvError(f"unknown game: {config.game!r}") from None
    return cls(config)


__all__ = [
    "ArcadeEnv",
    "BreakoutEnv",
    "EnvConfig",
    "EpochSampler",
    "InvadersEnv",
    "PongEnv",
    "TASK_KINDS",
    "TextTask",
    "dump_transition",
    "generate_text_tasks",
    "make_env",
    "obj",
    "split_fixed",
    "split_fraction",
]
