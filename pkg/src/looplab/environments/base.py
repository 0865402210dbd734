"""Shared environment plumbing: config, observation records, action repeat."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional

from ..errors import EnvError


@dataclass(frozen=True)
class EnvConfig:
    """Run parameters for one arcade environment instance."""

    game: str
    seed: int = 0
    action_repeat: int = 4
    sticky_action_prob: float = 0.0
    max_steps: int = 4000
    enemy_speed_cap: int = 2  # pong only

    def __post_init__(self):
        if self.game not in ("pong", "breakout", "invaders"):
            raise EnvError(f"unknown game: {self.game!r}")
        if self.action_repeat < 1:
            raise EnvError("action_repeat must be positive")
        if not 0.0 <= self.sticky_action_prob <= 1.0:
            raise EnvError("sticky_action_prob must be in [0, 1]")


def obj(x: int, y: int, w: int, h: int, dx: int = 0, dy: int = 0) -> dict:
    """Object-centric observation record."""
    if w <= 0 or h <= 0:
        raise EnvError("object extents must be positive")
    return {"x": x, "y": y, "w": w, "h": h, "dx": dx, "dy": dy}


class ArcadeEnv:
    """Base class handling sticky actions, action repeat, and step caps.

    Subclasses implement ``_substep(action) -> reward`` on a single frame
    and ``_observe() -> dict``; this class applies the chosen action
    ``action_repeat`` times, accumulating reward.
    """

    legal_actions: frozenset[int] = frozenset()

    def __init__(self, config: EnvConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.steps = 0
        self.last_reward = 0.0
        self._prev_action: Optional[int] = None
        self.done = False

    def reset(self) -> dict:
        self.rng = random.Random(self.config.seed)
        self.steps = 0
        self.last_reward = 0.0
        self._prev_action = None
        self.done = False
        self._reset_state()
        return self._observe()

    def step(self, action: int) -> tuple[dict, float, bool]:
        if action not in self.legal_actions:
            raise EnvError(f"illegal action {action!r} for {self.config.game}")
        if self.done:
            raise EnvError("step() called on a finished episode; reset first")
        reward = 0.0
        for _ in range(self.config.action_repeat):
            applied = action
            if (self._prev_action is not None
                    and self.config.sticky_action_prob > 0.0
                    and self.rng.random() < self.config.sticky_action_prob):
                applied = self._prev_action
            reward += self._substep(applied)
            self._prev_action = applied
            if self._terminal():
                break
        self.steps += 1
        self.last_reward = reward
        if self.steps >= self.config.max_steps or self._terminal():
            self.done = True
        return self._observe(), reward, self.done

    # -- subclass hooks --

    def _reset_state(self) -> None:
        raise NotImplementedError

    def _substep(self, action: int) -> float:
        raise NotImplementedError

    def _observe(self) -> dict:
        raise NotImplementedError

    def _terminal(self) -> bool:
        raise NotImplementedError


def dump_transition(step: int, action: int, observation: dict, reward: float) -> str:
    """One line of the optional trajectory dump."""
    return json.dumps(
        {"step": step, "action": action, "observation": observation, "reward": reward},
        sort_keys=True, separators=(", ", ": "),
    )
