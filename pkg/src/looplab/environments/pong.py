"""Pong-like micro-environment with object-centric observations.

Integer kinematics: the ball reflects elastically off the top wall (y = 30)
and bottom wall (y = 190); the player's paddle plane is x = 140 and the
enemy's is x = 16. Points are +1 when the enemy misses, -1 when the player
misses; the game ends at 21 points for either side.

The enemy paddle is a proportional tracker with a capped per-frame speed,
so it is beatable by a player that anticipates the ball but rarely by one
that moves at random.
"""

from __future__ import annotations

from .base import ArcadeEnv, EnvConfig, obj

TOP = 30
BOTTOM = 190
PLAYER_X = 140
ENEMY_X = 16
PADDLE_W = 4
PADDLE_H = 16
BALL_W = 2
BALL_H = 4
PLAYER_SPEED = 4
WIN_SCORE = 21

ACTION_NOOP = 0
ACTION_UP = 2    # toward smaller y
ACTION_DOWN = 3  # toward larger y

_DY_CHOICES = (-3, -2, 2, 3)


class PongEnv(ArcadeEnv):
    legal_actions = frozenset({ACTION_NOOP, ACTION_UP, ACTION_DOWN})

    def __init__(self, config: EnvConfig):
        super().__init__(config)

    def _reset_state(self):
        mid = (TOP + BOTTOM - PADDLE_H) // 2
        self.player_y = mid
        self.enemy_y = mid
        self.player_score = 0
        self.enemy_score = 0
        self._player_dy = 0
        self._enemy_dy = 0
        self._serve(toward_player=True)

    def _serve(self, toward_player: bool):
        self.ball_x = (ENEMY_X + PLAYER_X) // 2
        self.ball_y = self.rng.randrange(TOP + 20, BOTTOM - 20)
        self.ball_dx = 3 if toward_player else -3
        self.ball_dy = self.rng.choice(_DY_CHOICES)

    def _move_player(self, action: int):
        before = self.player_y
        if action == ACTION_UP:
            self.player_y -= PLAYER_SPEED
        elif action == ACTION_DOWN:
            self.player_y += PLAYER_SPEED
        self.player_y = max(TOP, min(BOTTOM - PADDLE_H, self.player_y))
        self._player_dy = self.player_y - before

    def _move_enemy(self):
        cap = self.config.enemy_speed_cap
        target = self.ball_y + BALL_H // 2 - PADDLE_H // 2
        delta = target - self.enemy_y
        step = max(-cap, min(cap, delta))
        before = self.enemy_y
        self.enemy_y = max(TOP, min(BOTTOM - PADDLE_H, self.enemy_y + step))
        self._enemy_dy = self.enemy_y - before

    def _paddle_covers(self, paddle_y: int) -> bool:
        margin = 2
        return paddle_y - margin <= self.ball_y <= paddle_y + PADDLE_H + margin

    def _substep(self, action: int) -> float:
        self._move_player(action)
        self._move_enemy()

        self.ball_x += self.ball_dx
        self.ball_y += self.ball_dy
        if self.ball_y <= TOP:
            self.ball_y = 2 * TOP - self.ball_y
            self.ball_dy = -self.ball_dy
        elif self.ball_y >= BOTTOM:
            self.ball_y = 2 * BOTTOM - self.ball_y
            self.ball_dy = -self.ball_dy

        reward = 0.0
        if self.ball_dx > 0 and self.ball_x >= PLAYER_X:
            if self._paddle_covers(self.player_y):
                self.ball_x = 2 * PLAYER_X - self.ball_x
                self.ball_dx = -self.ball_dx
                self.ball_dy = self.rng.choice(_DY_CHOICES)
            else:
                self.enemy_score += 1
                reward = -1.0
                self._serve(toward_player=True)
        elif self.ball_dx < 0 and self.ball_x <= ENEMY_X:
            if self._paddle_covers(self.enemy_y):
                self.ball_x = 2 * ENEMY_X - self.ball_x
                self.ball_dx = -self.ball_dx
            else:
                self.player_score += 1
                reward = 1.0
                self._serve(toward_player=False)
        return reward

    def _terminal(self) -> bool:
        return self.player_score >= WIN_SCORE or self.enemy_score >= WIN_SCORE

    def _observe(self) -> dict:
        return {
            "Player": obj(PLAYER_X, self.player_y, PADDLE_W, PADDLE_H, 0, self._player_dy),
            "Ball": obj(self.ball_x, self.ball_y, BALL_W, BALL_H, self.ball_dx, self.ball_dy),
            "Enemy": obj(ENEMY_X, self.enemy_y, PADDLE_W, PADDLE_H, 0, self._enemy_dy),
            "lives": 0,
            "reward": self.last_reward,
        }
