"""Breakout-like micro-environment.

Side walls sit at x = 9 and x = 152, the paddle plane at y = 189, and six
brick rows (top to bottom R, O, Y, G, A, B worth 7, 7, 4, 4, 1, 1 points)
span y = 57..93. The ball launches automatically after reset; losing the
ball costs one of five lives and requires a new launch via the fire action.
"""

from __future__ import annotations

from .base import ArcadeEnv, obj

LEFT = 9
RIGHT = 152
TOP = 30
PADDLE_Y = 189
PADDLE_W = 16
PADDLE_H = 4
BALL_W = 2
BALL_H = 4
PADDLE_SPEED = 4
BRICK_W = 8
BRICK_H = 6
BRICKS_PER_ROW = 18
ROW_Y0 = 57
LIVES = 5

ROW_KEYS = ("RB", "OB", "YB", "GB", "AB", "BB")
ROW_VALUES = {"RB": 7, "OB": 7, "YB": 4, "GB": 4, "AB": 1, "BB": 1}

ACTION_NOOP = 0
ACTION_FIRE = 1
ACTION_RIGHT = 2
ACTION_LEFT = 3

_DX_CHOICES = (-3, -2, 2, 3)


class BreakoutEnv(ArcadeEnv):
    legal_actions = frozenset({ACTION_NOOP, ACTION_FIRE, ACTION_RIGHT, ACTION_LEFT})

    def _reset_state(self):
        self.paddle_x = (LEFT + RIGHT - PADDLE_W) // 2
        self._paddle_dx = 0
        self.lives = LIVES
        self.score = 0
        # bricks[row_key] = set of column indices still standing
        self.bricks = {key: set(range(BRICKS_PER_ROW)) for key in ROW_KEYS}
        self.ball_live = False
        self.ball_x = self.ball_y = 0
        self.ball_dx = self.ball_dy = 0
        self._launch()  # fire applied automatically after reset

    def _launch(self):
        self.ball_live = True
        self.ball_x = self.paddle_x + PADDLE_W // 2
        self.ball_y = PADDLE_Y - 30
        self.ball_dx = self.rng.choice(_DX_CHOICES)
        self.ball_dy = -3

    def _row_key_at(self, y: int):
        idx = (y - ROW_Y0) // BRICK_H
        if 0 <= idx < len(ROW_KEYS) and y >= ROW_Y0:
            return ROW_KEYS[idx]
        return None

    def _substep(self, action: int) -> float:
        before = self.paddle_x
        if action == ACTION_RIGHT:
            self.paddle_x += PADDLE_SPEED
        elif action == ACTION_LEFT:
            self.paddle_x -= PADDLE_SPEED
        self.paddle_x = max(LEFT, min(RIGHT - PADDLE_W, self.paddle_x))
        self._paddle_dx = self.paddle_x - before

        if not self.ball_live:
            if action == ACTION_FIRE and self.lives > 0:
                self._launch()
            return 0.0

        self.ball_x += self.ball_dx
        self.ball_y += self.ball_dy
        if self.ball_x <= LEFT:
            self.ball_x = 2 * LEFT - self.ball_x
            self.ball_dx = -self.ball_dx
        elif self.ball_x >= RIGHT:
            self.ball_x = 2 * RIGHT - self.ball_x
            self.ball_dx = -self.ball_dx
        if self.ball_y <= TOP:
            self.ball_y = 2 * TOP - self.ball_y
            self.ball_dy = -self.ball_dy

        reward = 0.0
        row_key = self._row_key_at(self.ball_y)
        if row_key is not None:
            col = max(0, min(BRICKS_PER_ROW - 1, (self.ball_x - 8) // BRICK_W))
            if col in self.bricks[row_key]:
                self.bricks[row_key].discard(col)
                reward = float(ROW_VALUES[row_key])
                self.score += ROW_VALUES[row_key]
                self.ball_dy = -self.ball_dy

        if self.ball_dy > 0 and self.ball_y >= PADDLE_Y:
            if self.paddle_x - 2 <= self.ball_x <= self.paddle_x + PADDLE_W + 2:
                self.ball_y = 2 * PADDLE_Y - self.ball_y
                self.ball_dy = -self.ball_dy
                self.ball_dx = self.rng.choice(_DX_CHOICES)
            else:
                self.lives -= 1
                self.ball_live = False
        return reward

    def _bricks_left(self) -> int:
        return sum(len(cols) for cols in self.bricks.values())

    def _terminal(self) -> bool:
        return self.lives <= 0 or self._bricks_left() == 0

    def _observe(self) -> dict:
        observation = {
            "Player": obj(self.paddle_x, PADDLE_Y, PADDLE_W, PADDLE_H, self._paddle_dx, 0),
        }
        if self.ball_live:
            observation["Ball"] = obj(self.ball_x, self.ball_y, BALL_W, BALL_H,
                                      self.ball_dx, self.ball_dy)
        for i, key in enumerate(ROW_KEYS):
            cols = self.bricks[key]
            if cols:
                observation[key] = [
                    obj(8 + c * BRICK_W, ROW_Y0 + i * BRICK_H, BRICK_W, BRICK_H)
                    for c in sorted(cols)
                ]
        observation["lives"] = self.lives
        observation["reward"] = self.last_reward
        return observation
