"""Space-Invaders-like micro-environment.

A 6x6 alien grid marches side to side and descends at the edges; aliens in
higher rows are worth more. The player cannon fires upward bullets (dy < 0)
with at most one live player bullet on the field at a time; aliens drop
downward bullets (dy > 0). Three static shields absorb bullets from either
side until their hit points run out.
"""

from __future__ import annotations

from .base import ArcadeEnv, obj

SCREEN_LEFT = 4
SCREEN_RIGHT = 156
PLAYER_Y = 185
PLAYER_W = 8
PLAYER_H = 8
PLAYER_SPEED = 2
ALIEN_W = 8
ALIEN_H = 8
GRID_COLS = 6
GRID_ROWS = 6
GRID_X0 = 20
GRID_Y0 = 40
GRID_DX = 16
GRID_DY = 12
DESCEND = 4
PLAYER_BULLET_SPEED = 4
ALIEN_BULLET_SPEED = 3
ALIEN_FIRE_PROB = 0.02
MAX_ALIEN_BULLETS = 3
SHIELD_Y = 157
SHIELD_W = 16
SHIELD_H = 8
SHIELD_HP = 6
LIVES = 3

# row 0 is the top row; higher rows are worth more
ROW_VALUES = (30, 25, 20, 15, 10, 5)

ACTION_NOOP = 0
ACTION_FIRE = 1
ACTION_RIGHT = 2
ACTION_LEFT = 3
ACTION_RIGHT_FIRE = 4
ACTION_LEFT_FIRE = 5


class InvadersEnv(ArcadeEnv):
    legal_actions = frozenset(range(6))

    def _reset_state(self):
        self.player_x = (SCREEN_LEFT + SCREEN_RIGHT - PLAYER_W) // 2
        self._player_dx = 0
        self.lives = LIVES
        # aliens: dict (row, col) -> True while alive
        self.aliens = {(r, c): True for r in range(GRID_ROWS) for c in range(GRID_COLS)}
        self.grid_x = GRID_X0
        self.grid_y = GRID_Y0
        self.grid_dir = 1
        self.player_bullet = None  # (x, y)
        self.alien_bullets: list[list[int]] = []
        self.shields = [
            {"x": x, "hp": SHIELD_HP}
            for x in (28, 72, 116)
        ]
        self._reached_bottom = False

    # -- geometry helpers --

    def _alien_pos(self, row: int, col: int) -> tuple[int, int]:
        return (self.grid_x + col * GRID_DX, self.grid_y + row * GRID_DY)

    def _alive_aliens(self):
        return [(r, c) for (r, c), alive in self.aliens.items() if alive]

    def _move_grid(self):
        alive = self._alive_aliens()
        if not alive:
            return
        xs = [self._alien_pos(r, c)[0] for r, c in alive]
        next_x = self.grid_x + self.grid_dir
        if (max(xs) + ALIEN_W + self.grid_dir > SCREEN_RIGHT) or (min(xs) + self.grid_dir < SCREEN_LEFT):
            self.grid_dir = -self.grid_dir
            self.grid_y += DESCEND
        else:
            self.grid_x = next_x
        lowest = max(self._alien_pos(r, c)[1] for r, c in alive) + ALIEN_H
        if lowest >= PLAYER_Y:
            self._reached_bottom = True

    def _shield_absorbs(self, x: int, y: int) -> bool:
        if not SHIELD_Y <= y <= SHIELD_Y + SHIELD_H:
            return False
        for shield in self.shields:
            if shield["hp"] > 0 and shield["x"] <= x <= shield["x"] + SHIELD_W:
                shield["hp"] -= 1
                return True
        return False

    def _substep(self, action: int) -> float:
        before = self.player_x
        if action in (ACTION_RIGHT, ACTION_RIGHT_FIRE):
            self.player_x += PLAYER_SPEED
        elif action in (ACTION_LEFT, ACTION_LEFT_FIRE):
            self.player_x -= PLAYER_SPEED
        self.player_x = max(SCREEN_LEFT, min(SCREEN_RIGHT - PLAYER_W, self.player_x))
        self._player_dx = self.player_x - before

        fire = action in (ACTION_FIRE, ACTION_RIGHT_FIRE, ACTION_LEFT_FIRE)
        if fire and self.player_bullet is None:
            self.player_bullet = [self.player_x + PLAYER_W // 2, PLAYER_Y - 1]

        self._move_grid()

        reward = 0.0
        if self.player_bullet is not None:
            self.player_bullet[1] -= PLAYER_BULLET_SPEED
            bx, by = self.player_bullet
            if by < 0:
                self.player_bullet = None
            elif self._shield_absorbs(bx, by):
                self.player_bullet = None
            else:
                for (r, c) in self._alive_aliens():
                    ax, ay = self._alien_pos(r, c)
                    if ax <= bx <= ax + ALIEN_W and ay <= by <= ay + ALIEN_H:
                        self.aliens[(r, c)] = False
                        reward += float(ROW_VALUES[r])
                        self.player_bullet = None
                        break

        if (len(self.alien_bullets) < MAX_ALIEN_BULLETS
                and self.rng.random() < ALIEN_FIRE_PROB):
            alive = self._alive_aliens()
            if alive:
                r, c = alive[self.rng.randrange(len(alive))]
                ax, ay = self._alien_pos(r, c)
                self.alien_bullets.append([ax + ALIEN_W // 2, ay + ALIEN_H])

        surviving = []
        for bullet in self.alien_bullets:
            bullet[1] += ALIEN_BULLET_SPEED
            bx, by = bullet
            if by > PLAYER_Y + PLAYER_H:
                continue
            if self._shield_absorbs(bx, by):
                continue
            if (by >= PLAYER_Y and self.player_x <= bx <= self.player_x + PLAYER_W):
                self.lives -= 1
                continue
            surviving.append(bullet)
        self.alien_bullets = surviving
        return reward

    def _terminal(self) -> bool:
        return self.lives <= 0 or not self._alive_aliens() or self._reached_bottom

    def _observe(self) -> dict:
        observation = {
            "Player": obj(self.player_x, PLAYER_Y, PLAYER_W, PLAYER_H, self._player_dx, 0),
        }
        for i, (r, c) in enumerate(sorted(self._alive_aliens())):
            ax, ay = self._alien_pos(r, c)
            observation[f"Alien{i}"] = obj(ax, ay, ALIEN_W, ALIEN_H,
                                           self.grid_dir, 0)
        bullet_idx = 0
        if self.player_bullet is not None:
            bx, by = self.player_bullet
            observation[f"Bullet{bullet_idx}"] = obj(bx, by, 1, 4, 0, -PLAYER_BULLET_SPEED)
            bullet_idx += 1
        for bx, by in self.alien_bullets:
            observation[f"Bullet{bullet_idx}"] = obj(bx, by, 1, 4, 0, ALIEN_BULLET_SPEED)
            bullet_idx += 1
        for i, shield in enumerate(self.shields):
            if shield["hp"] > 0:
                observation[f"Shield{i}"] = obj(shield["x"], SHIELD_Y, SHIELD_W, SHIELD_H)
        observation["lives"] = self.lives
        observation["reward"] = self.last_reward
        return observation
