"""Starting-artifact initializations.

Each task has a many-function decomposition (several editable slots wired in
a fixed order) and a one-function variant exposing a single editable slot.
Both carry the same total documentation text: the one-function docstring is
the concatenation of the many-function docstrings, so the two schemes differ
only in modularization.
"""

from __future__ import annotations

from ..errors import ArtifactError
from .model import Artifact, Slot, WiringCall

DOC_JOINER = "\n\n"


_PONG_PREDICT_DOC = """\
Estimate the y-coordinate where the ball will cross the player's paddle
plane (x = 140), using the ball's position (x, y) and velocity (dx, dy) and
accounting for elastic bounces off the top wall (y = 30) and bottom wall
(y = 190). The enemy paddle sits at x = 16.

Inputs: obs, a map with entries "Player", "Ball", "Enemy"; each entry has
integer fields x, y, w, h, dx, dy.
Output: the predicted y value, or None when the ball cannot be located."""

_PONG_SELECT_DOC = """\
Pick the paddle action by comparing the player's paddle position with
predicted_ball_y. Action 2 moves the paddle toward smaller y (screen top),
action 3 toward larger y (screen bottom), and action 0 holds position.
Choose 2 when the paddle center is below the target (larger y), 3 when it is
above (smaller y), and 0 when aligned; steady movement near the target
avoids overshooting the ball.

Inputs: predicted_ball_y (number or None) and obs as above.
Output: an integer action in {0, 2, 3}."""

_PONG_MANY = (
    Slot(
        name="predict_ball_trajectory",
        params=("obs",),
        returns="float | None",
        documentation=_PONG_PREDICT_DOC,
        body="""\
if 'Ball' in obs:
    return obs['Ball']['y']
return None""",
    ),
    Slot(
        name="select_action",
        params=("predicted_ball_y", "obs"),
        returns="int",
        documentation=_PONG_SELECT_DOC,
        body="""\
if predicted_ball_y is not None and 'Player' in obs:
    return choice([2, 3])
return 0""",
    ),
)

_PONG_WIRING = (
    WiringCall("predict_ball_trajectory", ("obs",), "predicted_ball_y"),
    WiringCall("select_action", ("predicted_ball_y", "obs"), "action"),
)

_PONG_ONE_BODY = """\
predicted_ball_y = None
if 'Ball' in obs:
    predicted_ball_y = obs['Ball']['y']
if predicted_ball_y is not None and 'Player' in obs:
    return choice([2, 3])
return 0"""


_BREAKOUT_PREDICT_DOC = """\
Estimate the x-coordinate where the ball will reach the player's paddle
plane (y = 189), using the ball's position and velocity and accounting for
bounces off the left wall (x = 9) and right wall (x = 152). Balls deflected
by high-value bricks move faster and are harder to return.

Inputs: obs, a map with "Player", "Ball", and brick rows "RB", "OB", "YB",
"GB", "AB", "BB" (lists of brick records); records carry x, y, w, h, dx, dy.
Output: the predicted x value, or None when the ball cannot be located."""

_BREAKOUT_TARGET_DOC = """\
Choose the paddle x position that both returns the ball and steers it toward
the more valuable bricks. The wall has six rows from top to bottom worth 7,
7, 4, 4, 1, and 1 points; opening a vertical tunnel lets the ball reach the
top rows repeatedly. Prefer a safe return when the ball is descending.

Inputs: pre_ball_x (number or None) and obs as above.
Output: the target paddle x, or None when no target can be computed."""

_BREAKOUT_SELECT_DOC = """\
Move the paddle toward target_paddle_pos. Action 2 moves right (larger x),
action 3 moves left (smaller x), action 1 launches the ball, and action 0
holds. Use a small dead zone around the target to avoid oscillating.

Inputs: target_paddle_pos (number or None) and obs as above.
Output: an integer action in {0, 1, 2, 3}."""

_BREAKOUT_MANY = (
    Slot(
        name="predict_ball_trajectory",
        params=("obs",),
        returns="float | None",
        documentation=_BREAKOUT_PREDICT_DOC,
        body="""\
if 'Ball' in obs:
    return obs['Ball']['x']
return None""",
    ),
    Slot(
        name="generate_paddle_target",
        params=("pre_ball_x", "obs"),
        returns="float | None",
        documentation=_BREAKOUT_TARGET_DOC,
        body="""\
if pre_ball_x is None or 'Ball' not in obs:
    return None
return pre_ball_x""",
    ),
    Slot(
        name="select_paddle_action",
        params=("target_paddle_pos", "obs"),
        returns="int",
        documentation=_BREAKOUT_SELECT_DOC,
        body="""\
if target_paddle_pos is None or 'Player' not in obs:
    return 0
paddle = obs['Player']
paddle_center = paddle['x'] + paddle['w'] / 2
if abs(paddle_center - target_paddle_pos) < 2:
    return 0
if paddle_center > target_paddle_pos:
    return 3
return 2""",
    ),
)

_BREAKOUT_WIRING = (
    WiringCall("predict_ball_trajectory", ("obs",), "pre_ball_x"),
    WiringCall("generate_paddle_target", ("pre_ball_x", "obs"), "target_paddle_pos"),
    WiringCall("select_paddle_action", ("target_paddle_pos", "obs"), "action"),
)

_BREAKOUT_ONE_BODY = """\
pre_ball_x = None
if 'Ball' in obs:
    pre_ball_x = obs['Ball']['x']
if pre_ball_x is None or 'Player' not in obs:
    return 0
paddle = obs['Player']
paddle_center = paddle['x'] + paddle['w'] / 2
if abs(paddle_center - pre_ball_x) < 2:
    return 0
if paddle_center > pre_ball_x:
    return 3
return 2"""


_INVADERS_SHOOT_DOC = """\
Decide whether to fire. Only one player missile may be on the field at a
time: player bullets travel upward (dy < 0) and enemy bullets downward
(dy > 0), so never fire while a bullet with dy < 0 exists. Firing when an
alien is aligned with the cannon, preferring lower aliens, scores fastest.

Inputs: obs, a map with "Player", "Shield0".., "Alien0".., "Bullet0.." and
integer fields x, y, w, h, dx, dy per record.
Output: True to fire, False otherwise."""

_INVADERS_MOVE_DOC = """\
Decide the cannon's horizontal movement. Dodge descending enemy bullets
first; otherwise drift toward the side with more aliens to line up shots,
and keep away from the screen edges.

Inputs: obs as above.
Output: -1 to move left, 1 to move right, 0 to hold."""

_INVADERS_COMBINE_DOC = """\
Fuse the firing and movement decisions into one game action:
0 = hold, 1 = fire, 2 = right, 3 = left, 4 = right and fire,
5 = left and fire.

Inputs: shoot (bool) and movement (-1, 0, or 1).
Output: an integer action in {0, 1, 2, 3, 4, 5}."""

_INVADERS_MANY = (
    Slot(
        name="decide_shoot",
        params=("obs",),
        returns="bool",
        documentation=_INVADERS_SHOOT_DOC,
        body="""\
for key in obs:
    if key.startswith('Bullet'):
        if obs[key]['dy'] < 0:
            return False
return choice([True, False])""",
    ),
    Slot(
        name="decide_movement",
        params=("obs",),
        returns="int",
        documentation=_INVADERS_MOVE_DOC,
        body="""\
return choice([-1, 0, 1])""",
    ),
    Slot(
        name="combine_actions",
        params=("shoot", "movement"),
        returns="int",
        documentation=_INVADERS_COMBINE_DOC,
        body="""\
if shoot and movement > 0:
    return 4
if shoot and movement < 0:
    return 5
if shoot:
    return 1
if movement > 0:
    return 2
if movement < 0:
    return 3
return 0""",
    ),
)

_INVADERS_WIRING = (
    WiringCall("decide_shoot", ("obs",), "shoot"),
    WiringCall("decide_movement", ("obs",), "movement"),
    WiringCall("combine_actions", ("shoot", "movement"), "action"),
)

_INVADERS_ONE_BODY = """\
can_shoot = True
for key in obs:
    if key.startswith('Bullet'):
        if obs[key]['dy'] < 0:
            can_shoot = False
shoot = False
if can_shoot:
    shoot = choice([True, False])
movement = choice([-1, 0, 1])
if shoot and movement > 0:
    return 4
if shoot and movement < 0:
    return 5
if shoot:
    return 1
if movement > 0:
    return 2
if movement < 0:
    return 3
return 0"""


_TEXT_CALL_DOC = """\
Compose the model request for one question: combine the prompt preamble
with the task text and produce the raw response string. The response should
end with a line of the form "Answer: <final answer>" so the extractor can
recover the prediction.

Inputs: question, the task text.
Output: the raw response string."""

_TEXT_EXTRACT_DOC = """\
Recover the final answer from the raw response. Split on the marker
"Answer:" and return the trimmed text after its last occurrence; when the
marker is absent, return the whole trimmed response.

Inputs: response, the raw response string.
Output: the extracted answer string."""

_TEXT_MANY = (
    Slot(
        name="call_llm",
        params=("question",),
        returns="str",
        documentation=_TEXT_CALL_DOC,
        body="""\
return 'Answer: ' + question""",
    ),
    Slot(
        name="answer_extraction",
        params=("response",),
        returns="str",
        documentation=_TEXT_EXTRACT_DOC,
        body="""\
parts = response.split('Answer:')
if len(parts) > 1:
    return parts[-1].strip()
return response.strip()""",
    ),
)

_TEXT_WIRING = (
    WiringCall("call_llm", ("question",), "response"),
    WiringCall("answer_extraction", ("response",), "answer"),
)

_TEXT_ONE_BODY = """\
response = 'Answer: ' + question
parts = response.split('Answer:')
if len(parts) > 1:
    return parts[-1].strip()
return response.strip()"""


_TASKS = {
    "pong": (_PONG_MANY, _PONG_WIRING, "obs", _PONG_ONE_BODY, "int"),
    "breakout": (_BREAKOUT_MANY, _BREAKOUT_WIRING, "obs", _BREAKOUT_ONE_BODY, "int"),
    "invaders": (_INVADERS_MANY, _INVADERS_WIRING, "obs", _INVADERS_ONE_BODY, "int"),
    "text": (_TEXT_MANY, _TEXT_WIRING, "question", _TEXT_ONE_BODY, "str"),
}

_BACKGROUNDS = {
    "pong": (
        "You are improving a paddle-control policy for a two-paddle ball "
        "game. Each step the policy maps an object-centric observation to "
        "one action; the score difference against the opponent is the "
        "episode return."
    ),
    "breakout": (
        "You are improving a paddle-control policy for a brick-breaking "
        "game. Each step the policy maps an object-centric observation to "
        "one action; removed-brick values sum to the episode return."
    ),
    "invaders": (
        "You are improving a cannon-control policy for a fixed-shooter "
        "game. Each step the policy maps an object-centric observation to "
        "one action; destroyed-alien values sum to the episode return."
    ),
    "text": (
        "You are improving a two-part question-answering workflow: a prompt "
        "composition step and an answer-extraction step. Each example is "
        "scored by exact match against the expected answer."
    ),
}


def _get_task(task: str):
    base = "text" if task in ("bracket_completion", "boolean_eval", "multiple_choice") else task
    if base not in _TASKS:
        raise ArtifactError(f"unknown task: {task!r}")
    return _TASKS[base]


def task_background(task: str) -> str:
    base = "text" if task in ("bracket_completion", "boolean_eval", "multiple_choice") else task
    return _BACKGROUNDS[base]


def init_many_function(task: str) -> Artifact:
    """Artifact with the task's declared multi-slot decomposition."""
    slots, wiring, input_var, _, _ = _get_task(task)
    return Artifact(slots=slots, wiring=wiring, input_var=input_var)


def init_one_function(task: str) -> Artifact:
    """Single-slot artifact whose documentation is the byte-for-byte
    concatenation of the many-function docstrings."""
    slots, _, input_var, one_body, returns = _get_task(task)
    doc = DOC_JOINER.join(s.documentation for s in slots)
    slot = Slot(
        name="policy",
        params=(input_var,),
        returns=returns,
        documentation=doc,
        body=one_body,
    )
    wiring = (WiringCall("policy", (input_var,), "action"),)
    return Artifact(slots=(slot,), wiring=wiring, input_var=input_var)
