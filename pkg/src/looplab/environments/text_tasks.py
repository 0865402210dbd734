"""Synthetic text tasks with programmatically known answers.

Three generators, all seeded and deterministic:

- ``bracket_completion``: given a prefix of mixed brackets, answer with the
  closing sequence that balances it.
- ``boolean_eval``: evaluate a small and/or/not expression over True/False
  literals.
- ``multiple_choice``: pick the lettered option naming the largest number
  in a short list.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass

from ..errors import EnvError

TASK_KINDS = ("bracket_completion", "boolean_eval", "multiple_choice")

_PAIRS = {"(": ")", "[": "]", "{": "}"}


@dataclass(frozen=True)
class TextTask:
    kind: str
    prompt: str
    gold: str


def _gen_bracket(rng: random.Random) -> TextTask:
    depth = 0
    opens: list[str] = []
    chars: list[str] = []
    length = rng.randrange(4, 9)
    for _ in range(length):
        if opens and rng.random() < 0.4:
            chars.append(_PAIRS[opens.pop()])
        else:
            bracket = rng.choice("([{")
            opens.append(bracket)
            chars.append(bracket)
        depth = len(opens)
    if depth == 0:
        # force at least one unclosed bracket so the answer is non-empty
        bracket = rng.choice("([{")
        opens.append(bracket)
        chars.append(bracket)
    prefix = "".join(chars)
    gold = "".join(_PAIRS[b] for b in reversed(opens))
    prompt = (
        "Complete the bracket sequence so every bracket is matched. "
        f"Sequence: {prefix}"
    )
    return TextTask("bracket_completion", prompt, gold)


def _gen_boolean(rng: random.Random) -> TextTask:
    def expr(depth: int) -> str:
        if depth == 0 or rng.random() < 0.3:
            return rng.choice(("True", "False"))
        op = rng.choice(("and", "or", "not"))
        if op == "not":
            return f"not {expr(depth - 1)}"
        return f"({expr(depth - 1)} {op} {expr(depth - 1)})"

    text = expr(3)
    gold = str(eval(text, {"__builtins__": {}}, {}))  # literals and and/or/not only
    prompt = f"Evaluate the boolean expression. Expression: {text}"
    return TextTask("boolean_eval", prompt, gold)


def _gen_choice(rng: random.Random) -> TextTask:
    n = rng.randrange(3, 6)
    values = rng.sample(range(10, 100), n)
    letters = string.ascii_uppercase[:n]
    options = "  ".join(f"({letter}) {value}" for letter, value in zip(letters, values))
    gold = letters[values.index(max(values))]
    prompt = f"Which option is the largest number? {options}"
    return TextTask("multiple_choice", prompt, gold)


_GENERATORS = {
    "bracket_completion": _gen_bracket,
    "boolean_eval": _gen_boolean,
    "multiple_choice": _gen_choice,
}


def generate_text_tasks(kind: str, count: int, seed: int = 0) -> list[TextTask]:
    if kind not in _GENERATORS:
        raise EnvError(f"unknown text task kind: {kind!r}")
    if count < 1:
        raise EnvError("count must be positive")
    rng = random.Random(seed)
    return [_GENERATORS[kind](rng) for _ in range(count)]
