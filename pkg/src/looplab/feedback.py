"""Metrics and staged natural-language feedback.

Staged feedback is driven by threshold tables: a metric value selects exactly
one stage, and that stage's message template is rendered with fixed number
formatting (integers for game scores, three decimals for statistical
metrics) so messages are byte-reproducible across runs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import FeedbackError, MetricError

STAGE_LEVELS = ("low", "medium", "high", "correct", "incorrect", "info")

_INF = math.inf


@dataclass(frozen=True)
class FeedbackRecord:
    """Score plus a fully rendered natural-language message."""

    score: float
    message: str
    stage: str = "info"

    def __post_init__(self):
        if self.stage not in STAGE_LEVELS:
            raise FeedbackError(f"unknown stage level: {self.stage!r}")


@dataclass(frozen=True)
class StageRow:
    """One threshold interval of a stage table.

    The interval is [lower, upper] with per-end closedness flags; rows must
    tile the whole real line.
    """

    name: str
    level: str
    lower: float
    upper: float
    lower_closed: bool
    upper_closed: bool
    template: str

    def contains(self, value: float) -> bool:
        if self.lower_closed:
            above = value >= self.lower
        else:
            above = value > self.lower
        if self.upper_closed:
            below = value <= self.upper
        else:
            below = value < self.upper
        return above and below


@dataclass(frozen=True)
class StageTable:
    """Ordered stage rows over one named metric."""

    metric: str
    rows: tuple[StageRow, ...]
    value_key: str = "score"
    value_format: str = "int"  # "int" or "metric3"

    def __post_init__(self):
        if not self.rows:
            raise FeedbackError("stage table has no rows")
        if self.rows[0].lower != -_INF or self.rows[-1].upper != _INF:
            raise FeedbackError("stage rows must cover the whole metric range")
        for prev, cur in zip(self.rows, self.rows[1:]):
            if prev.upper != cur.lower:
                raise FeedbackError("stage boundaries must be contiguous")
            if prev.upper_closed == cur.lower_closed:
                raise FeedbackError("adjacent stages overlap or leave a gap")
        bounds = [r.upper for r in self.rows[:-1]]
        if any(b >= c for b, c in zip(bounds, bounds[1:])):
            raise FeedbackError("stage boundaries must be strictly increasing")

    def select(self, value: float) -> StageRow:
        for row in self.rows:
            if row.contains(value):
                return row
        raise FeedbackError(f"no stage covers value {value!r}")

    @classmethod
    def from_dict(cls, spec: Mapping) -> "StageTable":
        """Build a table from a plain mapping (e.g. parsed TOML)."""
        rows = []
        for r in spec["rows"]:
            rows.append(
                StageRow(
                    name=r["name"],
                    level=r["level"],
                    lower=float(r.get("lower", -_INF)),
                    upper=float(r.get("upper", _INF)),
                    lower_closed=bool(r.get("lower_closed", True)),
                    upper_closed=bool(r.get("upper_closed", False)),
                    template=r["template"],
                )
            )
        return cls(
            metric=spec["metric"],
            rows=tuple(rows),
            value_key=spec.get("value_key", "score"),
            value_format=spec.get("value_format", "int"),
        )


def _format_value(value: float, kind: str) -> str:
    if kind == "int":
        return str(int(round(value)))
    if kind == "metric3":
        return f"{value:.3f}"
    raise FeedbackError(f"unknown value format: {kind!r}")


def staged_feedback(
    metric_value: float,
    table: StageTable,
    fill: Optional[Mapping[str, object]] = None,
) -> FeedbackRecord:
    """Select the stage containing ``metric_value`` and render its message.

    ``fill`` supplies any placeholder the table cannot derive from the metric
    value itself. An undefined metric (NaN) falls back to the lowest stage
    with a diagnostic note appended.
    """
    undefined = isinstance(metric_value, float) and math.isnan(metric_value)
    if undefined:
        row = table.rows[0]
    else:
        row = table.select(metric_value)
    values = dict(fill or {})
    if not undefined:
        values.setdefault(table.value_key, _format_value(metric_value, table.value_format))
    try:
        message = row.template.format(**values)
    except (KeyError, IndexError) as exc:
        raise FeedbackError(f"unrenderable placeholder in stage {row.name!r}: {exc}") from exc
    if undefined:
        message += " (metric undefined: constant target values)"
    score = 0.0 if undefined else float(metric_value)
    return FeedbackRecord(score=score, message=message, stage=row.level)


# --- Stage tables ----------------------------------------------------------
#
# The threshold boundaries and message wording below are engineering
# configuration for the three arcade games and the two tabular tasks; the
# intervals are intentionally asymmetric (e.g. pong reward exactly 0 is
# "low", not "medium") and are used literally, without re-normalization.

PONG_STAGES = StageTable(
    metric="episode_return",
    value_key="score",
    value_format="int",
    rows=(
        StageRow(
            "low", "low", -_INF, 0.0, False, True,
            "Your score is {score} points. Try to improve paddle positioning "
            "to prevent opponent scoring.",
        ),
        StageRow(
            "medium", "medium", 0.0, 19.0, False, False,
            "Keep it up! You're scoring {score} points against the opponent "
            "but you are still {gap} points from winning the game. Try "
            "improving paddle positioning to prevent opponent scoring.",
        ),
        StageRow(
            "high", "high", 19.0, _INF, True, True,
            "Good job! You're close to winning the game! You're scoring "
            "{score} points against the opponent, only {gap} {gap_unit} "
            "short of winning.",
        ),
    ),
)

BREAKOUT_STAGES = StageTable(
    metric="episode_return",
    value_key="score",
    value_format="int",
    rows=(
        StageRow(
            "low", "low", -_INF, 0.0, False, True,
            "Your score is {score} points. Try to improve paddle positioning "
            "to return the ball and avoid losing lives.",
        ),
        StageRow(
            "medium", "medium", 0.0, 300.0, False, False,
            "Keep it up! You're scoring {score} points against the opponent "
            "but you are still {gap} points from winning the game. Try "
            "improving paddle positioning to return the ball and avoid "
            "losing lives.",
        ),
        StageRow(
            "high", "high", 300.0, _INF, True, True,
            "Good job! You're close to winning the game! You're scoring "
            "{score} points against the opponent, try ensuring you return "
            "the ball, only {gap} points short of winning.",
        ),
    ),
)

INVADERS_STAGES = StageTable(
    metric="episode_return",
    value_key="score",
    value_format="int",
    rows=(
        StageRow(
            "low", "low", -_INF, 100.0, False, False,
            "Your average score is {score}. Try to improve your strategy for "
            "shooting aliens and dodging projectiles.",
        ),
        StageRow(
            "medium", "medium", 100.0, 300.0, True, False,
            "Good progress! Your average score is {score}. Focus on better "
            "timing for shooting and avoiding enemy projectiles.",
        ),
        StageRow(
            "high", "high", 300.0, _INF, True, True,
            "Great job! You're performing well with an average score of "
            "{score}. Try to improve your shooting accuracy and dodging.",
        ),
    ),
)

SPACESHIP_F1_STAGES = StageTable(
    metric="f1",
    value_key="f1",
    value_format="metric3",
    rows=(
        StageRow(
            "poor", "low", -_INF, 0.5, False, False,
            "Model performance is poor. Try better feature engineering and "
            "preprocessing.",
        ),
        StageRow(
            "promising", "medium", 0.5, 0.7, True, False,
            "Model is showing promise but needs improvement. Consider class "
            "balancing techniques.",
        ),
        StageRow(
            "well", "high", 0.7, 0.8, True, False,
            "Model is performing well. Fine-tune hyperparameters for further "
            "improvements.",
        ),
        StageRow(
            "excellent", "high", 0.8, _INF, True, True,
            "Excellent performance! Focus on preventing overfitting.",
        ),
    ),
)

HOUSING_R2_STAGES = StageTable(
    metric="r2",
    value_key="r2",
    value_format="metric3",
    rows=(
        StageRow(
            "worse_than_baseline", "low", -_INF, 0.0, False, True,
            "Model is performing worse than baseline. Focus on better "
            "feature engineering and selection.",
        ),
        StageRow(
            "poor", "low", 0.0, 0.5, False, False,
            "Model has poor predictive power. Try more advanced "
            "preprocessing or different algorithms.",
        ),
        StageRow(
            "improving", "medium", 0.5, 0.7, True, False,
            "Model is improving but still has room for growth. Consider "
            "feature interactions.",
        ),
        StageRow(
            "well", "high", 0.7, _INF, True, True,
            "Model is performing well. Fine-tune hyperparameters for "
            "further improvements.",
        ),
    ),
)

STAGE_TABLES: dict[str, StageTable] = {
    "pong": PONG_STAGES,
    "breakout": BREAKOUT_STAGES,
    "invaders": INVADERS_STAGES,
    "spaceship_f1": SPACESHIP_F1_STAGES,
    "housing_r2": HOUSING_R2_STAGES,
}

_GAME_WIN_SCORE = {"pong": 21, "breakout": 864, "invaders": None}


def game_feedback(game: str, episode_return: float) -> FeedbackRecord:
    """Staged feedback for one arcade episode, filling the score/gap slots."""
    table = STAGE_TABLES[game]
    score = int(round(episode_return))
    fill: dict[str, object] = {"score": score}
    win = _GAME_WIN_SCORE.get(game)
    if win is not None:
        gap = max(win - score, 0)
        fill["gap"] = gap
        fill["gap_unit"] = "point" if gap == 1 else "points"
    return staged_feedback(episode_return, table, fill)


# --- Correctness feedback --------------------------------------------------

_CHOICE_RE = re.compile(r"\(([A-Za-z])\)")


def extract_choice(response: str) -> str:
    """Return the last single-letter choice token like ``(B)``.

    Falls back to the whole trimmed response when no such token appears, so
    exact-match comparison still applies.
    """
    matches = _CHOICE_RE.findall(response)
    if matches:
        return f"({matches[-1]})"
    return response.strip()


def correctness_guide(predicted: str, gold: str) -> FeedbackRecord:
    """Binary exact-match feedback; on error, reveal the target and ask for
    a revision."""
    if predicted == gold:
        return FeedbackRecord(score=1.0, message="Correct.", stage="correct")
    return FeedbackRecord(
        score=0.0,
        message=(
            f"Incorrect. The expected answer is {gold}. Revise the prompt "
            "or program so the workflow produces it."
        ),
        stage="incorrect",
    )


# --- Metrics ---------------------------------------------------------------


@dataclass(frozen=True)
class MetricSet:
    """Named metric values; only the fields relevant to the task kind are set."""

    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def get(self, name, default=None):
        return self.values.get(name, default)


def compute_metrics(predictions: Sequence, golds: Sequence, task_kind: str,
                    positive_label=1) -> MetricSet:
    """Compute classification, regression, or episode-return metrics.

    r2 is undefined when the gold values are constant; it is reported as NaN
    rather than an infinite value.
    """
    if len(predictions) != len(golds):
        raise MetricError(
            f"length mismatch: {len(predictions)} predictions vs {len(golds)} golds"
        )
    if not predictions:
        raise MetricError("need at least one prediction")

    if task_kind == "classification":
        tp = fp = tn = fn = 0
        correct = 0
        for p, g in zip(predictions, golds):
            if p == g:
                correct += 1
            if p == positive_label and g == positive_label:
                tp += 1
            elif p == positive_label:
                fp += 1
            elif g == positive_label:
                fn += 1
            else:
                tn += 1
        accuracy = correct / len(golds)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        denom = precision + recall
        f1 = 2 * precision * recall / denom if denom else 0.0
        return MetricSet({
            "accuracy": accuracy, "f1": f1,
            "precision": precision, "recall": recall,
        })

    if task_kind == "regression":
        n = len(golds)
        residuals = [float(p) - float(g) for p, g in zip(predictions, golds)]
        mse = sum(r * r for r in residuals) / n
        rmse = math.sqrt(mse)
        mae = sum(abs(r) for r in residuals) / n
        mean_g = sum(float(g) for g in golds) / n
        ss_tot = sum((float(g) - mean_g) ** 2 for g in golds)
        if ss_tot == 0.0:
            r2 = math.nan
        else:
            r2 = 1.0 - (mse * n) / ss_tot
        return MetricSet({"rmse": rmse, "mae": mae, "r2": r2})

    if task_kind == "episodes":
        return MetricSet({"episode_return": float(sum(predictions))})

    raise MetricError(f"unknown task kind: {task_kind!r}")
