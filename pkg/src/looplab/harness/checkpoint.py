"""Checkpoints and best-validation selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..artifacts.model import Artifact
from ..errors import LoopLabError


class CheckpointError(LoopLabError):
    pass


@dataclass(frozen=True)
class Checkpoint:
    """One artifact snapshot plus its metrics at a given update step."""

    step: int
    artifact: Artifact
    train_metrics: dict = field(default_factory=dict)
    val_metrics: dict = field(default_factory=dict)


def select_checkpoint(checkpoints: Sequence[Checkpoint], metric_name: str,
                      direction: str = "max") -> Checkpoint:
    """Argbest over the validation metric; ties go to the earliest step.

    ``direction`` is "max" for score-like metrics and "min" for error
    metrics such as rmse.
    """
    if not checkpoints:
        raise CheckpointError("no checkpoints to select from")
    if direction not in ("max", "min"):
        raise CheckpointError(f"unknown direction: {direction!r}")
    best = None
    for cp in checkpoints:
        if metric_name not in cp.val_metrics:
            raise CheckpointError(
                f"checkpoint at step {cp.step} lacks metric {metric_name!r}")
        value = cp.val_metrics[metric_name]
        if best is None:
            best = cp
            continue
        best_value = best.val_metrics[metric_name]
        if direction == "max":
            better = value > best_value
        else:
            better = value < best_value
        # strict comparison only: an equal later value never displaces an
        # earlier checkpoint
        if better:
            best = cp
    return best


def running_best(values: Sequence[float], direction: str = "max") -> list[float]:
    """Best-so-far series; monotone by construction."""
    out: list[float] = []
    for v in values:
        if not out:
            out.append(v)
        elif direction == "max":
            out.append(max(out[-1], v))
        else:
            out.append(min(out[-1], v))
    return out
