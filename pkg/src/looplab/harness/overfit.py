"""Detect divergence between training and validation learning curves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import LoopLabError


@dataclass(frozen=True)
class OverfitReport:
    flagged: bool
    step: Optional[int]  # first step index at which the divergence shows
    window: int
    gap: tuple[float, ...]  # train - val per step


def _slope(values: Sequence[float]) -> float:
    xs = np.arange(len(values), dtype=float)
    return float(np.polyfit(xs, np.asarray(values, dtype=float), 1)[0])


def detect_meta_overfit(train: Sequence[float], val: Sequence[float],
                        window: int = 5) -> OverfitReport:
    """Flag the first step whose trailing window shows the training metric
    trending up while the validation metric is flat or declining.

    Both series are assumed higher-is-better. The trailing window ends at
    the flagged step; slopes are least-squares fits over the window.
    """
    if len(train) != len(val):
        raise LoopLabError("train and val curves must have equal length")
    if len(train) < 3:
        raise LoopLabError("curve needs at least 3 rows")
    window = max(3, min(window, len(train)))
    gap = tuple(float(t) - float(v) for t, v in zip(train, val))
    for end in range(window - 1, len(train)):
        lo = end - window + 1
        train_slope = _slope(train[lo:end + 1])
        val_slope = _slope(val[lo:end + 1])
        if train_slope > 0.0 and val_slope <= 0.0:
            return OverfitReport(True, end, window, gap)
    return OverfitReport(False, None, window, gap)
