"""Dataset split policies for text-task experiments."""

from __future__ import annotations

import random
from typing import Sequence, TypeVar

from ..errors import SplitError

T = TypeVar("T")

FIXED_TRAIN = 15
FIXED_VAL = 10


def split_fixed(tasks: Sequence[T]) -> tuple[list[T], list[T], list[T]]:
    """First 15 examples train, next 10 validate, remainder test.

    Preserves input order; requires at least 26 examples so every split
    is non-empty.
    """
    if len(tasks) < FIXED_TRAIN + FIXED_VAL + 1:
        raise SplitError(
            f"fixed split needs at least {FIXED_TRAIN + FIXED_VAL + 1} examples, "
            f"got {len(tasks)}"
        )
    items = list(tasks)
    return (items[:FIXED_TRAIN],
            items[FIXED_TRAIN:FIXED_TRAIN + FIXED_VAL],
            items[FIXED_TRAIN + FIXED_VAL:])


def split_fraction(tasks: Sequence[T], seed: int = 0,
                   train_fraction: float = 0.8) -> tuple[list[T], list[T]]:
    """Seeded shuffle, then an 80/20 (by default) train/validation cut."""
    if not 0.0 < train_fraction < 1.0:
        raise SplitError("train_fraction must be strictly between 0 and 1")
    if len(tasks) < 2:
        raise SplitError("fraction split needs at least 2 examples")
    items = list(tasks)
    random.Random(seed).shuffle(items)
    cut = max(1, min(len(items) - 1, round(len(items) * train_fraction)))
    return items[:cut], items[cut:]


class EpochSampler:
    """Without-replacement batch sampler that reshuffles every epoch.

    Tracks total examples consumed so experiment reports can verify that
    n updates at batch size k consume exactly n * k examples.
    """

    def __init__(self, items: Sequence[T], seed: int = 0):
        if not items:
            raise SplitError("cannot sample from an empty pool")
        self._items = list(items)
        self._rng = random.Random(seed)
        self._queue: list[T] = []
        self.consumed = 0
        self.epochs = 0

    def draw(self, k: int) -> list[T]:
        if k < 1:
            raise SplitError("batch size must be positive")
        batch: list[T] = []
        while len(batch) < k:
            if not self._queue:
                self._queue = list(self._items)
                self._rng.shuffle(self._queue)
                self.epochs += 1
            batch.append(self._queue.pop(0))
        self.consumed += k
        return batch
