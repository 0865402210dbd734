"""Bounded FIFO memory of past optimizer steps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import OptimizerError


@dataclass(frozen=True)
class StepRecord:
    """Summary of one optimizer step and the feedback it earned."""

    summary: str
    score: float
    params: Optional[dict] = None


@dataclass(frozen=True)
class OptimizerMemory:
    """FIFO list of step records, oldest first; oldest evicted at capacity."""

    capacity: int
    entries: tuple[StepRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.capacity < 1:
            raise OptimizerError("memory capacity must be positive")
        if len(self.entries) > self.capacity:
            raise OptimizerError("memory over capacity")

    def push(self, entry: StepRecord) -> "OptimizerMemory":
        entries = (self.entries + (entry,))[-self.capacity:]
        return OptimizerMemory(self.capacity, entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def memory_push(mem: OptimizerMemory, entry: StepRecord) -> OptimizerMemory:
    """Append ``entry``, evicting the oldest record when over capacity."""
    return mem.push(entry)
