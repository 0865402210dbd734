"""Sweeps: run the same experiment across one configuration axis."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from ..errors import ConfigError, LoopLabError
from .config import ExperimentConfig
from .runner import ExperimentReport, mean_se, run_experiment

SWEEP_AXES = ("batch_size", "horizon", "artifact_init")


@dataclass(frozen=True)
class SweepCell:
    value: object
    report: Optional[ExperimentReport] = None
    mean: float = float("nan")
    se: float = float("nan")
    trials_completed: int = 0
    error: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error) or self.trials_completed == 0


@dataclass(frozen=True)
class SweepReport:
    axis: str
    cells: tuple[SweepCell, ...]

    def best_value(self):
        live = [c for c in self.cells if not c.failed]
        if not live:
            return None
        return max(live, key=lambda c: c.mean).value

    def table_text(self) -> str:
        best = self.best_value()
        lines = [f"axis: {self.axis}"]
        for cell in self.cells:
            if cell.failed:
                lines.append(f"{cell.value}: FAILED ({cell.error or 'no completed trials'})")
                continue
            marker = " *" if cell.value == best else ""
            lines.append(
                f"{cell.value}: {cell.mean:.6f} +/- {cell.se:.6f} "
                f"({cell.trials_completed} trials){marker}")
        return "\n".join(lines) + "\n"


def _apply_axis(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "batch_size":
        return dataclasses.replace(config, batch_size=int(value), template="batch")
    if axis == "horizon":
        if value not in ("one_step", "multi_step"):
            raise ConfigError(f"horizon value must be one_step or multi_step, got {value!r}")
        return dataclasses.replace(config, horizon_mode=str(value))
    if axis == "artifact_init":
        return dataclasses.replace(config, artifact_init=str(value))
    raise ConfigError(f"unknown sweep axis: {axis!r} (expected one of {SWEEP_AXES})")


def sweep(config: ExperimentConfig, axis: str, values: Sequence,
          outdir: Optional[Path] = None) -> SweepReport:
    """Run one experiment per axis value with shared per-trial seeds.

    A failing cell is recorded and skipped; the sweep always completes the
    remaining cells.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis: {axis!r} (expected one of {SWEEP_AXES})")
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    # pin the seed list so every cell runs the same trial seeds
    base = dataclasses.replace(config, seeds=config.trial_seeds())
    cells = []
    for value in values:
        cell_dir = Path(outdir) / f"{axis}_{value}" if outdir is not None else None
        try:
            cell_config = _apply_axis(base, axis, value)
            report = run_experiment(cell_config, cell_dir)
        except LoopLabError as exc:
            cells.append(SweepCell(value=value, error=str(exc)))
            continue
        finals = [t.final_score for t in report.completed()]
        if not finals:
            cells.append(SweepCell(value=value, report=report,
                                   error="all trials failed"))
            continue
        mean, se = mean_se(finals)
        cells.append(SweepCell(value=value, report=report, mean=mean, se=se,
                               trials_completed=len(finals)))
    sweep_report = SweepReport(axis=axis, cells=tuple(cells))
    if outdir is not None:
        Path(outdir).mkdir(parents=True, exist_ok=True)
        (Path(outdir) / "sweep.txt").write_text(sweep_report.table_text(),
                                                encoding="utf-8")
    return sweep_report
