from .checkpoint import Checkpoint, CheckpointError, running_best, select_checkpoint
from .config import (
    ExperimentConfig,
    config_from_dict,
    config_to_toml,
    load_config,
    parse_override,
)
from .overfit import OverfitReport, detect_meta_overfit
from .runner import (
    CURVE_HEADER,
    CurveRow,
    ExperimentReport,
    TrialResult,
    aggregate_rows,
    evaluate_final,
    initial_artifact,
    make_backend,
    mean_se,
    rollout,
    run_experiment,
    run_text_example,
    run_trial,
    write_curve,
)
from .sweep import SWEEP_AXES, SweepCell, SweepReport, sweep

__all__ = [
    "CURVE_HEADER",
    "Checkpoint",
    "CheckpointError",
    "CurveRow",
    "ExperimentConfig",
    "ExperimentReport",
    "OverfitReport",
    "SWEEP_AXES",
    "SweepCell",
    "SweepReport",
    "TrialResult",
    "aggregate_rows",
    "config_from_dict",
    "config_to_toml",
    "detect_meta_overfit",
    "evaluate_final",
    "initial_artifact",
    "load_config",
    "make_backend",
    "mean_se",
    "parse_override",
    "rollout",
    "run_experiment",
    "run_text_example",
    "run_trial",
    "running_best",
    "select_checkpoint",
    "sweep",
    "write_curve",
]
