"""The learning loop: execute, collect feedback, render a context, apply
the optimizer's delta, checkpoint, repeat.

One trial owns its artifact lineage, memory, and random streams; trials
never share mutable state, so a failed trial cannot contaminate the rest.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..artifacts.dialect import DialectRunner
from ..artifacts.init_schemes import init_many_function, init_one_function, task_background
from ..artifacts.catalog import pong_catalog_artifact, pong_margin_catalog
from ..artifacts.model import Artifact, ArtifactDelta, apply_delta, execute, save_artifact
from ..environments import EnvConfig, EpochSampler, generate_text_tasks, make_env
from ..environments.splits import split_fixed, split_fraction
from ..environments.text_tasks import TextTask
from ..errors import (
    ConfigError,
    DeltaValidationError,
    ExecutionError,
    OptimizerError,
)
from ..feedback import FeedbackRecord, correctness_guide, extract_choice, game_feedback
from ..optimizer import (
    HttpLLMBackend,
    NullBackend,
    OptimizerMemory,
    ScriptedHillClimbBackend,
    StepRecord,
    render_context,
)
from ..templates import (
    LearningGraph,
    template_batch,
    template_episodic,
    template_interactive,
    truncate_horizon,
)
from ..trace_core import WorkflowGraph, attach_feedback, begin_graph
from .checkpoint import Checkpoint, select_checkpoint
from .config import ExperimentConfig

CURVE_HEADER = "step,train_metric,val_metric,stage"


@dataclass(frozen=True)
class CurveRow:
    step: int
    train_metric: float
    val_metric: float
    stage: str

    def csv(self) -> str:
        return f"{self.step},{self.train_metric:.6f},{self.val_metric:.6f},{self.stage}"


@dataclass(frozen=True)
class TrialResult:
    seed: int
    rows: tuple[CurveRow, ...] = ()
    checkpoints: tuple[Checkpoint, ...] = ()
    best_step: int = 0
    final_score: float = math.nan
    baseline_score: float = math.nan
    examples_consumed: int = 0
    epochs: int = 0
    failed: bool = False
    error: str = ""


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    trials: tuple[TrialResult, ...]
    metric_name: str
    summary: str

    def completed(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.failed]


def _mix(*parts: int) -> int:
    h = 0
    for p in parts:
        h = (h * 1_000_003 + p + 0x9E3779B9) % (2 ** 31)
    return h


def mean_se(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    if n == 0:
        return math.nan, math.nan
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def initial_artifact(config: ExperimentConfig) -> Artifact:
    if config.artifact_init == "catalog":
        if config.task != "pong":
            raise ConfigError("catalog initialization is defined for pong only")
        return pong_catalog_artifact()
    if config.artifact_init == "one_function":
        return init_one_function(config.task)
    return init_many_function(config.task)


def make_backend(config: ExperimentConfig, log_dir: Optional[Path] = None):
    if config.backend == "null":
        return NullBackend()
    if config.backend == "scripted":
        if config.artifact_init != "catalog":
            raise ConfigError("scripted backend requires artifact_init = 'catalog'")
        return ScriptedHillClimbBackend(pong_margin_catalog(), seed=config.seed)
    if not config.backend_url or not config.backend_model:
        raise ConfigError("http backend requires backend_url and backend_model")
    return HttpLLMBackend(
        base_url=config.backend_url,
        model=config.backend_model,
        api_key_env=config.api_key_env,
        log_dir=str(log_dir) if log_dir else None,
    )


# --- Policy execution ------------------------------------------------------


def _run_policy(artifact: Artifact, obs, rng: random.Random, fuel_limit: int):
    """Evaluate the wiring without building a trace (fast path)."""
    values = {artifact.input_var: obs}
    for call in artifact.wiring:
        slot = artifact.slot(call.slot)
        env = {p: values[a] for p, a in zip(slot.params, call.args)}
        runner = DialectRunner(fuel_limit=fuel_limit, rng=rng, slot=slot.name)
        values[call.out] = runner.run(slot.body, env)
    return values[artifact.output_var]


def _coerce_action(action, legal: frozenset) -> int:
    if isinstance(action, bool) or not isinstance(action, (int, float)):
        return 0
    action = int(action)
    return action if action in legal else 0


def _stub_graph(artifact: Artifact, input_value) -> WorkflowGraph:
    from ..artifacts.model import serialize_value

    return begin_graph(serialize_value(input_value), slots=artifact.bodies()).finish()


@dataclass
class RolloutResult:
    episode_return: float
    steps: int
    traces: list[WorkflowGraph] = field(default_factory=list)
    error: str = ""


def rollout(artifact: Artifact, config: ExperimentConfig, env_seed: int,
            policy_seed: int, max_steps: int, keep_traces: int = 0) -> RolloutResult:
    """Run one arcade episode; optionally keep the last ``keep_traces``
    per-step workflow graphs for the learning context."""
    env = make_env(EnvConfig(
        game=config.task,
        seed=env_seed,
        action_repeat=config.action_repeat,
        sticky_action_prob=config.sticky_action_prob,
        max_steps=max_steps,
        enemy_speed_cap=config.enemy_speed_cap,
    ))
    rng = random.Random(policy_seed)
    obs = env.reset()
    total = 0.0
    steps = 0
    traces: deque = deque(maxlen=max(keep_traces, 1))
    error = ""
    done = False
    while not done:
        try:
            if keep_traces:
                raw_action, graph = execute(artifact, obs, config.fuel_limit, rng)
                traces.append(graph)
            else:
                raw_action = _run_policy(artifact, obs, rng, config.fuel_limit)
        except ExecutionError as exc:
            error = str(exc)
            break
        action = _coerce_action(raw_action, env.legal_actions)
        obs, reward, done = env.step(action)
        total += reward
        steps += 1
    kept = list(traces) if keep_traces else []
    if keep_traces and not kept:
        kept = [_stub_graph(artifact, obs)]  # failed before the first step
    return RolloutResult(total, steps, kept, error)


def run_text_example(artifact: Artifact, task: TextTask, policy_seed: int,
                     fuel_limit: int) -> tuple[str, FeedbackRecord, WorkflowGraph]:
    rng = random.Random(policy_seed)
    try:
        out, graph = execute(artifact, task.prompt, fuel_limit, rng)
        predicted = str(out)
        error = ""
    except ExecutionError as exc:
        graph = _stub_graph(artifact, task.prompt)
        predicted = ""
        error = str(exc)
    if task.kind == "multiple_choice":
        # golds are bare letters; tolerate "(B)"-style answers
        predicted = extract_choice(predicted).strip("()")
    if error:
        feedback = FeedbackRecord(
            score=0.0,
            message=f"Execution failed: {error} Revise the failing slot body.",
            stage="incorrect",
        )
    else:
        feedback = correctness_guide(predicted, task.gold)
    return predicted, feedback, attach_feedback(graph, feedback)


# --- Validation and final evaluation ---------------------------------------


def _arcade_eval(artifact: Artifact, config: ExperimentConfig, episodes: int,
                 max_steps: int, seed_base: int) -> float:
    returns = []
    for ep in range(episodes):
        result = rollout(artifact, config, env_seed=_mix(seed_base, ep),
                         policy_seed=_mix(seed_base, ep, 1), max_steps=max_steps)
        returns.append(result.episode_return)
    return sum(returns) / len(returns)


def _text_accuracy(artifact: Artifact, tasks: Sequence[TextTask],
                   fuel_limit: int, seed_base: int) -> float:
    correct = 0
    for i, task in enumerate(tasks):
        predicted, _, _ = run_text_example(artifact, task, _mix(seed_base, i), fuel_limit)
        if predicted == task.gold:
            correct += 1
    return correct / len(tasks)


def evaluate_final(artifact: Artifact, config: ExperimentConfig,
                   trial_seed: int, test_tasks: Optional[Sequence[TextTask]] = None) -> float:
    """Held-out evaluation: mean episode return over the eval protocol for
    arcade tasks, test accuracy for text tasks."""
    if config.is_arcade:
        return _arcade_eval(artifact, config, config.eval_episodes,
                            config.eval_max_steps, _mix(trial_seed, 900_001))
    if not test_tasks:
        raise ConfigError("text evaluation needs a test set")
    return _text_accuracy(artifact, test_tasks, config.fuel_limit,
                          _mix(trial_seed, 900_002))


# --- One trial --------------------------------------------------------------


def _arcade_experience(artifact: Artifact, config: ExperimentConfig,
                       trial_seed: int, update: int) -> tuple[LearningGraph, float, FeedbackRecord]:
    keep = config.horizon.effective_length
    result = rollout(
        artifact, config,
        env_seed=_mix(trial_seed, update),
        policy_seed=_mix(trial_seed, update, 7),
        max_steps=config.train_max_steps,
        keep_traces=keep,
    )
    feedback = game_feedback(config.task, result.episode_return)
    if result.error:
        feedback = FeedbackRecord(
            score=result.episode_return,
            message=f"{feedback.message} The episode ended early with an "
                    f"execution failure: {result.error}",
            stage=feedback.stage,
        )
    if config.template == "interactive":
        member = attach_feedback(result.traces[-1], feedback)
        return template_interactive(member), result.episode_return, feedback
    lg = template_episodic(result.traces, feedback)
    return truncate_horizon(lg, config.horizon), result.episode_return, feedback


def _text_experience(artifact: Artifact, config: ExperimentConfig,
                     sampler: EpochSampler, trial_seed: int,
                     update: int) -> tuple[LearningGraph, float, FeedbackRecord]:
    k = config.batch_size if config.template == "batch" else 1
    batch = sampler.draw(k)
    graphs = []
    scores = []
    for i, task in enumerate(batch):
        predicted, feedback, graph = run_text_example(
            artifact, task, _mix(trial_seed, update, i), config.fuel_limit)
        graphs.append(graph)
        scores.append(feedback.score)
    train_metric = sum(scores) / len(scores)
    if config.template == "batch":
        lg = template_batch(graphs)
        return lg, train_metric, lg.aggregate_feedback
    lg = template_interactive(graphs[0])
    return lg, train_metric, graphs[0].feedback


def run_trial(config: ExperimentConfig, trial_seed: int,
              trial_dir: Optional[Path] = None) -> TrialResult:
    if trial_dir is not None:
        (trial_dir / "artifacts").mkdir(parents=True, exist_ok=True)
        (trial_dir / "contexts").mkdir(parents=True, exist_ok=True)
    backend = make_backend(config, trial_dir / "optimizer" if trial_dir else None)
    artifact = initial_artifact(config)
    memory = OptimizerMemory(config.memory_capacity)
    background = task_background(config.task)
    metric_name = "episode_return" if config.is_arcade else "accuracy"

    sampler = None
    val_tasks: list[TextTask] = []
    test_tasks: list[TextTask] = []
    train_tasks: list[TextTask] = []
    if not config.is_arcade:
        tasks = generate_text_tasks(config.task, config.dataset_size, config.dataset_seed)
        if config.split == "fixed":
            train_tasks, val_tasks, test_tasks = split_fixed(tasks)
        else:
            train_tasks, val_tasks = split_fraction(
                tasks, seed=config.dataset_seed, train_fraction=config.train_fraction)
            test_tasks = val_tasks
        sampler = EpochSampler(train_tasks, seed=trial_seed)

    def validation(art: Artifact) -> float:
        if config.is_arcade:
            return _arcade_eval(art, config, config.val_episodes,
                                config.val_max_steps, _mix(trial_seed, 500_000))
        return _text_accuracy(art, val_tasks, config.fuel_limit, _mix(trial_seed, 500_001))

    def training_metric(art: Artifact) -> float:
        if config.is_arcade:
            return rollout(art, config, env_seed=_mix(trial_seed, 0),
                           policy_seed=_mix(trial_seed, 0, 7),
                           max_steps=config.train_max_steps).episode_return
        return _text_accuracy(art, train_tasks, config.fuel_limit, _mix(trial_seed, 500_002))

    def snapshot(step: int, art: Artifact):
        if trial_dir is not None:
            save_artifact(art, trial_dir / "artifacts" / f"step_{step:03d}.txt")

    rows: list[CurveRow] = []
    checkpoints: list[Checkpoint] = []

    t0 = training_metric(artifact)
    v0 = validation(artifact)
    stage0 = game_feedback(config.task, t0).stage if config.is_arcade else "info"
    rows.append(CurveRow(0, t0, v0, stage0))
    checkpoints.append(Checkpoint(0, artifact, {metric_name: t0}, {metric_name: v0}))
    snapshot(0, artifact)

    for update in range(1, config.total_updates + 1):
        if config.is_arcade:
            lg, train_metric, feedback = _arcade_experience(
                artifact, config, trial_seed, update)
        else:
            lg, train_metric, feedback = _text_experience(
                artifact, config, sampler, trial_seed, update)
        ctx = render_context(lg, artifact, memory, background)
        if trial_dir is not None:
            (trial_dir / "contexts" / f"step_{update:03d}.txt").write_text(
                ctx.text, encoding="utf-8")
        try:
            delta = backend.propose(ctx)
        except DeltaValidationError as exc:
            delta = ArtifactDelta({}, rationale=f"Rejected proposal: {exc}")
        except OptimizerError as exc:
            return TrialResult(seed=trial_seed, rows=tuple(rows),
                               checkpoints=tuple(checkpoints),
                               failed=True, error=str(exc))
        try:
            artifact = apply_delta(artifact, delta)
            summary = delta.rationale or "No rationale given."
        except DeltaValidationError as exc:
            # a rejected delta still consumes the update's budget
            summary = f"Rejected delta: {exc}"
        val = validation(artifact)
        rows.append(CurveRow(update, train_metric, val, feedback.stage))
        checkpoints.append(Checkpoint(update, artifact,
                                      {metric_name: train_metric},
                                      {metric_name: val}))
        snapshot(update, artifact)
        memory = memory.push(StepRecord(
            summary=summary, score=val,
            params=getattr(backend, "last_proposed_params", None)))

    best = select_checkpoint(checkpoints, metric_name, direction="max")
    final_score = evaluate_final(best.artifact, config, trial_seed, test_tasks)
    baseline_score = evaluate_final(checkpoints[0].artifact, config, trial_seed, test_tasks)

    result = TrialResult(
        seed=trial_seed,
        rows=tuple(rows),
        checkpoints=tuple(checkpoints),
        best_step=best.step,
        final_score=final_score,
        baseline_score=baseline_score,
        examples_consumed=sampler.consumed if sampler else 0,
        epochs=sampler.epochs if sampler else 0,
    )
    if trial_dir is not None:
        write_curve(result.rows, trial_dir / "curve.csv")
    return result


def write_curve(rows: Sequence[CurveRow], path: Path) -> None:
    lines = [CURVE_HEADER] + [r.csv() for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- Whole experiment -------------------------------------------------------


def aggregate_rows(trials: Sequence[TrialResult]) -> list[str]:
    """Aggregate CSV lines: per-step mean and standard error across trials."""
    lines = ["step,mean_train,se_train,mean_val,se_val"]
    completed = [t for t in trials if not t.failed]
    if not completed:
        return lines
    steps = min(len(t.rows) for t in completed)
    for i in range(steps):
        train_mean, train_se = mean_se([t.rows[i].train_metric for t in completed])
        val_mean, val_se = mean_se([t.rows[i].val_metric for t in completed])
        lines.append(f"{completed[0].rows[i].step},{train_mean:.6f},{train_se:.6f},"
                     f"{val_mean:.6f},{val_se:.6f}")
    return lines


def _summary_text(config: ExperimentConfig, trials: Sequence[TrialResult],
                  metric_name: str) -> str:
    lines = [
        f"task: {config.task}",
        f"template: {config.template}",
        f"backend: {config.backend}",
        f"trials: {len(trials)}",
        f"metric: {metric_name}",
    ]
    for i, t in enumerate(trials):
        if t.failed:
            lines.append(f"trial {i} (seed {t.seed}): FAILED ({t.error})")
        else:
            lines.append(
                f"trial {i} (seed {t.seed}): baseline {t.baseline_score:.6f} "
                f"-> final {t.final_score:.6f} (best step {t.best_step})")
    finals = [t.final_score for t in trials if not t.failed]
    if finals:
        mean, se = mean_se(finals)
        lines.append(f"final score: {mean:.6f} +/- {se:.6f} over {len(finals)} trials")
    else:
        lines.append("final score: n/a (all trials failed)")
    return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig,
                   outdir: Optional[Path] = None) -> ExperimentReport:
    """Run every trial, then write curves, aggregates, and a summary.

    Byte-identical output for the same config and seeds under deterministic
    backends.
    """
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        from .config import config_to_toml

        (outdir / "config.toml").write_text(config_to_toml(config), encoding="utf-8")
    metric_name = "episode_return" if config.is_arcade else "accuracy"
    trials = []
    for i, trial_seed in enumerate(config.trial_seeds()):
        trial_dir = outdir / f"trial_{i:03d}" if outdir is not None else None
        trials.append(run_trial(config, trial_seed, trial_dir))
    summary = _summary_text(config, trials, metric_name)
    report = ExperimentReport(config=config, trials=tuple(trials),
                              metric_name=metric_name, summary=summary)
    if outdir is not None:
        (outdir / "aggregate.csv").write_text(
            "\n".join(aggregate_rows(trials)) + "\n", encoding="utf-8")
        (outdir / "summary.txt").write_text(summary, encoding="utf-8")
    return report
