import random

import numpy as np
import pytest

from looplab.artifacts import pong_catalog_artifact
from looplab.errors import ConfigError
from looplab.harness import (
    Checkpoint,
    CheckpointError,
    ExperimentConfig,
    config_to_toml,
    detect_meta_overfit,
    load_config,
    mean_se,
    parse_override,
    rollout,
    run_experiment,
    run_trial,
    running_best,
    select_checkpoint,
    sweep,
)


def arcade_config(**kw):
    base = dict(task="pong", artifact_init="catalog", backend="scripted",
                template="episodic", total_updates=4, trials=1,
                train_max_steps=150, val_episodes=1, val_max_steps=150,
                eval_episodes=2, eval_max_steps=400)
    base.update(kw)
    return ExperimentConfig(**base)


def text_config(**kw):
    base = dict(task="boolean_eval", template="batch", batch_size=1,
                total_updates=15, trials=1, backend="null",
                dataset_size=40, split="fixed")
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text('task = "pong"\nmystery = 3\n')
        with pytest.raises(ConfigError, match="mystery"):
            load_config(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")

    def test_parse_error_names_file(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("task = \n")
        with pytest.raises(ConfigError, match="bad.toml"):
            load_config(path)

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text('task = "boolean_eval"\nbatch_size = 1\n')
        cfg = load_config(path, ["batch_size=3", "batch_size=5"])
        assert cfg.batch_size == 5

    def test_override_value_types(self):
        assert parse_override("trials=3") == ("trials", 3)
        assert parse_override("sticky_action_prob=0.25") == ("sticky_action_prob", 0.25)
        assert parse_override('task="pong"') == ("task", "pong")
        assert parse_override("task=pong") == ("task", "pong")

    def test_invariants_enforced(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(task="pong", trials=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(task="pong", template="batch", batch_size=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(task="pong", template="episodic", rollout_length=0)

    def test_trial_seeds_default_and_explicit(self):
        cfg = ExperimentConfig(task="pong", trials=3, seed=10)
        assert cfg.trial_seeds() == (10, 11, 12)
        cfg = ExperimentConfig(task="pong", trials=2, seeds=(5, 9))
        assert cfg.trial_seeds() == (5, 9)

    def test_toml_round_trip(self, tmp_path):
        cfg = arcade_config(trials=2, seed=4)
        path = tmp_path / "c.toml"
        path.write_text(config_to_toml(cfg))
        assert load_config(path) == cfg


def argbest_oracle(values, direction):
    best_i = 0
    for i, v in enumerate(values):
        if (direction == "max" and v > values[best_i]) or \
           (direction == "min" and v < values[best_i]):
            best_i = i
    return best_i


class TestSelectCheckpoint:
    def make(self, values, name="f1"):
        art = pong_catalog_artifact()
        return [Checkpoint(i, art, {}, {name: v}) for i, v in enumerate(values)]

    def test_argmax(self):
        assert select_checkpoint(self.make([0.6, 0.8, 0.7]), "f1").step == 1

    def test_argmin_with_earliest_tie(self):
        cps = self.make([0.15, 0.13, 0.13], "rmse")
        assert select_checkpoint(cps, "rmse", direction="min").step == 1

    def test_matches_brute_force_oracle(self):
        rng = random.Random(0)
        for _ in range(1000):
            values = [rng.choice([0.0, 0.25, 0.5, 0.75, 1.0])
                      for _ in range(rng.randint(1, 12))]
            direction = rng.choice(["max", "min"])
            got = select_checkpoint(self.make(values), "f1", direction).step
            assert got == argbest_oracle(values, direction)

    def test_empty_rejected(self):
        with pytest.raises(CheckpointError):
            select_checkpoint([], "f1")

    def test_running_best_monotone(self):
        series = running_best([0.1, 0.5, 0.3, 0.7, 0.2])
        assert series == [0.1, 0.5, 0.5, 0.7, 0.7]
        assert all(a <= b for a, b in zip(series, series[1:]))


def window_trend_oracle(train, val, window):
    """Brute-force sliding-window slope scan."""
    def slope(ys):
        xs = np.arange(len(ys))
        return float(np.polyfit(xs, ys, 1)[0])

    for end in range(window - 1, len(train)):
        t = slope(train[end - window + 1:end + 1])
        v = slope(val[end - window + 1:end + 1])
        if t > 0 and v <= 0:
            return end
    return None


class TestOverfitDetector:
    def test_divergent_curves_flagged(self):
        train = [0.1 * i for i in range(10)]
        val = [1.0 - 0.1 * i for i in range(10)]
        report = detect_meta_overfit(train, val)
        assert report.flagged

    def test_equal_curves_never_flagged(self):
        rng = random.Random(2)
        for _ in range(50):
            curve = [rng.random() for _ in range(rng.randint(3, 20))]
            assert not detect_meta_overfit(curve, curve).flagged

    def test_fig_shape_flags_at_oracle_step(self):
        # train rises throughout; validation plateaus then declines
        train = [0.2 + 0.05 * i for i in range(16)]
        val = [0.5] * 8 + [0.5 - 0.04 * i for i in range(1, 9)]
        report = detect_meta_overfit(train, val, window=5)
        oracle = window_trend_oracle(train, val, 5)
        assert report.flagged
        assert report.step == oracle

    def test_random_curves_match_oracle(self):
        rng = random.Random(3)
        for _ in range(100):
            n = rng.randint(5, 25)
            train = [rng.random() for _ in range(n)]
            val = [rng.random() for _ in range(n)]
            report = detect_meta_overfit(train, val, window=5)
            assert report.step == window_trend_oracle(train, val, 5)

    def test_gap_series(self):
        report = detect_meta_overfit([1.0, 2.0, 3.0], [0.5, 1.0, 1.5], window=3)
        assert report.gap == (0.5, 1.0, 1.5)

    def test_short_curve_rejected(self):
        with pytest.raises(Exception):
            detect_meta_overfit([1.0], [1.0])


class TestTrialAccounting:
    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_epoch_identity(self, k):
        report = run_experiment(text_config(batch_size=k))
        trial = report.trials[0]
        assert trial.examples_consumed == 15 * k
        assert trial.epochs == k

    def test_curve_has_total_updates_plus_one_rows(self):
        report = run_experiment(text_config(total_updates=7))
        assert len(report.trials[0].rows) == 8
        assert report.trials[0].rows[0].step == 0

    def test_memory_capacity_respected(self):
        cfg = arcade_config(total_updates=8, memory_capacity=3)
        result = run_trial(cfg, trial_seed=0)
        assert not result.failed


class TestDeterminism:
    def test_same_seed_same_report(self):
        cfg = arcade_config(total_updates=5, seed=2)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert [t.rows for t in a.trials] == [t.rows for t in b.trials]
        assert a.summary == b.summary

    def test_run_directories_byte_identical(self, tmp_path):
        cfg = arcade_config(total_updates=3, seed=1)
        run_experiment(cfg, tmp_path / "a")
        run_experiment(cfg, tmp_path / "b")
        files_a = sorted(p.relative_to(tmp_path / "a")
                         for p in (tmp_path / "a").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(tmp_path / "b")
                         for p in (tmp_path / "b").rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (tmp_path / "a" / rel).read_bytes() == \
                (tmp_path / "b" / rel).read_bytes()


class TestFailureIsolation:
    def test_failed_trial_does_not_stop_others(self):
        class FlakyBackend:
            calls = 0

            def propose(self, ctx):
                from looplab.errors import OptimizerError
                raise OptimizerError("boom")

        import looplab.harness.runner as runner_mod
        cfg = text_config(trials=3, total_updates=2, backend="null")
        original = runner_mod.make_backend
        made = []

        def patched(config, log_dir=None):
            made.append(1)
            if len(made) == 2:
                return FlakyBackend()
            return original(config, log_dir)

        runner_mod.make_backend = patched
        try:
            report = run_experiment(cfg)
        finally:
            runner_mod.make_backend = original
        assert [t.failed for t in report.trials] == [False, True, False]
        # surviving trials are unaffected by the failed neighbor
        solo = run_experiment(text_config(trials=1, total_updates=2,
                                          seeds=(cfg.trial_seeds()[2],)))
        assert report.trials[2].rows == solo.trials[0].rows


class TestRunDirectory:
    def test_layout(self, tmp_path):
        cfg = arcade_config(total_updates=2)
        run_experiment(cfg, tmp_path)
        assert (tmp_path / "config.toml").exists()
        assert (tmp_path / "aggregate.csv").exists()
        assert (tmp_path / "summary.txt").exists()
        trial = tmp_path / "trial_000"
        assert (trial / "curve.csv").exists()
        assert (trial / "artifacts" / "step_000.txt").exists()
        assert (trial / "artifacts" / "step_002.txt").exists()
        assert (trial / "contexts" / "step_001.txt").exists()
        header = (trial / "curve.csv").read_text().splitlines()[0]
        assert header == "step,train_metric,val_metric,stage"

    def test_aggregate_se_zero_for_single_trial(self, tmp_path):
        cfg = text_config(total_updates=2)
        run_experiment(cfg, tmp_path)
        rows = (tmp_path / "aggregate.csv").read_text().splitlines()[1:]
        for row in rows:
            assert row.split(",")[2] == "0.000000"


class TestEvaluateProtocol:
    def test_baseline_pong_mean_return_nonpositive(self):
        cfg = arcade_config(eval_episodes=3, eval_max_steps=4000)
        result = rollout(pong_catalog_artifact(), cfg, env_seed=0,
                         policy_seed=0, max_steps=4000)
        assert result.episode_return <= 0


class TestSweep:
    def test_batch_axis_three_rows(self):
        cfg = text_config(trials=3, total_updates=3)
        report = sweep(cfg, "batch_size", [1, 3, 5])
        assert len(report.cells) == 3
        assert all(c.trials_completed == 3 for c in report.cells)
        assert "axis: batch_size" in report.table_text()

    def test_zero_variance_se(self):
        assert mean_se([0.1, 0.1, 0.1]) == (pytest.approx(0.1), pytest.approx(0.0))

    def test_partial_cells_on_error(self):
        cfg = text_config(trials=1, total_updates=1)
        report = sweep(cfg, "artifact_init", ["many_function", "catalog"])
        ok, bad = report.cells
        assert not ok.failed
        assert bad.failed  # catalog init is pong-only
        assert report.best_value() == "many_function"

    def test_unknown_axis_rejected(self):
        with pytest.raises(ConfigError):
            sweep(text_config(), "learning_rate", [1])

    def test_horizon_axis(self):
        cfg = arcade_config(trials=1, total_updates=2)
        report = sweep(cfg, "horizon", ["one_step", "multi_step"])
        assert [c.value for c in report.cells] == ["one_step", "multi_step"]
        assert not any(c.failed for c in report.cells)
