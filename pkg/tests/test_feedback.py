import math
import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from looplab.errors import FeedbackError, MetricError
from looplab.feedback import (
    BREAKOUT_STAGES,
    HOUSING_R2_STAGES,
    INVADERS_STAGES,
    PONG_STAGES,
    SPACESHIP_F1_STAGES,
    STAGE_TABLES,
    FeedbackRecord,
    StageRow,
    StageTable,
    compute_metrics,
    correctness_guide,
    extract_choice,
    game_feedback,
    staged_feedback,
)

# --- Golden stage messages --------------------------------------------------

PONG_GOLDENS = [
    (-5, "low", "Your score is -5 points. Try to improve paddle positioning "
                "to prevent opponent scoring."),
    (0, "low", "Your score is 0 points. Try to improve paddle positioning "
               "to prevent opponent scoring."),
    (12, "medium", "Keep it up! You're scoring 12 points against the opponent "
                   "but you are still 9 points from winning the game. Try "
                   "improving paddle positioning to prevent opponent scoring."),
    (19, "high", "Good job! You're close to winning the game! You're scoring "
                 "19 points against the opponent, only 2 points short of "
                 "winning."),
    (20, "high", "Good job! You're close to winning the game! You're scoring "
                 "20 points against the opponent, only 1 point short of "
                 "winning."),
]

BREAKOUT_GOLDENS = [
    (-5, "low", {"score": -5},
     "Your score is -5 points. Try to improve paddle positioning to return "
     "the ball and avoid losing lives."),
    (0, "low", {"score": 0},
     "Your score is 0 points. Try to improve paddle positioning to return "
     "the ball and avoid losing lives."),
    (50, "medium", {"score": 50, "gap": 300},
     "Keep it up! You're scoring 50 points against the opponent but you are "
     "still 300 points from winning the game. Try improving paddle "
     "positioning to return the ball and avoid losing lives."),
    (320, "high", {"score": 320, "gap": 30},
     "Good job! You're close to winning the game! You're scoring 320 points "
     "against the opponent, try ensuring you return the ball, only 30 points "
     "short of winning."),
]

INVADERS_GOLDENS = [
    (70, "low", "Your average score is 70. Try to improve your strategy for "
                "shooting aliens and dodging projectiles."),
    (99, "low", "Your average score is 99. Try to improve your strategy for "
                "shooting aliens and dodging projectiles."),
    (100, "medium", "Good progress! Your average score is 100. Focus on "
                    "better timing for shooting and avoiding enemy projectiles."),
    (180, "medium", "Good progress! Your average score is 180. Focus on "
                    "better timing for shooting and avoiding enemy projectiles."),
    (300, "high", "Great job! You're performing well with an average score of "
                  "300. Try to improve your shooting accuracy and dodging."),
    (320, "high", "Great job! You're performing well with an average score of "
                  "320. Try to improve your shooting accuracy and dodging."),
]

SPACESHIP_GOLDENS = [
    (0.3, "low", "Model performance is poor. Try better feature engineering "
                 "and preprocessing."),
    (0.5, "medium", "Model is showing promise but needs improvement. "
                    "Consider class balancing techniques."),
    (0.7, "high", "Model is performing well. Fine-tune hyperparameters for "
                  "further improvements."),
    (0.8, "high", "Excellent performance! Focus on preventing overfitting."),
]

HOUSING_GOLDENS = [
    (-0.2, "low", "Model is performing worse than baseline. Focus on better "
                  "feature engineering and selection."),
    (0.0, "low", "Model is performing worse than baseline. Focus on better "
                 "feature engineering and selection."),
    (0.3, "low", "Model has poor predictive power. Try more advanced "
                 "preprocessing or different algorithms."),
    (0.5, "medium", "Model is improving but still has room for growth. "
                    "Consider feature interactions."),
    (0.7, "high", "Model is performing well. Fine-tune hyperparameters for "
                  "further improvements."),
]


class TestGoldenStages:
    @pytest.mark.parametrize("score,level,message", PONG_GOLDENS)
    def test_pong(self, score, level, message):
        record = game_feedback("pong", score)
        assert record.stage == level
        assert record.message == message

    @pytest.mark.parametrize("score,level,fill,message", BREAKOUT_GOLDENS)
    def test_breakout(self, score, level, fill, message):
        record = staged_feedback(score, BREAKOUT_STAGES, fill)
        assert record.stage == level
        assert record.message == message

    @pytest.mark.parametrize("score,level,message", INVADERS_GOLDENS)
    def test_invaders(self, score, level, message):
        record = game_feedback("invaders", score)
        assert record.stage == level
        assert record.message == message

    @pytest.mark.parametrize("value,level,message", SPACESHIP_GOLDENS)
    def test_spaceship_f1(self, value, level, message):
        record = staged_feedback(value, SPACESHIP_F1_STAGES)
        assert record.stage == level
        assert record.message == message

    @pytest.mark.parametrize("value,level,message", HOUSING_GOLDENS)
    def test_housing_r2(self, value, level, message):
        record = staged_feedback(value, HOUSING_R2_STAGES)
        assert record.stage == level
        assert record.message == message

    def test_pong_zero_is_low_not_medium(self):
        assert game_feedback("pong", 0).stage == "low"

    def test_nan_metric_lowest_stage_with_note(self):
        record = staged_feedback(math.nan, HOUSING_R2_STAGES)
        assert record.stage == "low"
        assert record.message.endswith("(metric undefined: constant target values)")


class TestStageTable:
    def test_every_table_is_total(self):
        for table in STAGE_TABLES.values():
            for value in (-1e9, -1.0, 0.0, 0.5, 1.0, 19.0, 100.0, 300.0, 1e9):
                assert table.select(value) is not None

    @given(st.floats(allow_nan=False, allow_infinity=False))
    @settings(max_examples=200, deadline=None)
    def test_exactly_one_stage_contains_any_value(self, value):
        for table in (PONG_STAGES, INVADERS_STAGES, HOUSING_R2_STAGES):
            hits = [r for r in table.rows if r.contains(value)]
            assert len(hits) == 1

    def test_gap_in_coverage_rejected(self):
        rows = (
            StageRow("a", "low", -math.inf, 0.0, False, True, "a"),
            StageRow("b", "high", 1.0, math.inf, False, True, "b"),
        )
        with pytest.raises(FeedbackError):
            StageTable("m", rows)

    def test_overlap_rejected(self):
        rows = (
            StageRow("a", "low", -math.inf, 0.0, False, True, "a"),
            StageRow("b", "high", 0.0, math.inf, True, True, "b"),
        )
        with pytest.raises(FeedbackError):
            StageTable("m", rows)

    def test_from_dict_round_trip(self):
        spec = {
            "metric": "score",
            "value_format": "int",
            "rows": [
                {"name": "low", "level": "low", "upper": 0.0,
                 "lower_closed": False, "upper_closed": True, "template": "low {score}"},
                {"name": "high", "level": "high", "lower": 0.0,
                 "lower_closed": False, "upper_closed": True, "template": "high {score}"},
            ],
        }
        table = StageTable.from_dict(spec)
        assert staged_feedback(3, table).message == "high 3"
        assert staged_feedback(-3, table).message == "low -3"


class TestExtractChoice:
    def scan_oracle(self, text):
        last = None
        for i in range(len(text) - 2):
            if text[i] == "(" and text[i + 2] == ")" and text[i + 1].isalpha():
                last = "(" + text[i + 1] + ")"
        return last if last is not None else text.strip()

    def test_last_token_wins(self):
        assert extract_choice("first (A) then (B)") == "(B)"

    def test_no_token_returns_trimmed(self):
        assert extract_choice("  plain answer \n") == "plain answer"

    def test_matches_scan_oracle(self):
        rng = random.Random(3)
        alphabet = "ab (A)(B)(C) x.(9) ()"
        for _ in range(200):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
            assert extract_choice(text) == self.scan_oracle(text)


class TestCorrectnessGuide:
    def test_correct(self):
        record = correctness_guide("42", "42")
        assert record.stage == "correct"
        assert record.message == "Correct."
        assert record.score == 1.0

    def test_incorrect_reveals_gold(self):
        record = correctness_guide("41", "42")
        assert record.stage == "incorrect"
        assert "42" in record.message
        assert record.score == 0.0


def confusion_oracle(preds, golds, positive=1):
    tp = sum(1 for p, g in zip(preds, golds) if p == positive and g == positive)
    fp = sum(1 for p, g in zip(preds, golds) if p == positive and g != positive)
    fn = sum(1 for p, g in zip(preds, golds) if p != positive and g == positive)
    acc = sum(1 for p, g in zip(preds, golds) if p == g) / len(golds)
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    return acc, prec, rec, f1


class TestMetrics:
    def test_classification_matches_confusion_oracle(self):
        rng = random.Random(11)
        for _ in range(500):
            n = rng.randint(1, 30)
            preds = [rng.randint(0, 1) for _ in range(n)]
            golds = [rng.randint(0, 1) for _ in range(n)]
            m = compute_metrics(preds, golds, "classification")
            acc, prec, rec, f1 = confusion_oracle(preds, golds)
            assert m.accuracy == pytest.approx(acc, abs=1e-12)
            assert m.precision == pytest.approx(prec, abs=1e-12)
            assert m.recall == pytest.approx(rec, abs=1e-12)
            assert m.f1 == pytest.approx(f1, abs=1e-12)

    @given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
                    min_size=1, max_size=30))
    @settings(max_examples=200, deadline=None)
    def test_rmse_dominates_mae(self, pairs):
        preds = [p for p, _ in pairs]
        golds = [g for _, g in pairs]
        m = compute_metrics(preds, golds, "regression")
        assert m.rmse >= m.mae - 1e-9

    def test_r2_nan_on_constant_golds(self):
        m = compute_metrics([1.0, 2.0], [5.0, 5.0], "regression")
        assert math.isnan(m.r2)

    def test_r2_one_for_perfect_fit(self):
        m = compute_metrics([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], "regression")
        assert m.r2 == pytest.approx(1.0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(MetricError):
            compute_metrics([1], [1, 2], "classification")

    def test_episode_return_sums_rewards(self):
        m = compute_metrics([1.0, -1.0, 1.0], [0, 0, 0], "episodes")
        assert m.episode_return == pytest.approx(1.0)


class TestFeedbackRecord:
    def test_unknown_stage_rejected(self):
        with pytest.raises(FeedbackError):
            FeedbackRecord(0.0, "m", "amazing")
