import itertools
import random

import pytest

from looplab.artifacts import (
    Artifact,
    ArtifactDelta,
    Slot,
    WiringCall,
    apply_delta,
    execute,
    init_many_function,
    init_one_function,
    load_artifact,
    pong_catalog_artifact,
    pong_margin_catalog,
    save_artifact,
    serialize_value,
    task_background,
)
from looplab.artifacts.init_schemes import DOC_JOINER
from looplab.artifacts.model import artifact_from_text, artifact_to_text, validate_delta
from looplab.errors import ArtifactError, DeltaValidationError, ExecutionError, OptimizerError


def tiny_artifact():
    return Artifact(
        slots=(
            Slot("double", ("x",), "int", "Double the input.", "return x * 2"),
            Slot("inc", ("y",), "int", "Add one.", "return y + 1"),
        ),
        wiring=(
            WiringCall("double", ("obs",), "d"),
            WiringCall("inc", ("d",), "out"),
        ),
        input_var="obs",
    )


class TestArtifactModel:
    def test_duplicate_slot_names_rejected(self):
        with pytest.raises(ArtifactError):
            Artifact(
                slots=(Slot("a", ("x",), "int", "", "return x"),
                       Slot("a", ("x",), "int", "", "return x")),
                wiring=(WiringCall("a", ("obs",), "o"),),
            )

    def test_unbound_wiring_arg_rejected(self):
        with pytest.raises(ArtifactError):
            Artifact(
                slots=(Slot("a", ("x",), "int", "", "return x"),),
                wiring=(WiringCall("a", ("mystery",), "o"),),
            )

    def test_undeclared_slot_rejected(self):
        with pytest.raises(ArtifactError):
            Artifact(slots=(), wiring=(WiringCall("ghost", ("obs",), "o"),))

    def test_signature(self):
        slot = Slot("f", ("a", "b"), "int", "", "return a")
        assert slot.signature == "f(a, b) -> int"


class TestExecute:
    def test_value_and_trace(self):
        out, graph = execute(tiny_artifact(), 5)
        assert out == 11
        # one step per wiring call, each with a param snapshot
        steps = [n for n in graph.value_nodes() if n.producer_op != "input"]
        assert [n.producer_op for n in steps] == ["double", "inc"]
        assert len(graph.param_nodes()) == 2

    def test_param_snapshots_hold_bodies(self):
        _, graph = execute(tiny_artifact(), 1)
        snaps = {n.slot_name: n.snapshot for n in graph.param_nodes()}
        assert snaps == {"double": "return x * 2", "inc": "return y + 1"}

    def test_deterministic_given_seed(self):
        art = Artifact(
            slots=(Slot("pick", ("x",), "int", "", "return choice([1, 2, 3])"),),
            wiring=(WiringCall("pick", ("obs",), "out"),),
        )
        a = [execute(art, 0, rng=random.Random(4))[0] for _ in range(5)]
        b = [execute(art, 0, rng=random.Random(4))[0] for _ in range(5)]
        assert a == b

    def test_slot_error_propagates(self):
        art = Artifact(
            slots=(Slot("bad", ("x",), "int", "", "return 1 / 0"),),
            wiring=(WiringCall("bad", ("obs",), "out"),),
        )
        with pytest.raises(ExecutionError):
            execute(art, 0)

    def test_input_payload_serialized(self):
        _, graph = execute(tiny_artifact(), 7)
        assert graph.input_payload == serialize_value(7) == "7"


class TestDelta:
    def test_apply_replaces_body_only(self):
        art = tiny_artifact()
        out = apply_delta(art, ArtifactDelta({"double": "return x * 3"}))
        assert out.slot("double").body == "return x * 3"
        assert out.slot("double").documentation == art.slot("double").documentation
        assert execute(out, 5)[0] == 16

    def test_unknown_slot_rejected(self):
        with pytest.raises(DeltaValidationError):
            validate_delta(tiny_artifact(), ArtifactDelta({"ghost": "return 0"}))

    def test_non_editable_slot_rejected(self):
        art = Artifact(
            slots=(Slot("a", ("x",), "int", "", "return x", editable=False),),
            wiring=(WiringCall("a", ("obs",), "o"),),
        )
        with pytest.raises(DeltaValidationError):
            validate_delta(art, ArtifactDelta({"a": "return 1"}))

    def test_unparseable_body_rejected(self):
        with pytest.raises(DeltaValidationError):
            validate_delta(tiny_artifact(), ArtifactDelta({"double": "import os"}))

    def test_empty_delta_is_identity(self):
        art = tiny_artifact()
        assert apply_delta(art, ArtifactDelta({})) == art


class TestPersistence:
    def test_text_round_trip(self):
        art = tiny_artifact()
        assert artifact_from_text(artifact_to_text(art)) == art

    def test_round_trip_all_inits(self):
        for task in ("pong", "breakout", "invaders", "text"):
            for init in (init_many_function, init_one_function):
                art = init(task)
                assert artifact_from_text(artifact_to_text(art)) == art

    def test_file_round_trip(self, tmp_path):
        art = init_many_function("pong")
        path = tmp_path / "a.txt"
        save_artifact(art, path)
        assert load_artifact(path) == art
        assert path.read_text().splitlines()[0] == "looplab-artifact/1"

    def test_bad_schema_rejected(self):
        with pytest.raises(ArtifactError):
            artifact_from_text("other/1\n")


class TestInitSchemes:
    @pytest.mark.parametrize("task,n_slots", [
        ("pong", 2), ("breakout", 3), ("invaders", 3), ("text", 2),
    ])
    def test_many_function_slot_counts(self, task, n_slots):
        assert len(init_many_function(task).slots) == n_slots

    def test_one_function_single_slot(self):
        for task in ("pong", "breakout", "invaders", "text"):
            assert len(init_one_function(task).slots) == 1

    def test_one_function_doc_is_concatenation(self):
        for task in ("pong", "breakout", "invaders", "text"):
            many = init_many_function(task)
            one = init_one_function(task)
            expected = DOC_JOINER.join(s.documentation for s in many.slots)
            assert one.slots[0].documentation == expected

    def test_initial_bodies_execute(self):
        obs = {
            "Player": {"x": 140, "y": 100, "w": 4, "h": 16, "dx": 0, "dy": 0},
            "Ball": {"x": 80, "y": 110, "w": 2, "h": 4, "dx": 3, "dy": 2},
            "Enemy": {"x": 16, "y": 100, "w": 4, "h": 16, "dx": 0, "dy": 0},
        }
        for init in (init_many_function, init_one_function):
            action, _ = execute(init("pong"), obs, rng=random.Random(0))
            assert action in (0, 2, 3)

    def test_text_aliases_accepted(self):
        assert init_many_function("boolean_eval") == init_many_function("text")
        assert task_background("multiple_choice") == task_background("text")

    def test_unknown_task_rejected(self):
        with pytest.raises(ArtifactError):
            init_many_function("chess")


class TestCatalog:
    def test_match_inverts_render_for_all_assignments(self):
        catalog = pong_margin_catalog()
        for template in catalog.templates:
            names = [p.name for p in template.params]
            for combo in itertools.product(*(p.values for p in template.params)):
                assignment = dict(zip(names, combo))
                assert template.match(template.render(assignment)) == assignment

    def test_non_instance_body_rejected(self):
        catalog = pong_margin_catalog()
        art = init_many_function("pong")  # plain init bodies, not catalog renders
        with pytest.raises(OptimizerError):
            catalog.parameterization(art)

    def test_default_catalog_artifact_parameterization(self):
        catalog = pong_margin_catalog()
        params = catalog.parameterization(pong_catalog_artifact())
        assert params == {
            "predict_ball_trajectory": {"project": 0},
            "select_action": {"use_margin": 0, "margin": 0},
        }

    def test_catalog_bodies_execute(self):
        obs = {
            "Player": {"x": 140, "y": 60, "w": 4, "h": 16, "dx": 0, "dy": 0},
            "Ball": {"x": 100, "y": 110, "w": 2, "h": 4, "dx": 3, "dy": -2},
            "Enemy": {"x": 16, "y": 100, "w": 4, "h": 16, "dx": 0, "dy": 0},
        }
        tracking = pong_catalog_artifact({
            "predict_ball_trajectory": {"project": 1},
            "select_action": {"use_margin": 1, "margin": 2},
        })
        action, _ = execute(tracking, obs, rng=random.Random(0))
        assert action == 3  # paddle above the projected crossing, move down

    def test_flat_params_order(self):
        catalog = pong_margin_catalog()
        flat = [(slot, p.name) for slot, p in catalog.flat_params()]
        assert flat == [
            ("predict_ball_trajectory", "project"),
            ("select_action", "use_margin"),
            ("select_action", "margin"),
        ]
