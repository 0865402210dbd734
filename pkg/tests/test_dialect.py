import random

import pytest

from looplab.artifacts.dialect import DialectRunner, parse_body, run_body
from looplab.errors import ExecutionError, FuelExhausted


class TestParseValidation:
    @pytest.mark.parametrize("body", [
        "import os",
        "def f():\n    pass",
        "class C:\n    pass",
        "lambda x: x",
        "open('/etc/passwd')",
        "obs.__class__",
        "with obs as x:\n    pass",
        "x = [i for i in range(3)]",
        "print(1)",
        "x, y = 1, 2",
        "global x",
        "exec('1')",
    ])
    def test_disallowed_constructs_rejected(self, body):
        with pytest.raises(ExecutionError):
            parse_body(body)

    @pytest.mark.parametrize("body", [
        "return 1",
        "x = 1\nreturn x + 2",
        "if a > 0:\n    return a\nreturn -a",
        "for i in range(3):\n    pass\nreturn 0",
        "while x > 0:\n    x = x - 1\nreturn x",
        "return obs.get('Ball')",
        "return choice([1, 2])",
        "d = {}\nd['k'] = 1\nreturn d",
        "return 1 if x > 0 else 0",
    ])
    def test_allowed_bodies_parse(self, body):
        parse_body(body)

    def test_syntax_error_reports_line(self):
        with pytest.raises(ExecutionError) as excinfo:
            parse_body("x = \nreturn x", slot="s")
        assert excinfo.value.position == 1

    def test_non_whitelisted_method_rejected(self):
        with pytest.raises(ExecutionError):
            parse_body("return obs.pop('x')")


class TestEvaluation:
    def run(self, body, **env):
        return run_body(body, env, rng=random.Random(0))

    def test_arithmetic(self):
        assert self.run("return (2 + 3) * 4 - 1") == 19

    def test_comparison_chain(self):
        assert self.run("return 1 < x < 5", x=3) is True
        assert self.run("return 1 < x < 5", x=7) is False

    def test_short_circuit_and(self):
        # the right operand would divide by zero; and must not evaluate it
        assert self.run("return False and 1 / 0") is False

    def test_short_circuit_or(self):
        assert self.run("return True or 1 / 0") is True

    def test_subscript_and_slice(self):
        assert self.run("return xs[1:3]", xs=[0, 1, 2, 3]) == [1, 2]
        assert self.run("return d['k']", d={"k": 9}) == 9

    def test_dict_methods_return_lists(self):
        out = self.run("return d.items()", d={"a": 1})
        assert out == [("a", 1)]

    def test_string_methods(self):
        assert self.run("return s.split(':')[1].strip()", s="a: b") == "b"
        assert self.run("return s.startswith('Bul')", s="Bullet0") is True

    def test_while_loop(self):
        assert self.run("x = 0\nwhile x < 5:\n    x = x + 1\nreturn x") == 5

    def test_for_loop_with_break(self):
        body = "t = 0\nfor i in range(10):\n    if i == 3:\n        break\n    t = t + i\nreturn t"
        assert self.run(body) == 3

    def test_unknown_name_raises(self):
        with pytest.raises(ExecutionError):
            self.run("return nope")

    def test_division_by_zero_wrapped(self):
        with pytest.raises(ExecutionError):
            self.run("return 1 / 0")

    def test_missing_return_gives_none(self):
        assert self.run("x = 1") is None

    def test_choice_uses_seeded_rng(self):
        seq = [run_body("return choice([1, 2, 3, 4])", {}, rng=random.Random(9))
               for _ in range(5)]
        again = [run_body("return choice([1, 2, 3, 4])", {}, rng=random.Random(9))
                 for _ in range(5)]
        assert seq == again

    def test_augassign(self):
        assert self.run("x = 2\nx += 3\nreturn x") == 5

    def test_ifexp(self):
        assert self.run("return 'yes' if x > 0 else 'no'", x=1) == "yes"


class TestFuel:
    def test_infinite_loop_exhausts_exactly_at_limit(self):
        runner = DialectRunner(fuel_limit=100, slot="s")
        with pytest.raises(FuelExhausted):
            runner.run("while True:\n    pass", {})
        assert runner.steps_used == 100

    def test_cheap_body_stays_under_limit(self):
        runner = DialectRunner(fuel_limit=100)
        assert runner.run("return 1 + 1", {}) == 2
        assert runner.steps_used < 100

    def test_fuel_limit_must_be_positive(self):
        with pytest.raises(ExecutionError):
            DialectRunner(fuel_limit=0)

    def test_exhaustion_is_execution_error_subclass(self):
        assert issubclass(FuelExhausted, ExecutionError)


class TestDeterminism:
    def test_same_seed_same_result(self):
        body = "t = 0\nfor i in range(10):\n    t = t + choice([0, 1])\nreturn t"
        a = run_body(body, {}, rng=random.Random(5))
        b = run_body(body, {}, rng=random.Random(5))
        assert a == b

    def test_cached_parse_matches_fresh_parse(self):
        body = "return x * 2"
        first = run_body(body, {"x": 3})
        second = run_body(body, {"x": 4})  # same body hits the parse cache
        assert (first, second) == (6, 8)
