"""Fuel-bounded sandboxed dialect for editable slot bodies.

Slot bodies are written in a restricted, Python-shaped statement language:
arithmetic, comparisons, conditionals, bounded loops, container literals,
subscripting, and a short whitelist of pure builtins and methods. Bodies are
parsed with :mod:`ast` and interpreted directly; there is no I/O, no
attribute access beyond whitelisted methods, no function definitions (hence
no recursion), and every evaluation is charged against a fuel budget so all
executions terminate.

Random choice inside a body goes through ``choice(seq)``, which draws from a
seeded generator threaded in by the caller, keeping runs reproducible.
"""

from __future__ import annotations

import ast
import random
from typing import Any, Mapping, Optional

from ..errors import ExecutionError, FuelExhausted

_ALLOWED_METHODS = {"get", "items", "keys", "values", "startswith", "split", "strip"}

_BUILTINS = {
    "abs": abs,
    "min": min,
    "max": max,
    "len": len,
    "range": range,
    "int": int,
    "float": float,
    "bool": bool,
    "str": str,
    "round": round,
}

_ALLOWED_STMT = (
    ast.Expr, ast.Assign, ast.AugAssign, ast.If, ast.While, ast.For,
    ast.Return, ast.Break, ast.Continue, ast.Pass,
)

_ALLOWED_EXPR = (
    ast.BinOp, ast.UnaryOp, ast.BoolOp, ast.Compare, ast.Call, ast.Name,
    ast.Constant, ast.Subscript, ast.Attribute, ast.List, ast.Tuple,
    ast.Dict, ast.IfExp, ast.Slice, ast.Index if hasattr(ast, "Index") else ast.Slice,
)


def parse_body(body: str, slot: Optional[str] = None) -> ast.Module:
    """Parse and validate a slot body; raises ExecutionError on violations."""
    try:
        tree = ast.parse(body, mode="exec")
    except SyntaxError as exc:
        raise ExecutionError(
            f"slot {slot!r}: syntax error at line {exc.lineno}: {exc.msg}",
            slot=slot, position=exc.lineno,
        ) from exc
    for node in ast.walk(tree):
        if isinstance(node, ast.Module):
            continue
        if isinstance(node, _ALLOWED_STMT) or isinstance(node, _ALLOWED_EXPR):
            pass
        elif isinstance(node, (ast.Load, ast.Store, ast.operator, ast.unaryop,
                               ast.boolop, ast.cmpop, ast.keyword, ast.expr_context)):
            continue
        else:
            raise ExecutionError(
                f"slot {slot!r}: disallowed construct {type(node).__name__} "
                f"at line {getattr(node, 'lineno', '?')}",
                slot=slot, position=getattr(node, "lineno", None),
            )
        if isinstance(node, ast.Attribute):
            if node.attr not in _ALLOWED_METHODS:
                raise ExecutionError(
                    f"slot {slot!r}: attribute {node.attr!r} is not allowed",
                    slot=slot, position=node.lineno,
                )
        if isinstance(node, ast.Assign):
            if len(node.targets) != 1 or not isinstance(node.targets[0], (ast.Name, ast.Subscript)):
                raise ExecutionError(
                    f"slot {slot!r}: only simple assignment targets are allowed",
                    slot=slot, position=node.lineno,
                )
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            if node.func.id != "choice" and node.func.id not in _BUILTINS:
                raise ExecutionError(
                    f"slot {slot!r}: unknown function {node.func.id!r}",
                    slot=slot, position=node.lineno,
                )
    return tree


_PARSE_CACHE: dict[tuple[Optional[str], str], ast.Module] = {}


def _cached_parse(body: str, slot: Optional[str]) -> ast.Module:
    key = (slot, body)
    tree = _PARSE_CACHE.get(key)
    if tree is None:
        tree = parse_body(body, slot)
        if len(_PARSE_CACHE) > 4096:
            _PARSE_CACHE.clear()
        _PARSE_CACHE[key] = tree
    return tree


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class DialectRunner:
    """Evaluates one slot body within a fuel budget.

    ``steps_used`` reports exactly how many evaluation ticks were consumed,
    which equals ``fuel_limit`` when :class:`FuelExhausted` is raised.
    """

    def __init__(self, fuel_limit: int = 10_000, rng: Optional[random.Random] = None,
                 slot: Optional[str] = None):
        if fuel_limit <= 0:
            raise ExecutionError("fuel_limit must be positive", slot=slot)
        self.fuel_limit = fuel_limit
        self.steps_used = 0
        self.rng = rng or random.Random(0)
        self.slot = slot
        self._env: dict[str, Any] = {}

    def _tick(self):
        if self.steps_used >= self.fuel_limit:
            raise FuelExhausted(
                f"slot {self.slot!r}: fuel exhausted after {self.fuel_limit} steps",
                slot=self.slot,
            )
        self.steps_used += 1

    def run(self, body: str, env: Mapping[str, Any]) -> Any:
        tree = _cached_parse(body, self.slot)
        self._env = dict(env)
        try:
            self._exec_block(tree.body)
        except _Return as ret:
            return ret.value
        return None

    # -- statements --

    def _exec_block(self, stmts):
        for stmt in stmts:
            self._exec(stmt)

    def _exec(self, node):
        self._tick()
        if isinstance(node, ast.Expr):
            self._eval(node.value)
        elif isinstance(node, ast.Assign):
            value = self._eval(node.value)
            target = node.targets[0]
            if isinstance(target, ast.Name):
                self._env[target.id] = value
            else:
                container = self._eval(target.value)
                key = self._eval(target.slice)
                container[key] = value
        elif isinstance(node, ast.AugAssign):
            if not isinstance(node.target, ast.Name):
                raise ExecutionError("augmented assignment needs a name target", slot=self.slot)
            name = node.target.id
            current = self._lookup(name)
            self._env[name] = self._binop(node.op, current, self._eval(node.value))
        elif isinstance(node, ast.If):
            if self._eval(node.test):
                self._exec_block(node.body)
            else:
                self._exec_block(node.orelse)
        elif isinstance(node, ast.While):
            while True:
                self._tick()
                if not self._eval(node.test):
                    break
                try:
                    self._exec_block(node.body)
                except _Break:
                    break
                except _Continue:
                    continue
        elif isinstance(node, ast.For):
            if not isinstance(node.target, ast.Name):
                raise ExecutionError("loop target must be a name", slot=self.slot)
            iterable = self._eval(node.iter)
            for item in iterable:
                self._tick()
                self._env[node.target.id] = item
                try:
                    self._exec_block(node.body)
                except _Break:
                    break
                except _Continue:
                    continue
        elif isinstance(node, ast.Return):
            raise _Return(self._eval(node.value) if node.value is not None else None)
        elif isinstance(node, ast.Break):
            raise _Break()
        elif isinstance(node, ast.Continue):
            raise _Continue()
        elif isinstance(node, ast.Pass):
            pass
        else:
            raise ExecutionError(
                f"unsupported statement {type(node).__name__}", slot=self.slot)

    # -- expressions --

    def _lookup(self, name):
        if name in self._env:
            return self._env[name]
        raise ExecutionError(f"slot {self.slot!r}: unknown name {name!r}", slot=self.slot)

    def _eval(self, node):
        self._tick()
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "None":
                return None
            return self._lookup(node.id)
        if isinstance(node, ast.BinOp):
            return self._binop(node.op, self._eval(node.left), self._eval(node.right))
        if isinstance(node, ast.UnaryOp):
            operand = self._eval(node.operand)
            if isinstance(node.op, ast.USub):
                return -operand
            if isinstance(node.op, ast.UAdd):
                return +operand
            if isinstance(node.op, ast.Not):
                return not operand
            raise ExecutionError("unsupported unary operator", slot=self.slot)
        if isinstance(node, ast.BoolOp):
            if isinstance(node.op, ast.And):
                result = True
                for value in node.values:
                    result = self._eval(value)
                    if not result:
                        return result
                return result
            result = False
            for value in node.values:
                result = self._eval(value)
                if result:
                    return result
            return result
        if isinstance(node, ast.Compare):
            left = self._eval(node.left)
            for op, comparator in zip(node.ops, node.comparators):
                right = self._eval(comparator)
                if not self._compare(op, left, right):
                    return False
                left = right
            return True
        if isinstance(node, ast.Call):
            return self._call(node)
        if isinstance(node, ast.Subscript):
            container = self._eval(node.value)
            if isinstance(node.slice, ast.Slice):
                lo = self._eval(node.slice.lower) if node.slice.lower else None
                hi = self._eval(node.slice.upper) if node.slice.upper else None
                return container[lo:hi]
            return container[self._eval(node.slice)]
        if isinstance(node, ast.List):
            return [self._eval(e) for e in node.elts]
        if isinstance(node, ast.Tuple):
            return tuple(self._eval(e) for e in node.elts)
        if isinstance(node, ast.Dict):
            return {self._eval(k): self._eval(v) for k, v in zip(node.keys, node.values)}
        if isinstance(node, ast.IfExp):
            return self._eval(node.body) if self._eval(node.test) else self._eval(node.orelse)
        raise ExecutionError(
            f"unsupported expression {type(node).__name__}", slot=self.slot)

    def _call(self, node: ast.Call):
        if node.keywords:
            raise ExecutionError("keyword arguments are not allowed", slot=self.slot)
        args = [self._eval(a) for a in node.args]
        func = node.func
        if isinstance(func, ast.Name):
            if func.id == "choice":
                if len(args) != 1 or not args[0]:
                    raise ExecutionError("choice() needs one non-empty sequence", slot=self.slot)
                return self.rng.choice(args[0])
            if func.id in _BUILTINS:
                try:
                    return _BUILTINS[func.id](*args)
                except (TypeError, ValueError) as exc:
                    raise ExecutionError(
                        f"slot {self.slot!r}: {func.id}() failed: {exc}", slot=self.slot
                    ) from exc
            raise ExecutionError(f"unknown function {func.id!r}", slot=self.slot)
        if isinstance(func, ast.Attribute):
            target = self._eval(func.value)
            name = func.attr
            if name not in _ALLOWED_METHODS:
                raise ExecutionError(f"method {name!r} is not allowed", slot=self.slot)
            method = getattr(target, name, None)
            if method is None:
                raise ExecutionError(
                    f"value of type {type(target).__name__} has no method {name!r}",
                    slot=self.slot)
            try:
                result = method(*args)
            except (TypeError, ValueError, AttributeError) as exc:
                raise ExecutionError(
                    f"slot {self.slot!r}: .{name}() failed: {exc}", slot=self.slot
                ) from exc
            if name in ("items", "keys", "values"):
                return list(result)
            return result
        raise ExecutionError("unsupported call form", slot=self.slot)

    def _binop(self, op, left, right):
        try:
            if isinstance(op, ast.Add):
                return left + right
            if isinstance(op, ast.Sub):
                return left - right
            if isinstance(op, ast.Mult):
                return left * right
            if isinstance(op, ast.Div):
                return left / right
            if isinstance(op, ast.FloorDiv):
                return left // right
            if isinstance(op, ast.Mod):
                return left % right
            if isinstance(op, ast.Pow):
                if isinstance(right, (int, float)) and abs(right) > 64:
                    raise ExecutionError("exponent too large", slot=self.slot)
                return left ** right
        except ZeroDivisionError as exc:
            raise ExecutionError(f"slot {self.slot!r}: division by zero", slot=self.slot) from exc
        except TypeError as exc:
            raise ExecutionError(f"slot {self.slot!r}: type error: {exc}", slot=self.slot) from exc
        raise ExecutionError("unsupported binary operator", slot=self.slot)

    def _compare(self, op, left, right):
        if isinstance(op, ast.Eq):
            return left == right
        if isinstance(op, ast.NotEq):
            return left != right
        if isinstance(op, ast.Lt):
            return left < right
        if isinstance(op, ast.LtE):
            return left <= right
        if isinstance(op, ast.Gt):
            return left > right
        if isinstance(op, ast.GtE):
            return left >= right
        if isinstance(op, ast.In):
            return left in right
        if isinstance(op, ast.NotIn):
            return left not in right
        if isinstance(op, ast.Is):
            return left is right
        if isinstance(op, ast.IsNot):
            return left is not right
        raise ExecutionError("unsupported comparison", slot=self.slot)


def run_body(body: str, env: Mapping[str, Any], fuel_limit: int = 10_000,
             rng: Optional[random.Random] = None, slot: Optional[str] = None) -> Any:
    """Convenience wrapper: parse, validate, and evaluate one body."""
    return DialectRunner(fuel_limit=fuel_limit, rng=rng, slot=slot).run(body, env)
