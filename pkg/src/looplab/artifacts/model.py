"""Artifacts: the trainable system as named, editable slots.

An artifact is an ordered set of slots (signature, documentation, body) plus
a fixed wiring that says how slot calls feed each other. Executing an
artifact walks the wiring, evaluates each slot body in the sandboxed
dialect, and records one workflow-graph step per call.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional

from ..errors import ArtifactError, DeltaValidationError, ExecutionError
from ..trace_core import WorkflowGraph, begin_graph
from .dialect import DialectRunner, parse_body

ARTIFACT_SCHEMA = "looplab-artifact/1"

DEFAULT_FUEL_LIMIT = 10_000


@dataclass(frozen=True)
class Slot:
    """One named, optionally editable function-shaped component."""

    name: str
    params: tuple[str, ...]
    returns: str
    documentation: str
    body: str
    editable: bool = True

    @property
    def signature(self) -> str:
        return f"{self.name}({', '.join(self.params)}) -> {self.returns}"


@dataclass(frozen=True)
class WiringCall:
    """One step of the fixed workflow: call ``slot`` on ``args``, bind ``out``."""

    slot: str
    args: tuple[str, ...]
    out: str


@dataclass(frozen=True)
class Artifact:
    """Ordered slots plus immutable wiring; the wiring and slot signatures
    never change during optimization."""

    slots: tuple[Slot, ...]
    wiring: tuple[WiringCall, ...]
    input_var: str = "obs"

    def __post_init__(self):
        names = {s.name for s in self.slots}
        if len(names) != len(self.slots):
            raise ArtifactError("duplicate slot names")
        bound = {self.input_var}
        for call in self.wiring:
            if call.slot not in names:
                raise ArtifactError(f"wiring references undeclared slot {call.slot!r}")
            for arg in call.args:
                if arg not in bound:
                    raise ArtifactError(f"wiring argument {arg!r} is not bound yet")
            bound.add(call.out)

    def slot(self, name: str) -> Slot:
        for s in self.slots:
            if s.name == name:
                return s
        raise ArtifactError(f"unknown slot: {name!r}")

    def slot_names(self) -> list[str]:
        return [s.name for s in self.slots]

    def editable_slots(self) -> list[Slot]:
        return [s for s in self.slots if s.editable]

    @property
    def output_var(self) -> str:
        return self.wiring[-1].out

    def bodies(self) -> dict[str, str]:
        return {s.name: s.body for s in self.slots}


@dataclass(frozen=True)
class ArtifactDelta:
    """Per-slot replacement bodies; signatures and documentation are never
    part of a delta."""

    replacements: Mapping[str, str]
    rationale: str = ""

    @property
    def empty(self) -> bool:
        return not self.replacements


def serialize_value(value: Any) -> str:
    """Stable text form of a traced value; JSON where possible."""
    try:
        return json.dumps(value, sort_keys=True, separators=(", ", ": "))
    except (TypeError, ValueError):
        return repr(value)


def execute(artifact: Artifact, input_value: Any,
            fuel_limit: int = DEFAULT_FUEL_LIMIT,
            rng: Optional[random.Random] = None) -> tuple[Any, WorkflowGraph]:
    """Run the artifact on one input, producing the output and its trace.

    Execution is deterministic given (artifact, input, fuel, rng state).
    Slot errors propagate as :class:`ExecutionError` naming the slot.
    """
    rng = rng or random.Random(0)
    builder = begin_graph(serialize_value(input_value), slots=artifact.bodies())
    values: dict[str, Any] = {artifact.input_var: input_value}
    node_of: dict[str, int] = {artifact.input_var: builder.input_id}
    for call in artifact.wiring:
        slot = artifact.slot(call.slot)
        if len(call.args) != len(slot.params):
            raise ArtifactError(
                f"slot {slot.name!r} expects {len(slot.params)} args, wiring gives {len(call.args)}")
        env = {p: values[a] for p, a in zip(slot.params, call.args)}
        runner = DialectRunner(fuel_limit=fuel_limit, rng=rng, slot=slot.name)
        result = runner.run(slot.body, env)
        parents = [node_of[a] for a in call.args]
        node_id = builder.record_step(call.slot, parents, [call.slot],
                                      serialize_value(result))
        values[call.out] = result
        node_of[call.out] = node_id
    graph = builder.finish()
    return values[artifact.output_var], graph


def validate_delta(artifact: Artifact, delta: ArtifactDelta) -> None:
    """Reject deltas naming unknown or non-editable slots or unparseable bodies."""
    names = set(artifact.slot_names())
    for name, body in delta.replacements.items():
        if name not in names:
            raise DeltaValidationError(f"delta names unknown slot {name!r}")
        if not artifact.slot(name).editable:
            raise DeltaValidationError(f"slot {name!r} is not editable")
        try:
            parse_body(body, slot=name)
        except ExecutionError as exc:
            raise DeltaValidationError(f"replacement body rejected: {exc}") from exc


def apply_delta(artifact: Artifact, delta: ArtifactDelta) -> Artifact:
    """Return a new artifact with replaced bodies; everything else unchanged."""
    validate_delta(artifact, delta)
    if delta.empty:
        return artifact
    new_slots = tuple(
        replace(s, body=delta.replacements[s.name]) if s.name in delta.replacements else s
        for s in artifact.slots
    )
    return replace(artifact, slots=new_slots)


# --- Persistence -----------------------------------------------------------
#
# Versioned plain-text bundle, one section per slot, byte-stable ordering so
# checkpoints diff cleanly.


def artifact_to_text(artifact: Artifact) -> str:
    lines = [ARTIFACT_SCHEMA, f"@input {artifact.input_var}"]
    for call in artifact.wiring:
        lines.append(f"@wire {call.slot} ({', '.join(call.args)}) -> {call.out}")
    for slot in artifact.slots:
        lines.append(f"@slot {slot.name}")
        lines.append(f"@params {', '.join(slot.params)}")
        lines.append(f"@returns {slot.returns}")
        lines.append(f"@editable {1 if slot.editable else 0}")
        lines.append("@doc")
        lines.extend("| " + ln for ln in slot.documentation.splitlines())
        lines.append("@body")
        lines.extend("| " + ln for ln in slot.body.splitlines())
        lines.append("@end")
    return "\n".join(lines) + "\n"


def artifact_from_text(text: str) -> Artifact:
    lines = text.splitlines()
    if not lines or lines[0] != ARTIFACT_SCHEMA:
        raise ArtifactError(f"unsupported artifact schema: {lines[0] if lines else ''!r}")
    input_var = "obs"
    wiring: list[WiringCall] = []
    slots: list[Slot] = []
    i = 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("@input "):
            input_var = line[len("@input "):]
            i += 1
        elif line.startswith("@wire "):
            rest = line[len("@wire "):]
            name, rest = rest.split(" (", 1)
            args_text, out = rest.split(") -> ")
            args = tuple(a for a in (p.strip() for p in args_text.split(",")) if a)
            wiring.append(WiringCall(name, args, out))
            i += 1
        elif line.startswith("@slot "):
            name = line[len("@slot "):]
            params = tuple(p for p in (
                q.strip() for q in lines[i + 1][len("@params "):].split(",")) if p)
            returns = lines[i + 2][len("@returns "):]
            editable = lines[i + 3] == "@editable 1"
            i += 4
            if lines[i] != "@doc":
                raise ArtifactError("malformed artifact file: expected @doc")
            i += 1
            doc_lines = []
            while lines[i] != "@body":
                doc_lines.append(lines[i][2:])
                i += 1
            i += 1
            body_lines = []
            while lines[i] != "@end":
                body_lines.append(lines[i][2:])
                i += 1
            i += 1
            slots.append(Slot(name, params, returns,
                              "\n".join(doc_lines), "\n".join(body_lines), editable))
        elif not line.strip():
            i += 1
        else:
            raise ArtifactError(f"malformed artifact file at line {i + 1}: {line!r}")
    return Artifact(tuple(slots), tuple(wiring), input_var)


def save_artifact(artifact: Artifact, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(artifact_to_text(artifact))


def load_artifact(path) -> Artifact:
    with open(path, "r", encoding="utf-8") as fh:
        return artifact_from_text(fh.read())
