"""Deterministic rendering of learning graphs into optimizer-facing text.

The rendered context is a pure function of (learning graph, artifact,
memory, background): same inputs, byte-identical text.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..artifacts.model import Artifact
from ..errors import TemplateError
from ..templates import LearningGraph
from ..trace_core import ParamNode, ValueNode, WorkflowGraph
from .memory import OptimizerMemory


def render_trace(g: WorkflowGraph) -> str:
    """Render one workflow graph: input, steps in node order, output, feedback."""
    lines = ["Input:", g.input_payload]
    step_no = 0
    for node in g.nodes:
        if isinstance(node, ValueNode) and node.producer_op != "input":
            step_no += 1
            params = [
                g.node(p).slot_name
                for p in g.parents(node.id)
                if isinstance(g.node(p), ParamNode)
            ]
            suffix = f" (uses: {', '.join(params)})" if params else ""
            lines.append(f"Step {step_no}: {node.producer_op}{suffix}")
            lines.append(node.payload)
    lines.append("Output:")
    lines.append(g.output_payload)
    if g.feedback is not None:
        lines.append("Feedback:")
        lines.append(g.feedback.message)
    return "\n".join(lines)


def render_learning_graph(lg: LearningGraph) -> str:
    if lg.kind == "interactive":
        return render_trace(lg.members[0])
    if lg.kind == "batch":
        if len(lg.members) == 1:
            return render_trace(lg.members[0])
        k = len(lg.members)
        blocks = [
            f"Example {i} of {k}:\n{render_trace(g)}"
            for i, g in enumerate(lg.members, start=1)
        ]
        return "\n\n".join(blocks)
    if lg.kind == "episodic":
        blocks = [
            f"Time step {i}:\n{render_trace(g)}"
            for i, g in enumerate(lg.members, start=1)
        ]
        text = "\n\n".join(blocks)
        if lg.include_aggregate_output and lg.aggregate_output is not None:
            text += f"\n\nEpisode outputs:\n{lg.aggregate_output}"
        return text
    raise TemplateError(f"unknown learning graph kind: {lg.kind!r}")


def _aggregate_feedback_text(lg: LearningGraph) -> str:
    if lg.aggregate_feedback is not None:
        return lg.aggregate_feedback.message
    member = lg.members[0]
    if member.feedback is None:
        raise TemplateError("learning graph carries no feedback")
    return member.feedback.message


def render_artifact_slots(artifact: Artifact) -> str:
    blocks = []
    for slot in artifact.slots:
        blocks.append(
            "\n".join([
                f"Slot: {slot.name}" + ("" if slot.editable else " (fixed)"),
                f"Signature: {slot.signature}",
                "Documentation:",
                slot.documentation,
                "Body:",
                slot.body,
            ])
        )
    return "\n\n".join(blocks)


@dataclass(frozen=True)
class LearningContext:
    """Everything the optimizer sees for one update step."""

    background: str
    artifact: Artifact
    learning_graph: LearningGraph
    memory: OptimizerMemory
    text: str


def render_context(lg: LearningGraph, artifact: Artifact,
                   memory: OptimizerMemory, background: str) -> LearningContext:
    """Assemble the learning context in fixed section order: background,
    artifact slots, traces, feedback, memory (oldest first)."""
    sections = [
        "== Task ==",
        background,
        "",
        "== Current system ==",
        render_artifact_slots(artifact),
        "",
        "== Experience ==",
        render_learning_graph(lg),
        "",
        "== Feedback ==",
        _aggregate_feedback_text(lg),
    ]
    if len(memory) > 0:
        sections.append("")
        sections.append("== Past updates ==")
        for i, entry in enumerate(memory, start=1):
            sections.append(f"{i}. {entry.summary} (score: {entry.score})")
    text = "\n".join(sections)
    return LearningContext(background=background, artifact=artifact,
                           learning_graph=lg, memory=memory, text=text)
