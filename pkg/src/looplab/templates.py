"""Learning templates: compose workflow graphs into the optimizer-facing
learning graph.

Three composition rules are supported: interactive (one trace), batch
(ordered concatenation of independent traces), and episodic (causally
chained traces with trajectory-level feedback and credit-horizon
truncation).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

from .errors import TemplateError
from .feedback import FeedbackRecord
from .trace_core import WorkflowGraph


@dataclass(frozen=True)
class HorizonPolicy:
    """How much of an episode the optimizer sees before each update."""

    mode: str  # "one_step" | "multi_step"
    rollout_length: int = 1

    def __post_init__(self):
        if self.mode not in ("one_step", "multi_step"):
            raise TemplateError(f"unknown horizon mode: {self.mode!r}")
        if self.mode == "multi_step" and self.rollout_length < 1:
            raise TemplateError("rollout_length must be positive")

    @property
    def effective_length(self) -> int:
        return 1 if self.mode == "one_step" else self.rollout_length


@dataclass(frozen=True)
class LearningGraph:
    """Composition of one or more workflow graphs under a template."""

    kind: str  # "interactive" | "batch" | "episodic"
    members: tuple[WorkflowGraph, ...]
    links: tuple[tuple[int, int], ...] = ()
    aggregate_output: Optional[str] = None
    aggregate_feedback: Optional[FeedbackRecord] = None
    include_aggregate_output: bool = False

    def __post_init__(self):
        if self.kind == "interactive" and len(self.members) != 1:
            raise TemplateError("interactive learning graph has exactly one member")
        if self.kind == "batch":
            if not self.members:
                raise TemplateError("batch learning graph needs members")
            if self.aggregate_output is None or self.aggregate_feedback is None:
                raise TemplateError("batch learning graph needs aggregates")
        if self.kind == "episodic" and len(self.links) != len(self.members) - 1:
            raise TemplateError("episodic links must chain consecutive members")


def template_interactive(g: WorkflowGraph) -> LearningGraph:
    """Single-experience template: the learning graph is the trace itself."""
    if g.feedback is None:
        raise TemplateError("interactive template requires feedback on the trace")
    return LearningGraph(kind="interactive", members=(g,))


def _join_outputs(members: Sequence[WorkflowGraph]) -> str:
    if len(members) == 1:
        return members[0].output_payload
    parts = []
    k = len(members)
    for i, g in enumerate(members, start=1):
        parts.append(f"Example {i} of {k}:\n{g.output_payload}")
    return "\n\n".join(parts)


def _join_feedback(members: Sequence[WorkflowGraph]) -> FeedbackRecord:
    feedbacks = [g.feedback for g in members]
    if len(feedbacks) == 1:
        return feedbacks[0]
    k = len(feedbacks)
    parts = [f"Example {i} of {k}:\n{fb.message}" for i, fb in enumerate(feedbacks, 1)]
    mean_score = sum(fb.score for fb in feedbacks) / k
    return FeedbackRecord(score=mean_score, message="\n\n".join(parts), stage="info")


def template_batch(graphs: Sequence[WorkflowGraph]) -> LearningGraph:
    """Aggregate independent experiences into one learning graph.

    Member order is preserved exactly; no deduplication or reordering.
    """
    graphs = tuple(graphs)
    if not graphs:
        raise TemplateError("batch template requires at least one trace")
    for g in graphs:
        if g.feedback is None:
            raise TemplateError("every batch member must carry feedback")
    return LearningGraph(
        kind="batch",
        members=graphs,
        aggregate_output=_join_outputs(graphs),
        aggregate_feedback=_join_feedback(graphs),
    )


def batchify(*items: Union[WorkflowGraph, LearningGraph]) -> LearningGraph:
    """Concatenate traces (or already-batched learning graphs) in order.

    Nested batches are flattened, which makes the operator associative at
    the rendered-text level.
    """
    members: list[WorkflowGraph] = []
    for item in items:
        if isinstance(item, LearningGraph):
            if item.kind != "batch":
                raise TemplateError("batchify only composes traces and batches")
            members.extend(item.members)
        else:
            members.append(item)
    return template_batch(members)


def template_episodic(graphs: Sequence[WorkflowGraph],
                      episode_feedback: FeedbackRecord,
                      include_aggregate_output: bool = False) -> LearningGraph:
    """Chain time-ordered experiences; feedback applies to the whole episode."""
    graphs = tuple(graphs)
    if not graphs:
        raise TemplateError("episodic template requires at least one trace")
    links = tuple((i, i + 1) for i in range(len(graphs) - 1))
    aggregate_output = _join_outputs(graphs) if include_aggregate_output else None
    return LearningGraph(
        kind="episodic",
        members=graphs,
        links=links,
        aggregate_output=aggregate_output,
        aggregate_feedback=episode_feedback,
        include_aggregate_output=include_aggregate_output,
    )


def truncate_horizon(lg: LearningGraph, policy: HorizonPolicy) -> LearningGraph:
    """Keep only the most recent window of an episodic learning graph.

    Member graphs are never modified; truncation selects a suffix and prunes
    links whose endpoints were dropped.
    """
    if lg.kind != "episodic":
        raise TemplateError("truncate_horizon applies to episodic graphs only")
    keep = min(policy.effective_length, len(lg.members))
    members = lg.members[-keep:]
    links = tuple((i, i + 1) for i in range(len(members) - 1))
    aggregate_output = _join_outputs(members) if lg.include_aggregate_output else None
    return replace(lg, members=members, links=links, aggregate_output=aggregate_output)
