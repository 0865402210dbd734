"""Workflow graphs: directed acyclic execution traces.

One execution of an artifact produces one :class:`WorkflowGraph` holding
value nodes (input, intermediates, output), parameter nodes (slot-body
snapshots), and the dependency edges between them. Graphs are immutable
after completion; feedback is attached to the output node only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Union

from .errors import ArtifactError, StructuralError
from .feedback import FeedbackRecord

NodeId = int

SCHEMA_VERSION = "looplab-trace/1"


@dataclass(frozen=True)
class ValueNode:
    id: NodeId
    label: str
    payload: str
    producer_op: str


@dataclass(frozen=True)
class ParamNode:
    id: NodeId
    slot_name: str
    snapshot: str


Node = Union[ValueNode, ParamNode]


@dataclass(frozen=True)
class WorkflowGraph:
    """One complete execution trace.

    ``edges`` are (parent, child) pairs in creation order; ``output`` is the
    single designated output node; ``feedback`` applies to that node.
    """

    nodes: tuple[Node, ...]
    edges: tuple[tuple[NodeId, NodeId], ...]
    output: NodeId
    input_payload: str
    feedback: Optional[FeedbackRecord] = None

    def node(self, node_id: NodeId) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise StructuralError(f"unknown node id: {node_id}")

    def value_nodes(self) -> list[ValueNode]:
        return [n for n in self.nodes if isinstance(n, ValueNode)]

    def param_nodes(self) -> list[ParamNode]:
        return [n for n in self.nodes if isinstance(n, ParamNode)]

    @property
    def output_payload(self) -> str:
        node = self.node(self.output)
        assert isinstance(node, ValueNode)
        return node.payload

    def parents(self, node_id: NodeId) -> list[NodeId]:
        return [p for p, c in self.edges if c == node_id]


class GraphBuilder:
    """Accumulates nodes and edges during one execution.

    A builder belongs to a single execution; call :meth:`finish` to obtain
    the immutable graph. ``slots`` maps slot names to their current bodies
    and is consulted when a step names parameter slots.
    """

    def __init__(self, input_payload: str, slots: Optional[Mapping[str, str]] = None):
        self._slots = dict(slots or {})
        self._nodes: list[Node] = []
        self._edges: list[tuple[NodeId, NodeId]] = []
        self._next_id = 0
        self._input_payload = input_payload
        self.input_id = self._add_value("input", input_payload, producer_op="input")
        self._last_value = self.input_id

    def _add_value(self, label: str, payload: str, producer_op: str) -> NodeId:
        node = ValueNode(self._next_id, label, payload, producer_op)
        self._next_id += 1
        self._nodes.append(node)
        return node.id

    def record_step(self, op_name: str, parents: Iterable[NodeId],
                    param_slots: Iterable[str], value: str) -> NodeId:
        parents = list(parents)
        known = {n.id for n in self._nodes}
        for p in parents:
            if p not in known:
                raise StructuralError(f"unknown parent id: {p}")
        param_ids = []
        for slot in param_slots:
            if slot not in self._slots:
                raise ArtifactError(f"unknown slot: {slot!r}")
            node = ParamNode(self._next_id, slot, self._slots[slot])
            self._next_id += 1
            self._nodes.append(node)
            param_ids.append(node.id)
        value_id = self._add_value(op_name, value, producer_op=op_name)
        for p in parents:
            self._edges.append((p, value_id))
        for p in param_ids:
            self._edges.append((p, value_id))
        self._last_value = value_id
        return value_id

    def finish(self, output: Optional[NodeId] = None) -> WorkflowGraph:
        out = self._last_value if output is None else output
        if out not in {n.id for n in self._nodes}:
            raise StructuralError(f"unknown output node: {out}")
        return WorkflowGraph(
            nodes=tuple(self._nodes),
            edges=tuple(self._edges),
            output=out,
            input_payload=self._input_payload,
        )


def begin_graph(input_payload: str, slots: Optional[Mapping[str, str]] = None) -> GraphBuilder:
    """Start a new trace with a single input node holding ``input_payload``."""
    return GraphBuilder(input_payload, slots)


def attach_feedback(graph: WorkflowGraph, feedback: FeedbackRecord) -> WorkflowGraph:
    """Return a copy of ``graph`` with ``feedback`` attached to its output node.

    A graph carries at most one feedback record; double attachment is an
    invariant violation, not a merge.
    """
    if graph.feedback is not None:
        raise StructuralError("graph already carries feedback")
    return replace(graph, feedback=feedback)


def backward_slice(graph: WorkflowGraph, node: NodeId) -> WorkflowGraph:
    """Induced subgraph of all ancestors of ``node`` (inclusive)."""
    ids = {n.id for n in graph.nodes}
    if node not in ids:
        raise StructuralError(f"unknown node id: {node}")
    parents: dict[NodeId, list[NodeId]] = {i: [] for i in ids}
    for p, c in graph.edges:
        parents[c].append(p)
    keep = set()
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur in keep:
            continue
        keep.add(cur)
        stack.extend(parents[cur])
    nodes = tuple(n for n in graph.nodes if n.id in keep)
    edges = tuple((p, c) for p, c in graph.edges if p in keep and c in keep)
    feedback = graph.feedback if node == graph.output else None
    return WorkflowGraph(
        nodes=nodes,
        edges=edges,
        output=node,
        input_payload=graph.input_payload,
        feedback=feedback,
    )


def topological_order(graph: WorkflowGraph) -> list[NodeId]:
    """Kahn-style elimination order; raises if the graph has a cycle."""
    indeg = {n.id: 0 for n in graph.nodes}
    children: dict[NodeId, list[NodeId]] = {n.id: [] for n in graph.nodes}
    for p, c in graph.edges:
        indeg[c] += 1
        children[p].append(c)
    ready = sorted(i for i, d in indeg.items() if d == 0)
    order = []
    while ready:
        cur = ready.pop(0)
        order.append(cur)
        for c in children[cur]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) != len(graph.nodes):
        raise StructuralError("graph contains a cycle")
    return order


# --- Persistence -----------------------------------------------------------
#
# Line-delimited JSON: a header line, then one record per node/edge, then a
# meta record. Field ordering is fixed so files are byte-stable.


def _dump(record: dict) -> str:
    return json.dumps(record, separators=(", ", ": "), sort_keys=False)


def graph_to_lines(graph: WorkflowGraph) -> list[str]:
    lines = [_dump({"schema": SCHEMA_VERSION})]
    for n in graph.nodes:
        if isinstance(n, ValueNode):
            lines.append(_dump({
                "kind": "value", "id": n.id, "label": n.label,
                "payload": n.payload, "producer_op": n.producer_op,
            }))
        else:
            lines.append(_dump({
                "kind": "param", "id": n.id, "slot_name": n.slot_name,
                "snapshot": n.snapshot,
            }))
    for p, c in graph.edges:
        lines.append(_dump({"kind": "edge", "parent": p, "child": c}))
    meta = {"kind": "meta", "output": graph.output, "input_payload": graph.input_payload}
    if graph.feedback is not None:
        meta["feedback"] = {
            "score": graph.feedback.score,
            "message": graph.feedback.message,
            "stage": graph.feedback.stage,
        }
    lines.append(_dump(meta))
    return lines


def graph_from_lines(lines: Iterable[str]) -> WorkflowGraph:
    it = iter(lines)
    header = json.loads(next(it))
    if header.get("schema") != SCHEMA_VERSION:
        raise StructuralError(f"unsupported trace schema: {header.get('schema')!r}")
    nodes: list[Node] = []
    edges: list[tuple[NodeId, NodeId]] = []
    meta = None
    for line in it:
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        kind = rec["kind"]
        if kind == "value":
            nodes.append(ValueNode(rec["id"], rec["label"], rec["payload"], rec["producer_op"]))
        elif kind == "param":
            nodes.append(ParamNode(rec["id"], rec["slot_name"], rec["snapshot"]))
        elif kind == "edge":
            edges.append((rec["parent"], rec["child"]))
        elif kind == "meta":
            meta = rec
        else:
            raise StructuralError(f"unknown record kind: {kind!r}")
    if meta is None:
        raise StructuralError("trace file missing meta record")
    feedback = None
    if "feedback" in meta:
        fb = meta["feedback"]
        feedback = FeedbackRecord(fb["score"], fb["message"], fb["stage"])
    return WorkflowGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        output=meta["output"],
        input_payload=meta["input_payload"],
        feedback=feedback,
    )


def save_graph(graph: WorkflowGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(graph_to_lines(graph)) + "\n")


def load_graph(path) -> WorkflowGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_lines(fh)
