"""looplab: iterative generative optimization of editable workflow artifacts.

The package closes a learning loop: execute a slot-based artifact to get a
workflow trace, attach staged natural-language feedback, compose traces
under a learning template, render an optimizer context, and apply the
proposed per-slot delta. Deterministic arcade micro-environments and
synthetic text tasks provide desk-scale benchmarks.
"""

from . import artifacts, environments, harness, optimizer
from .errors import LoopLabError
from .feedback import (
    FeedbackRecord,
    STAGE_TABLES,
    StageRow,
    StageTable,
    compute_metrics,
    correctness_guide,
    extract_choice,
    game_feedback,
    staged_feedback,
)
from .templates import (
    HorizonPolicy,
    LearningGraph,
    batchify,
    template_batch,
    template_episodic,
    template_interactive,
    truncate_horizon,
)
from .trace_core import (
    GraphBuilder,
    ParamNode,
    ValueNode,
    WorkflowGraph,
    attach_feedback,
    backward_slice,
    begin_graph,
    load_graph,
    save_graph,
    topological_order,
)

__version__ = "0.1.0"

__all__ = [
    "FeedbackRecord",
    "GraphBuilder",
    "HorizonPolicy",
    "LearningGraph",
    "LoopLabError",
    "ParamNode",
    "STAGE_TABLES",
    "StageRow",
    "StageTable",
    "ValueNode",
    "WorkflowGraph",
    "artifacts",
    "attach_feedback",
    "backward_slice",
    "batchify",
    "begin_graph",
    "compute_metrics",
    "correctness_guide",
    "environments",
    "extract_choice",
    "game_feedback",
    "harness",
    "load_graph",
    "optimizer",
    "save_graph",
    "staged_feedback",
    "template_batch",
    "template_episodic",
    "template_interactive",
    "topological_order",
    "truncate_horizon",
]
