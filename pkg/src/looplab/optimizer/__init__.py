from .backends import (
    HttpLLMBackend,
    NullBackend,
    ScriptedHillClimbBackend,
    flatten_params,
)
from .context import LearningContext, render_context, render_learning_graph, render_trace
from .delta import REPLY_FORMAT_INSTRUCTION, format_delta, parse_delta_reply
from .memory import OptimizerMemory, StepRecord, memory_push

__all__ = [
    "HttpLLMBackend",
    "LearningContext",
    "NullBackend",
    "OptimizerMemory",
    "REPLY_FORMAT_INSTRUCTION",
    "ScriptedHillClimbBackend",
    "StepRecord",
    "flatten_params",
    "format_delta",
    "memory_push",
    "parse_delta_reply",
    "render_context",
    "render_learning_graph",
    "render_trace",
]
