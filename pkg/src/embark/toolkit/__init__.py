"""Tool layer bridging tool-calling language models and connectors."""

from embark.toolkit.spec import (
    ArgViolation,
    FieldSpec,
    FieldType,
    OutcomeStatus,
    ToolCall,
    ToolOutcome,
    ToolSpec,
    validate_args,
)
from embark.toolkit.registry import Tool, ToolContext, ToolRegistry, execute
from embark.toolkit import builtins

__all__ = [
    "ArgViolation",
    "FieldSpec",
    "FieldType",
    "OutcomeStatus",
    "Tool",
    "ToolCall",
    "ToolContext",
    "ToolOutcome",
    "ToolRegistry",
    "ToolSpec",
    "builtins",
    "execute",
    "validate_args",
]
