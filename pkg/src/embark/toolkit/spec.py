"""Tool schemas, calls, outcomes, and argument validation.

The schema language is deliberately flat: named fields of five primitive
types. That is enough for every tool in the runtime and keeps validation
exhaustively checkable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional

_TOOL_NAME = re.compile(r"[a-z0-9_]{1,64}\Z")


class FieldType(str, Enum):
    TEXT = "text"
    NUMBER = "number"
    INTEGER = "integer"
    BOOLEAN = "boolean"
    TEXT_LIST = "list-of-text"


_JSON_SCHEMA_TYPES: dict[FieldType, dict[str, Any]] = {
    FieldType.TEXT: {"type": "string"},
    FieldType.NUMBER: {"type": "number"},
    FieldType.INTEGER: {"type": "integer"},
    FieldType.BOOLEAN: {"type": "boolean"},
    FieldType.TEXT_LIST: {"type": "array", "items": {"type": "string"}},
}


@dataclass(frozen=True)
class FieldSpec:
    type: FieldType
    required: bool = True
    description: str = ""


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    parameters: Mapping[str, FieldSpec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not _TOOL_NAME.match(self.name):
            raise ValueError(f"bad tool name {self.name!r}")

    def to_function_schema(self) -> dict[str, Any]:
        """Standard function-calling JSON shape for HTTP providers."""
        properties = {}
        required = []
        for name, spec in self.parameters.items():
            entry = dict(_JSON_SCHEMA_TYPES[spec.type])
            if spec.description:
                entry["description"] = spec.description
            properties[name] = entry
            if spec.required:
                required.append(name)
        return {
            "name": self.name,
            "description": self.description,
            "parameters": {"type": "object", "properties": properties, "required": required},
        }


@dataclass(frozen=True)
class ToolCall:
    id: str
    name: str
    arguments: Mapping[str, Any]


class OutcomeStatus(str, Enum):
    OK = "ok"
    ERROR = "error"


@dataclass(frozen=True)
class ContentPart:
    """One piece of model-facing output: text or a reference to an asset."""

    text: Optional[str] = None
    image_ref: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.text is None) == (self.image_ref is None):
            raise ValueError("part must be exactly one of text / image_ref")


@dataclass(frozen=True)
class ToolOutcome:
    tool_call_id: str
    status: OutcomeStatus
    content: tuple[ContentPart, ...]

    def __post_init__(self) -> None:
        if self.status is OutcomeStatus.ERROR and not any(
            p.text for p in self.content
        ):
            raise ValueError("error outcomes must explain themselves in text")

    @property
    def text(self) -> str:
        return "\n".join(p.text for p in self.content if p.text is not None)

    @classmethod
    def ok(cls, call_id: str, text: str, image_refs: tuple[str, ...] = ()) -> "ToolOutcome":
        parts = [ContentPart(text=text)]
        parts += [ContentPart(image_ref=ref) for ref in image_refs]
        return cls(call_id, OutcomeStatus.OK, tuple(parts))

    @classmethod
    def error(cls, call_id: str, text: str) -> "ToolOutcome":
        return cls(call_id, OutcomeStatus.ERROR, (ContentPart(text=text),))


@dataclass(frozen=True)
class ArgViolation:
    field: str
    kind: str  # "missing" | "unknown" | "type"
    message: str


def _type_ok(expected: FieldType, value: Any) -> bool:
    if expected is FieldType.TEXT:
        return isinstance(value, str)
    if expected is FieldType.NUMBER:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected is FieldType.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if expected is FieldType.BOOLEAN:
        return isinstance(value, bool)
    if expected is FieldType.TEXT_LIST:
        return isinstance(value, list) and all(isinstance(v, str) for v in value)
    return False


def validate_args(spec: ToolSpec, args: Mapping[str, Any]) -> list[ArgViolation]:
    """All violations at once: missing required, unknown field, bad type."""
    violations: list[ArgViolation] = []
    for name, fspec in spec.parameters.items():
        if name not in args:
            if fspec.required:
                violations.append(
                    ArgViolation(name, "missing", f"missing required field {name!r}")
                )
            continue
        if not _type_ok(fspec.type, args[name]):
            violations.append(
                ArgViolation(
                    name, "type", f"field {name!r} must be {fspec.type.value}"
                )
            )
    for name in args:
        if name not in spec.parameters:
            violations.append(ArgViolation(name, "unknown", f"unknown field {name!r}"))
    return violations
