"""Tool registry and the closed execution path.

`execute` never raises: unknown tools, invalid arguments, and tool bodies
that blow up all come back as ERROR outcomes the agent loop can feed to
the model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable, Optional

from embark.toolkit.spec import ToolCall, ToolOutcome, ToolSpec, validate_args

logger = logging.getLogger(__name__)


@dataclass
class ToolContext:
    """Handles a tool body may need; scenarios fill in what applies.

    `observe` returns the agent's current camera observation. `goals` is
    this agent's private table of action goal handles. `extras` carries
    scenario-specific hooks (mission dispatch, anomaly resolution, ...).
    """

    bus: Any = None
    clock: Any = None
    observe: Optional[Callable[[], Any]] = None
    store: Any = None
    goals: dict[str, Any] = dc_field(default_factory=dict)
    subscriptions: dict[str, Any] = dc_field(default_factory=dict)
    extras: dict[str, Any] = dc_field(default_factory=dict)

    def subscription(self, topic: str) -> Any:
        """Persistent per-agent subscription, created on first use."""
        sub = self.subscriptions.get(topic)
        if sub is None:
            sub = self.bus.subscribe(topic)
            self.subscriptions[topic] = sub
        return sub


ToolBody = Callable[[dict[str, Any], ToolContext, str], ToolOutcome]


@dataclass(frozen=True)
class Tool:
    spec: ToolSpec
    body: ToolBody


class ToolRegistry:
    """Named tools; immutable once a scenario starts running."""

    def __init__(self, tools: tuple[Tool, ...] = ()) -> None:
        self._tools: dict[str, Tool] = {}
        for tool in tools:
            self.add(tool)

    def add(self, tool: Tool) -> None:
        if tool.spec.name in self._tools:
            raise ValueError(f"duplicate tool {tool.spec.name!r}")
        self._tools[tool.spec.name] = tool

    def get(self, name: str) -> Optional[Tool]:
        return self._tools.get(name)

    def specs(self) -> list[ToolSpec]:
        return [tool.spec for tool in self._tools.values()]

    def names(self) -> list[str]:
        return list(self._tools)

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def __len__(self) -> int:
        return len(self._tools)


def execute(call: ToolCall, registry: ToolRegistry, ctx: ToolContext) -> ToolOutcome:
    """Run one tool call; failures become ERROR outcomes, never exceptions."""
    tool = registry.get(call.name)
    if tool is None:
        return ToolOutcome.error(call.id, f"unknown tool {call.name!r}")
    args = call.arguments
    if not isinstance(args, dict):
        return ToolOutcome.error(call.id, "arguments must be a map")
    violations = validate_args(tool.spec, args)
    if violations:
        lines = "; ".join(v.message for v in violations)
        return ToolOutcome.error(call.id, f"invalid arguments: {lines}")
    try:
        return tool.body(dict(args), ctx, call.id)
    except Exception as exc:
        logger.exception("tool %s failed", call.name)
        return ToolOutcome.error(call.id, f"tool {call.name} failed: {exc}")
