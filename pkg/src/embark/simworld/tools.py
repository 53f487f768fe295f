"""Manipulation tools for model-driven agents, wrapping the manip service.

Constraint refusals (OVERLAP and friends) come back as ERROR outcomes so
the model sees exactly why the world refused the placement.
"""

from __future__ import annotations

from typing import Any

from embark.jsonutil import json_compact
from embark.msgbus.errors import BusError
from embark.toolkit.registry import Tool, ToolContext, ToolRegistry
from embark.toolkit.spec import FieldSpec, FieldType, ToolOutcome, ToolSpec

MANIP_SERVICE = "manip"
SERVICE_TIMEOUT_MS = 1000


def _call_manip(ctx: ToolContext, call_id: str, request: dict[str, Any]) -> ToolOutcome:
    try:
        response = ctx.bus.call_service(MANIP_SERVICE, request, SERVICE_TIMEOUT_MS)
    except BusError as exc:
        return ToolOutcome.error(call_id, f"{type(exc).__name__}: {exc}")
    if isinstance(response, dict) and response.get("ok"):
        return ToolOutcome.ok(call_id, json_compact(response))
    code = response.get("error", "REFUSED") if isinstance(response, dict) else "REFUSED"
    message = response.get("message", "") if isinstance(response, dict) else str(response)
    return ToolOutcome.error(call_id, f"{code}: {message}")


def _pick(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    return _call_manip(ctx, call_id, {"op": "pick", "id": args["object_id"]})


pick = Tool(
    ToolSpec(
        "pick",
        "Pick an object up into the effector (it must have nothing stacked on it).",
        {"object_id": FieldSpec(FieldType.TEXT)},
    ),
    _pick,
)


def _place_at(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    return _call_manip(ctx, call_id, {"op": "place_at", "x": args["x"], "y": args["y"]})


place_at = Tool(
    ToolSpec(
        "place_at",
        "Put the held object down on the ground at the given coordinates.",
        {"x": FieldSpec(FieldType.NUMBER), "y": FieldSpec(FieldType.NUMBER)},
    ),
    _place_at,
)


def _place_on(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    return _call_manip(ctx, call_id, {"op": "place_on", "target": args["target_id"]})


place_on = Tool(
    ToolSpec(
        "place_on",
        "Stack the held object on top of the target object (its top must be clear).",
        {"target_id": FieldSpec(FieldType.TEXT)},
    ),
    _place_on,
)

MANIP_TOOLS = (pick, place_at, place_on)


def add_manip_tools(registry: ToolRegistry) -> ToolRegistry:
    for tool in MANIP_TOOLS:
        registry.add(tool)
    return registry
