"""Built-in tools: bus access, spatial queries, identity retrieval.

Outputs are model-facing text with fixed formatting (distances to two
decimals, bearings to one) so scripted transcripts stay byte-stable.
"""

from __future__ import annotations

from typing import Any

from embark.jsonutil import json_compact, try_parse_json
from embark.msgbus.errors import BusError, InvalidTopic
from embark.toolkit.registry import Tool, ToolContext, ToolRegistry
from embark.toolkit.spec import FieldSpec, FieldType, ToolOutcome, ToolSpec

TEXT = FieldType.TEXT
INTEGER = FieldType.INTEGER


def _publish_message(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    payload = try_parse_json(args["payload"])
    try:
        ctx.bus.publish(args["topic"], payload)
    except InvalidTopic as exc:
        return ToolOutcome.error(call_id, f"invalid topic: {exc}")
    return ToolOutcome.ok(call_id, f"published to {args['topic']}")


publish_message = Tool(
    ToolSpec(
        "publish_message",
        "Publish a message on a bus topic (best effort, no delivery confirmation).",
        {
            "topic": FieldSpec(TEXT, description="target topic, e.g. hri/out"),
            "payload": FieldSpec(TEXT, description="message body; JSON when parseable"),
        },
    ),
    _publish_message,
)


def _receive_message(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    topic, timeout_ms = args["topic"], args["timeout_ms"]
    if timeout_ms < 0:
        return ToolOutcome.error(call_id, "timeout_ms must be >= 0")
    try:
        sub = ctx.subscription(topic)
    except InvalidTopic as exc:
        return ToolOutcome.error(call_id, f"invalid topic: {exc}")
    env = sub.receive(timeout_ms, ctx.clock)
    if env is None:
        # Absence of a message is an observation, not a failure.
        return ToolOutcome.ok(call_id, f"no message within {timeout_ms} ms")
    return ToolOutcome.ok(call_id, json_compact(env.payload))


receive_message = Tool(
    ToolSpec(
        "receive_message",
        "Wait for the next message on a topic; reports when none arrives in time.",
        {
            "topic": FieldSpec(TEXT),
            "timeout_ms": FieldSpec(INTEGER, description="how long to wait, in milliseconds"),
        },
    ),
    _receive_message,
)


def _call_service(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    request = try_parse_json(args["request"])
    try:
        response = ctx.bus.call_service(args["name"], request, args["timeout_ms"])
    except BusError as exc:
        return ToolOutcome.error(call_id, f"{type(exc).__name__}: {exc}")
    return ToolOutcome.ok(call_id, json_compact(response))


call_service = Tool(
    ToolSpec(
        "call_service",
        "Call a request/response service and return its reply.",
        {
            "name": FieldSpec(TEXT, description="service name"),
            "request": FieldSpec(TEXT, description="request body; JSON when parseable"),
            "timeout_ms": FieldSpec(INTEGER),
        },
    ),
    _call_service,
)


def _start_action(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    goal = try_parse_json(args["goal"])
    try:
        handle = ctx.bus.send_goal(args["name"], goal)
    except BusError as exc:
        return ToolOutcome.error(call_id, f"{type(exc).__name__}: {exc}")
    if handle.status.value == "rejected":
        return ToolOutcome.ok(call_id, f"rejected, goal_id={handle.goal_id}")
    ctx.goals[handle.goal_id] = handle
    return ToolOutcome.ok(call_id, f"accepted, goal_id={handle.goal_id}")


start_action = Tool(
    ToolSpec(
        "start_action",
        "Start a long-running action; returns immediately after the acceptance decision.",
        {
            "name": FieldSpec(TEXT, description="action channel, e.g. nav/goto"),
            "goal": FieldSpec(TEXT, description="goal body; JSON when parseable"),
        },
    ),
    _start_action,
)


def _get_action_status(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    handle = ctx.goals.get(args["goal_id"])
    if handle is None:
        return ToolOutcome.error(call_id, f"unknown goal id {args['goal_id']!r}")
    handle.feedback.drain()  # keep the queue from overflowing on long runs
    text = f"status={handle.status.value}"
    if handle.last_feedback is not None:
        text += f" last_feedback={json_compact(handle.last_feedback)}"
    if handle.terminal and handle.result_payload is not None:
        text += f" result={json_compact(handle.result_payload)}"
    return ToolOutcome.ok(call_id, text)


get_action_status = Tool(
    ToolSpec(
        "get_action_status",
        "Report the current status and most recent feedback of a started action.",
        {"goal_id": FieldSpec(TEXT)},
    ),
    _get_action_status,
)


def _cancel_action(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    handle = ctx.goals.get(args["goal_id"])
    if handle is None:
        return ToolOutcome.error(call_id, f"unknown goal id {args['goal_id']!r}")
    try:
        status = ctx.bus.cancel_goal(handle)
    except BusError as exc:
        return ToolOutcome.error(call_id, f"{type(exc).__name__}: {exc}")
    return ToolOutcome.ok(call_id, f"cancel requested, status={status.value}")


cancel_action = Tool(
    ToolSpec(
        "cancel_action",
        "Request cancellation of a started action; the server decides the terminal status.",
        {"goal_id": FieldSpec(TEXT)},
    ),
    _cancel_action,
)


def _get_distance_to_objects(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    if ctx.observe is None:
        return ToolOutcome.error(call_id, "no observation source in this context")
    observation = ctx.observe()
    requested = args["object_names"]
    matched: list[tuple[float, float, str]] = []
    seen: set[str] = set()
    for det in observation.detections:
        for name in requested:
            if name.lower() in det.label.lower():
                matched.append((det.distance, det.bearing, det.label))
                seen.add(name)
                break
    matched.sort(key=lambda item: (item[0], item[2]))
    lines = [
        f"{label}: distance={distance:.2f} bearing={bearing:.1f}"
        for distance, bearing, label in matched
    ]
    lines += [f"{name}: not visible" for name in requested if name not in seen]
    return ToolOutcome.ok(call_id, "\n".join(lines) if lines else "nothing visible")


get_distance_to_objects = Tool(
    ToolSpec(
        "get_distance_to_objects",
        "Distance and bearing of visible objects matching the given names, nearest first.",
        {"object_names": FieldSpec(FieldType.TEXT_LIST, description="labels to look for")},
    ),
    _get_distance_to_objects,
)


def _query_identity(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
    if ctx.store is None:
        return ToolOutcome.error(call_id, "no identity loaded")
    k = args.get("k", 3)
    if k < 1:
        return ToolOutcome.error(call_id, "k must be >= 1")
    hits = ctx.store.query(args["question"], k)
    lines = [
        f"{rank}. ({score:.4f}) {chunk.text}" for rank, (chunk, score) in enumerate(hits, start=1)
    ]
    return ToolOutcome.ok(call_id, "\n".join(lines))


query_identity = Tool(
    ToolSpec(
        "query_identity",
        "Search the robot's own identity documents and return the best matching snippets.",
        {
            "question": FieldSpec(TEXT),
            "k": FieldSpec(INTEGER, required=False, description="how many snippets (default 3)"),
        },
    ),
    _query_identity,
)


COMMS_TOOLS = (
    publish_message,
    receive_message,
    call_service,
    start_action,
    get_action_status,
    cancel_action,
)


def standard_registry(include_identity: bool = True) -> ToolRegistry:
    """The default tool set wired into conversational agents."""
    tools = COMMS_TOOLS + (get_distance_to_objects,)
    if include_identity:
        tools = tools + (query_identity,)
    return ToolRegistry(tools)
