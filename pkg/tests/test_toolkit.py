"""Tool schema validation, the closed execute path, and builtin tools."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embark.msgbus import MessageBus
from embark.timing import FakeClock
from embark.toolkit import (
    FieldSpec,
    FieldType,
    OutcomeStatus,
    Tool,
    ToolCall,
    ToolContext,
    ToolOutcome,
    ToolRegistry,
    ToolSpec,
    builtins,
    execute,
    validate_args,
)


@dataclass
class Detection:
    label: str
    distance: float
    bearing: float
    confidence: float = 1.0


@dataclass
class Observation:
    detections: list


def make_ctx(**kwargs) -> ToolContext:
    bus = kwargs.pop("bus", MessageBus(clock=FakeClock()))
    return ToolContext(bus=bus, clock=bus.clock, **kwargs)


# -- validation ---------------------------------------------------------------


NUM_SPEC = ToolSpec("t", "test", {"x": FieldSpec(FieldType.NUMBER)})


def test_valid_args_pass():
    assert validate_args(NUM_SPEC, {"x": 3.5}) == []


def test_missing_required_reported():
    violations = validate_args(NUM_SPEC, {})
    assert [(v.field, v.kind) for v in violations] == [("x", "missing")]


def test_all_violations_reported_at_once():
    violations = validate_args(NUM_SPEC, {"x": "hi", "y": 1})
    kinds = {(v.field, v.kind) for v in violations}
    assert kinds == {("x", "type"), ("y", "unknown")}


def test_optional_field_may_be_absent():
    spec = ToolSpec("t", "test", {"x": FieldSpec(FieldType.TEXT, required=False)})
    assert validate_args(spec, {}) == []
    assert validate_args(spec, {"x": 1}) != []


def test_bool_is_not_a_number():
    assert validate_args(NUM_SPEC, {"x": True}) != []


FIELD_TYPES = list(FieldType)


def _good_value(ft: FieldType, rng: random.Random):
    return {
        FieldType.TEXT: lambda: "txt",
        FieldType.NUMBER: lambda: rng.choice([1, 2.5, -3.25]),
        FieldType.INTEGER: lambda: rng.randint(-5, 5),
        FieldType.BOOLEAN: lambda: rng.random() < 0.5,
        FieldType.TEXT_LIST: lambda: ["a", "b"][: rng.randint(0, 2)],
    }[ft]()


def _bad_value(ft: FieldType):
    return {
        FieldType.TEXT: 7,
        FieldType.NUMBER: "seven",
        FieldType.INTEGER: 1.5,
        FieldType.BOOLEAN: "yes",
        FieldType.TEXT_LIST: [1, 2],
    }[ft]


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=150, deadline=None)
def test_validation_matches_per_field_oracle(seed):
    # Oracle: decide each field independently (missing / unknown / type)
    # and compare the full violation set against validate_args.
    rng = random.Random(seed)
    fields = {
        f"f{i}": FieldSpec(rng.choice(FIELD_TYPES), required=rng.random() < 0.7)
        for i in range(rng.randint(0, 5))
    }
    spec = ToolSpec("t", "test", fields)
    args = {}
    for name, fspec in fields.items():
        roll = rng.random()
        if roll < 0.3:
            continue  # leave absent
        if roll < 0.55:
            args[name] = _bad_value(fspec.type)
        else:
            args[name] = _good_value(fspec.type, rng)
    for j in range(rng.randint(0, 2)):
        args[f"extra{j}"] = "x"

    expected = set()
    predicates = {
        FieldType.TEXT: lambda v: isinstance(v, str),
        FieldType.NUMBER: lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
        FieldType.INTEGER: lambda v: isinstance(v, int) and not isinstance(v, bool),
        FieldType.BOOLEAN: lambda v: isinstance(v, bool),
        FieldType.TEXT_LIST: lambda v: isinstance(v, list)
        and all(isinstance(i, str) for i in v),
    }
    for name, fspec in fields.items():
        if name not in args:
            if fspec.required:
                expected.add((name, "missing"))
        elif not predicates[fspec.type](args[name]):
            expected.add((name, "type"))
    for name in args:
        if name not in fields:
            expected.add((name, "unknown"))

    got = {(v.field, v.kind) for v in validate_args(spec, args)}
    assert got == expected


# -- execute ------------------------------------------------------------------


def test_unknown_tool_is_error_outcome():
    out = execute(ToolCall("c1", "nope", {}), ToolRegistry(), make_ctx())
    assert out.status is OutcomeStatus.ERROR
    assert "unknown tool" in out.text


def test_invalid_args_is_error_outcome():
    reg = ToolRegistry((builtins.publish_message,))
    out = execute(ToolCall("c1", "publish_message", {"topic": 3}), reg, make_ctx())
    assert out.status is OutcomeStatus.ERROR


def test_tool_exception_is_error_outcome():
    def boom(args, ctx, call_id):
        raise RuntimeError("kaput")

    reg = ToolRegistry((Tool(ToolSpec("boom", "explodes"), boom),))
    out = execute(ToolCall("c1", "boom", {}), reg, make_ctx())
    assert out.status is OutcomeStatus.ERROR and "kaput" in out.text


@given(
    st.text(max_size=12),
    st.dictionaries(st.text(max_size=6), st.one_of(st.none(), st.integers(), st.text()), max_size=4),
)
@settings(max_examples=100, deadline=None)
def test_execute_never_raises(name, args):
    reg = builtins.standard_registry()
    try:
        call = ToolCall("c", name if name and name.isidentifier() else "x", args)
    except Exception:
        return
    out = execute(call, reg, make_ctx())
    assert out.status in (OutcomeStatus.OK, OutcomeStatus.ERROR)


def test_error_outcome_requires_text():
    with pytest.raises(ValueError):
        ToolOutcome("c", OutcomeStatus.ERROR, ())


# -- builtin tools ------------------------------------------------------------


def test_publish_message_tool():
    ctx = make_ctx()
    sub = ctx.bus.subscribe("hri/say")
    out = execute(
        ToolCall("c", "publish_message", {"topic": "hri/say", "payload": "hello"}),
        ToolRegistry((builtins.publish_message,)),
        ctx,
    )
    assert out.status is OutcomeStatus.OK
    envs = sub.drain()
    assert len(envs) == 1 and envs[0].payload == {"text": "hello"}


def test_publish_message_empty_topic_is_error():
    out = execute(
        ToolCall("c", "publish_message", {"topic": "", "payload": "x"}),
        ToolRegistry((builtins.publish_message,)),
        make_ctx(),
    )
    assert out.status is OutcomeStatus.ERROR and "topic" in out.text


def test_publish_message_parses_json_payload():
    ctx = make_ctx()
    sub = ctx.bus.subscribe("a/b")
    execute(
        ToolCall("c", "publish_message", {"topic": "a/b", "payload": '{"k":1}'}),
        ToolRegistry((builtins.publish_message,)),
        ctx,
    )
    assert sub.drain()[0].payload == {"k": 1}


def test_receive_message_pending_and_timeout():
    ctx = make_ctx()
    reg = ToolRegistry((builtins.receive_message,))
    # Establish the persistent subscription, then publish into it.
    first = execute(ToolCall("c0", "receive_message", {"topic": "t", "timeout_ms": 10}), reg, ctx)
    assert first.text == "no message within 10 ms"
    ctx.bus.publish("t", {"k": 1})
    ctx.bus.publish("t", {"k": 2})
    second = execute(ToolCall("c1", "receive_message", {"topic": "t", "timeout_ms": 10}), reg, ctx)
    assert second.status is OutcomeStatus.OK and second.text == '{"k":1}'
    third = execute(ToolCall("c2", "receive_message", {"topic": "t", "timeout_ms": 10}), reg, ctx)
    assert third.text == '{"k":2}'


def test_call_service_tool_ok_and_errors():
    ctx = make_ctx()
    ctx.bus.register_service("echo", lambda req: req)
    reg = ToolRegistry((builtins.call_service,))
    out = execute(
        ToolCall("c", "call_service", {"name": "echo", "request": '{"x":1}', "timeout_ms": 100}),
        reg,
        ctx,
    )
    assert out.status is OutcomeStatus.OK and out.text == '{"x":1}'
    missing = execute(
        ToolCall("c", "call_service", {"name": "absent", "request": "{}", "timeout_ms": 100}),
        reg,
        ctx,
    )
    assert missing.status is OutcomeStatus.ERROR and "ServiceNotFound" in missing.text


def test_distance_tool_345_triangle():
    obs = Observation([Detection("chair", 5.0, math.degrees(math.atan2(4, 3)))])
    ctx = make_ctx(observe=lambda: obs)
    out = execute(
        ToolCall("c", "get_distance_to_objects", {"object_names": ["chair"]}),
        ToolRegistry((builtins.get_distance_to_objects,)),
        ctx,
    )
    assert out.text == "chair: distance=5.00 bearing=53.1"


def test_distance_tool_not_visible():
    ctx = make_ctx(observe=lambda: Observation([]))
    out = execute(
        ToolCall("c", "get_distance_to_objects", {"object_names": ["ghost"]}),
        ToolRegistry((builtins.get_distance_to_objects,)),
        ctx,
    )
    assert out.text == "ghost: not visible"


def test_distance_tool_sorts_nearest_first():
    # Sort oracle: ascending by distance regardless of detection order.
    obs = Observation([Detection("chair", 2.0, 10.0), Detection("chair", 1.0, -5.0)])
    ctx = make_ctx(observe=lambda: obs)
    out = execute(
        ToolCall("c", "get_distance_to_objects", {"object_names": ["chair"]}),
        ToolRegistry((builtins.get_distance_to_objects,)),
        ctx,
    )
    assert out.text.splitlines() == [
        "chair: distance=1.00 bearing=-5.0",
        "chair: distance=2.00 bearing=10.0",
    ]


def test_rendering_is_deterministic():
    obs = Observation([Detection("crate", 3.33333, 12.345)])
    ctx = make_ctx(observe=lambda: obs)
    reg = ToolRegistry((builtins.get_distance_to_objects,))
    call = ToolCall("c", "get_distance_to_objects", {"object_names": ["crate"]})
    assert execute(call, reg, ctx).text == execute(call, reg, ctx).text


def test_query_identity_without_store():
    out = execute(
        ToolCall("c", "query_identity", {"question": "what are you?", "k": 2}),
        ToolRegistry((builtins.query_identity,)),
        make_ctx(),
    )
    assert out.status is OutcomeStatus.ERROR and "no identity loaded" in out.text


def test_tool_spec_serializes_to_function_schema():
    schema = builtins.get_distance_to_objects.spec.to_function_schema()
    assert schema["name"] == "get_distance_to_objects"
    assert schema["parameters"]["type"] == "object"
    assert schema["parameters"]["properties"]["object_names"] == {
        "type": "array",
        "items": {"type": "string"},
        "description": "labels to look for",
    }
    assert schema["parameters"]["required"] == ["object_names"]
