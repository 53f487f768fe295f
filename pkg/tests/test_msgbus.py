"""Bus semantics: pub/sub, services, actions, and the fake-time paths."""

from __future__ import annotations

import random

import pytest

from embark.msgbus import (
    ActionServerNotFound,
    ActionStatus,
    AlreadyTerminal,
    DuplicateService,
    Envelope,
    HandlerError,
    InvalidTopic,
    Kind,
    MessageBus,
    ServiceNotFound,
    Timeout,
)
from embark.msgbus.actions import FunctionActionServer
from embark.msgbus.envelope import is_legal_status_path
from embark.timing import FakeClock


@pytest.fixture
def bus() -> MessageBus:
    return MessageBus(clock=FakeClock())


# -- publish / subscribe -----------------------------------------------------


def test_publish_without_subscribers_is_not_an_error(bus):
    bus.publish("cam/detections", {"boxes": []})


def test_publish_reaches_every_subscriber(bus):
    a = bus.subscribe("cam/detections")
    b = bus.subscribe("cam/detections")
    bus.publish("cam/detections", {"n": 1})
    assert len(a) == 1 and len(b) == 1


def test_subscribe_sees_no_history(bus):
    bus.publish("t", {"early": True})
    sub = bus.subscribe("t")
    assert len(sub) == 0
    bus.publish("t", {"late": True})
    assert len(sub) == 1


def test_overflow_drops_oldest(bus):
    sub = bus.subscribe("t", capacity=2)
    for i in range(3):
        bus.publish("t", {"seq": i})
    got = [env.payload["seq"] for env in sub.drain()]
    assert got == [1, 2]
    assert sub.dropped == 1


def test_per_publisher_fifo_over_1000_pairs(bus):
    # Ordering oracle: payload sequence numbers must arrive monotonically.
    sub = bus.subscribe("t", capacity=4096)
    for i in range(2000):
        bus.publish("t", {"seq": i})
    seqs = [env.payload["seq"] for env in sub.drain()]
    assert seqs == sorted(seqs) and len(seqs) == 2000


def test_invalid_topics_rejected(bus):
    for bad in ("", "Upper/case", "a//b", "sp ace", "a/", "/a"):
        with pytest.raises(InvalidTopic):
            bus.publish(bad, {})
        with pytest.raises(InvalidTopic):
            bus.subscribe(bad)


def test_unsubscribe_stops_delivery(bus):
    sub = bus.subscribe("t")
    bus.publish("t", 1)
    sub.close()
    bus.publish("t", 2)
    assert len(sub) == 1


# -- services ----------------------------------------------------------------


def test_echo_service(bus):
    bus.register_service("echo", lambda req: req)
    assert bus.call_service("echo", {"x": 1}, 100) == {"x": 1}


def test_missing_service(bus):
    with pytest.raises(ServiceNotFound):
        bus.call_service("missing", {}, 100)


def test_slow_handler_times_out(bus):
    # Fake-time oracle: the handler sleeps 200 ms of virtual time, which
    # must exceed the caller's 50 ms budget deterministically.
    def slow(req):
        bus.clock.sleep(200)
        return {"late": True}

    bus.register_service("slow", slow)
    with pytest.raises(Timeout):
        bus.call_service("slow", {}, 50)


def test_handler_error_propagates_message(bus):
    def boom(req):
        raise ValueError("bad req")

    bus.register_service("boom", boom)
    with pytest.raises(HandlerError, match="bad req"):
        bus.call_service("boom", {}, 100)


def test_duplicate_registration(bus):
    bus.register_service("s", lambda r: r)
    with pytest.raises(DuplicateService):
        bus.register_service("s", lambda r: r)


def test_deregistered_service_is_gone(bus):
    reg = bus.register_service("s", lambda r: r)
    reg.close()
    with pytest.raises(ServiceNotFound):
        bus.call_service("s", {}, 100)


def test_handler_invoked_exactly_once_per_call(bus):
    calls = []
    bus.register_service("count", lambda r: calls.append(r) or {"n": len(calls)})
    bus.call_service("count", {}, 100)
    assert len(calls) == 1


# -- actions -------------------------------------------------------------


def immediate_success_server(result):
    def execute(ctx):
        ctx.succeed(result)
        return
        yield  # pragma: no cover

    return FunctionActionServer(execute)


def feedback_server(n_feedbacks, result):
    def execute(ctx):
        for i in range(n_feedbacks):
            ctx.publish_feedback({"i": i})
            yield
        ctx.succeed(result)

    return FunctionActionServer(execute)


def cooperative_server(total_ticks):
    """Polls the cancel flag each tick, like a well-behaved long runner."""

    def execute(ctx):
        for i in range(total_ticks):
            if ctx.cancel_requested:
                ctx.cancelled({"at_tick": i})
                return
            ctx.publish_feedback({"tick": i})
            yield
        ctx.succeed({"done": True})

    return FunctionActionServer(execute)


def test_minimal_action_lifecycle(bus):
    bus.register_action_server("act", immediate_success_server({"ok": True}))
    handle = bus.send_goal("act", {"g": 1})
    bus.run_until_actions_idle()
    assert handle.result() == (ActionStatus.SUCCEEDED, {"ok": True})
    assert handle.status_history == [
        ActionStatus.PENDING,
        ActionStatus.ACCEPTED,
        ActionStatus.EXECUTING,
        ActionStatus.SUCCEEDED,
    ]


def test_rejected_goal_has_no_feedback_or_result(bus):
    server = FunctionActionServer(lambda ctx: iter(()), accept=lambda goal: False)
    bus.register_action_server("act", server)
    handle = bus.send_goal("act", {"g": 1})
    assert handle.status is ActionStatus.REJECTED
    bus.run_until_actions_idle()
    assert len(handle.feedback) == 0
    assert handle.result() == (ActionStatus.REJECTED, None)


def test_feedback_envelopes_correlate_and_precede_result(bus):
    # Lifecycle-ordering oracle over the tap: every ACT_FEEDBACK carries
    # corr = goal id and is recorded before the ACT_RESULT.
    tap = bus.tap()
    bus.register_action_server("act", feedback_server(5, {"ok": True}))
    handle = bus.send_goal("act", {})
    bus.run_until_actions_idle()
    envs = tap.drain()
    feedbacks = [e for e in envs if e.kind is Kind.ACT_FEEDBACK]
    results = [e for e in envs if e.kind is Kind.ACT_RESULT]
    assert len(feedbacks) == 5 and len(results) == 1
    assert all(e.corr == handle.goal_id for e in feedbacks + results)
    result_pos = envs.index(results[0])
    assert all(envs.index(f) < result_pos for f in feedbacks)
    accept_pos = next(i for i, e in enumerate(envs) if e.kind is Kind.ACT_ACCEPT)
    assert all(envs.index(f) > accept_pos for f in feedbacks)


def test_cancel_cooperative_server(bus):
    bus.register_action_server("act", cooperative_server(100))
    handle = bus.send_goal("act", {})
    bus.tick()
    bus.tick()
    bus.cancel_goal(handle)
    bus.run_until_actions_idle()
    assert handle.status is ActionStatus.CANCELED


def test_cancel_after_terminal_raises(bus):
    bus.register_action_server("act", immediate_success_server({}))
    handle = bus.send_goal("act", {})
    bus.run_until_actions_idle()
    with pytest.raises(AlreadyTerminal):
        bus.cancel_goal(handle)


def test_cancel_loses_race_when_server_finishes_first(bus):
    # Fake-time race: server succeeds on its next tick without re-checking
    # the flag, so the cancel deterministically loses.
    def execute(ctx):
        ctx.publish_feedback({"tick": 0})
        yield
        ctx.succeed({"done": True})

    bus.register_action_server("act", FunctionActionServer(execute))
    handle = bus.send_goal("act", {})
    bus.tick()
    bus.cancel_goal(handle)
    bus.run_until_actions_idle()
    assert handle.status is ActionStatus.SUCCEEDED


def test_goal_on_missing_server(bus):
    with pytest.raises(ActionServerNotFound):
        bus.send_goal("nowhere", {})


def test_last_feedback_tracked(bus):
    bus.register_action_server("act", feedback_server(3, {}))
    handle = bus.send_goal("act", {})
    bus.tick()
    bus.tick()
    assert handle.last_feedback == {"i": 1}


def test_randomized_lifecycles_are_legal_paths(bus):
    # Randomized schedule oracle: arbitrary mixes of reject/succeed/abort/
    # cancel-honor/cancel-ignore servers under random cancel timing must
    # still produce legal paths with exactly one terminal status.
    rng = random.Random(7)

    def make_server(behavior, run_ticks):
        def execute(ctx):
            for i in range(run_ticks):
                if ctx.cancel_requested and behavior == "honor":
                    ctx.cancelled({})
                    return
                ctx.publish_feedback({"i": i})
                yield
            if behavior == "abort":
                ctx.abort({})
            else:
                ctx.succeed({})

        return FunctionActionServer(execute, accept=lambda g: behavior != "reject")

    handles = []
    for n in range(80):
        behavior = rng.choice(["honor", "ignore", "abort", "reject"])
        name = f"act_{n}"
        bus.register_action_server(name, make_server(behavior, rng.randint(0, 6)))
        handle = bus.send_goal(name, {"n": n})
        handles.append(handle)
        if rng.random() < 0.5 and not handle.terminal:
            for _ in range(rng.randint(0, 3)):
                bus.tick()
            if not handle.terminal:
                bus.cancel_goal(handle)
    bus.run_until_actions_idle()
    for handle in handles:
        path = handle.status_history
        assert is_legal_status_path(path)
        assert handle.terminal
        assert sum(1 for s in path if s in
                   {ActionStatus.REJECTED, ActionStatus.SUCCEEDED,
                    ActionStatus.ABORTED, ActionStatus.CANCELED}) == 1


def test_deterministic_ids_with_seeded_factory():
    def ids():
        rng = random.Random(42)
        return lambda: f"m{rng.getrandbits(64):016x}"

    first, second = [], []
    for sink in (first, second):
        bus = MessageBus(clock=FakeClock(), id_factory=ids())
        tap = bus.tap()
        bus.publish("t", {"a": 1})
        bus.publish("t", {"a": 2})
        sink.extend(env.id for env in tap.drain())
    assert first == second


def test_subscription_receive_with_fake_clock_times_out(bus):
    sub = bus.subscribe("t")
    t0 = bus.clock.now_ms()
    assert sub.receive(40, bus.clock) is None
    assert bus.clock.now_ms() - t0 == 40


def test_subscription_receive_returns_pending_immediately(bus):
    sub = bus.subscribe("t")
    bus.publish("t", {"x": 1})
    env = sub.receive(1000, bus.clock)
    assert env is not None and env.payload == {"x": 1}
    assert bus.clock.now_ms() == 0
