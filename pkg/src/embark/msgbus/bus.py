"""The in-process bus.

Delivery model:

* ``publish`` fans out synchronously into per-subscription FIFO queues
  (drop-oldest beyond capacity), so per-publisher per-topic order is the
  enqueue order. No replay for late subscribers, no delivery confirmation.
* ``call_service`` invokes the handler inline and measures elapsed clock
  time against the caller's timeout, so a handler sleeping on a fake clock
  produces a deterministic Timeout.
* Action executors are generators owned by the bus and advanced one yield
  per :meth:`MessageBus.tick`, the bus's worker context. The scenario
  runner (or a test loop) drives ticks.

All entry points take an internal lock, so live runs may touch the bus
from several threads; fake-time runs are single threaded by construction.
"""

from __future__ import annotations

import logging
import threading
import uuid
from collections import deque
from typing import Any, Callable, Optional

from embark.msgbus.actions import ActionServer, GoalContext, GoalHandle
from embark.msgbus.envelope import ActionStatus, Envelope, Kind, validate_topic
from embark.msgbus.errors import (
    ActionServerNotFound,
    AlreadyTerminal,
    DuplicateService,
    HandlerError,
    ServiceNotFound,
    Timeout,
)
from embark.timing import Clock, FakeClock, WallClock

logger = logging.getLogger(__name__)

DEFAULT_QUEUE_CAPACITY = 256

ServiceHandler = Callable[[Any], Any]


class Subscription:
    """Single-consumer FIFO of envelopes with bounded capacity.

    When full, the oldest message is dropped: best-effort semantics.
    """

    def __init__(self, topic: str, capacity: int = DEFAULT_QUEUE_CAPACITY) -> None:
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.topic = topic
        self.capacity = capacity
        self._queue: deque[Envelope] = deque()
        self._cond = threading.Condition()
        self._detach: Optional[Callable[[], None]] = None
        self.dropped = 0

    def __len__(self) -> int:
        with self._cond:
            return len(self._queue)

    def _push(self, envelope: Envelope) -> None:
        with self._cond:
            if len(self._queue) >= self.capacity:
                self._queue.popleft()
                self.dropped += 1
            self._queue.append(envelope)
            self._cond.notify_all()

    def poll(self) -> Optional[Envelope]:
        """Next message, or None when nothing is queued."""
        with self._cond:
            if self._queue:
                return self._queue.popleft()
            return None

    def receive(self, timeout_ms: int, clock: Optional[Clock] = None) -> Optional[Envelope]:
        """Next message within the timeout, else None.

        With a fake clock the wait simply advances virtual time; with a
        wall clock it blocks on the queue's condition variable.
        """
        got = self.poll()
        if got is not None or timeout_ms <= 0:
            return got
        if isinstance(clock, FakeClock):
            clock.sleep(timeout_ms)
            return self.poll()
        with self._cond:
            if not self._queue:
                self._cond.wait(timeout_ms / 1000.0)
            if self._queue:
                return self._queue.popleft()
            return None

    def drain(self) -> list[Envelope]:
        """All currently queued messages, in order."""
        out = []
        while True:
            env = self.poll()
            if env is None:
                return out
            out.append(env)

    def close(self) -> None:
        if self._detach is not None:
            self._detach()
            self._detach = None


class ServiceRegistration:
    """Handle returned by register_service; close() deregisters."""

    def __init__(self, name: str, bus: "MessageBus") -> None:
        self.name = name
        self._bus: Optional[MessageBus] = bus

    def close(self) -> None:
        if self._bus is not None:
            self._bus._deregister_service(self.name)
            self._bus = None

    def __enter__(self) -> "ServiceRegistration":
        return self

    def __exit__(self, *_exc: Any) -> None:
        self.close()


class _ActionRegistration:
    def __init__(self, name: str, bus: "MessageBus") -> None:
        self.name = name
        self._bus: Optional[MessageBus] = bus

    def close(self) -> None:
        if self._bus is not None:
            self._bus._deregister_action(self.name)
            self._bus = None


class _Execution:
    def __init__(self, handle: GoalHandle, ctx: GoalContext, gen: Any) -> None:
        self.handle = handle
        self.ctx = ctx
        self.gen = gen
        self.started = False


class MessageBus:
    def __init__(
        self,
        clock: Optional[Clock] = None,
        id_factory: Optional[Callable[[], str]] = None,
    ) -> None:
        self.clock: Clock = clock if clock is not None else WallClock()
        self._new_id = id_factory if id_factory is not None else (lambda: str(uuid.uuid4()))
        self._lock = threading.RLock()
        self._subs: dict[str, list[Subscription]] = {}
        self._taps: list[Subscription] = []
        self._services: dict[str, ServiceHandler] = {}
        self._actions: dict[str, ActionServer] = {}
        self._executions: list[_Execution] = []

    # -- observation ------------------------------------------------------

    def tap(self, capacity: int = 65536) -> Subscription:
        """A subscription receiving every envelope crossing the bus."""
        sub = Subscription("*", capacity)
        with self._lock:
            self._taps.append(sub)
        sub._detach = lambda: self._remove_tap(sub)
        return sub

    def _remove_tap(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._taps:
                self._taps.remove(sub)

    def _record(self, envelope: Envelope) -> None:
        for tap in list(self._taps):
            tap._push(envelope)

    # -- publish / subscribe ----------------------------------------------

    def publish(self, topic: str, payload: Any) -> None:
        """Best-effort fan-out; zero subscribers is not an error."""
        validate_topic(topic)
        env = Envelope(
            kind=Kind.PUB, id=self._new_id(), topic=topic, ts=self.clock.now_ms(), payload=payload
        )
        with self._lock:
            targets = list(self._subs.get(topic, ()))
            self._record(env)
        for sub in targets:
            sub._push(env)

    def subscribe(self, topic: str, capacity: int = DEFAULT_QUEUE_CAPACITY) -> Subscription:
        validate_topic(topic)
        sub = Subscription(topic, capacity)
        with self._lock:
            self._subs.setdefault(topic, []).append(sub)
        sub._detach = lambda: self._unsubscribe(topic, sub)
        return sub

    def _unsubscribe(self, topic: str, sub: Subscription) -> None:
        with self._lock:
            subs = self._subs.get(topic, [])
            if sub in subs:
                subs.remove(sub)

    # -- services ----------------------------------------------------------

    def register_service(self, name: str, handler: ServiceHandler) -> ServiceRegistration:
        validate_topic(name)
        with self._lock:
            if name in self._services:
                raise DuplicateService(name)
            self._services[name] = handler
        return ServiceRegistration(name, self)

    def _deregister_service(self, name: str) -> None:
        with self._lock:
            self._services.pop(name, None)

    def call_service(self, name: str, request: Any, timeout_ms: int) -> Any:
        """Invoke the handler; the caller always learns a definite outcome.

        Raises ServiceNotFound, Timeout, or HandlerError; otherwise returns
        the handler's response.
        """
        validate_topic(name)
        if timeout_ms <= 0:
            raise ValueError("timeout_ms must be > 0")
        with self._lock:
            handler = self._services.get(name)
        if handler is None:
            raise ServiceNotFound(name)

        req = Envelope(
            kind=Kind.SRV_REQ,
            id=self._new_id(),
            topic=name,
            ts=self.clock.now_ms(),
            payload=request,
        )
        self._record(req)
        started = self.clock.now_ms()
        try:
            response = handler(request)
        except Exception as exc:
            raise HandlerError(str(exc)) from exc
        elapsed = self.clock.now_ms() - started
        if elapsed > timeout_ms:
            raise Timeout(f"service {name!r} took {elapsed} ms (timeout {timeout_ms} ms)")
        res = Envelope(
            kind=Kind.SRV_RES,
            id=self._new_id(),
            topic=name,
            ts=self.clock.now_ms(),
            payload=response,
            corr=req.id,
        )
        self._record(res)
        return response

    # -- actions -----------------------------------------------------------

    def register_action_server(self, name: str, server: ActionServer) -> _ActionRegistration:
        validate_topic(name)
        with self._lock:
            if name in self._actions:
                raise DuplicateService(name)
            self._actions[name] = server
        return _ActionRegistration(name, self)

    def _deregister_action(self, name: str) -> None:
        with self._lock:
            self._actions.pop(name, None)

    def send_goal(self, action: str, goal: Any) -> GoalHandle:
        """Submit a goal; the handle resolves to REJECTED or ACCEPTED."""
        validate_topic(action)
        with self._lock:
            server = self._actions.get(action)
        if server is None:
            raise ActionServerNotFound(action)

        goal_env = Envelope(
            kind=Kind.ACT_GOAL,
            id=self._new_id(),
            topic=action,
            ts=self.clock.now_ms(),
            payload=goal,
        )
        self._record(goal_env)
        feedback = Subscription(f"{action}/feedback".replace("//", "/"))
        handle = GoalHandle(goal_env.id, action, feedback)

        accepted = bool(server.accept(goal))
        self._record(
            Envelope(
                kind=Kind.ACT_ACCEPT,
                id=self._new_id(),
                topic=action,
                ts=self.clock.now_ms(),
                payload={"accepted": accepted},
                corr=goal_env.id,
            )
        )
        if not accepted:
            handle._advance(ActionStatus.REJECTED)
            return handle

        handle._advance(ActionStatus.ACCEPTED)
        ctx = GoalContext(goal_env.id, goal, self, action)
        with self._lock:
            self._executions.append(_Execution(handle, ctx, server.execute(ctx)))
        return handle

    def cancel_goal(self, handle: GoalHandle) -> ActionStatus:
        """Latch a cancel request; the executor decides the terminal status.

        Returns the status at the time of the request. The executor
        observes the request on its next tick, so whether the outcome is
        CANCELED or a completion the cancel raced with is decided by
        server tick order.
        """
        if handle.terminal:
            raise AlreadyTerminal(handle.goal_id)
        with self._lock:
            for ex in self._executions:
                if ex.handle is handle:
                    ex.ctx.request_cancel()
                    break
        return handle.status

    def _emit_feedback(self, action: str, goal_id: str, payload: Any) -> None:
        env = Envelope(
            kind=Kind.ACT_FEEDBACK,
            id=self._new_id(),
            topic=action,
            ts=self.clock.now_ms(),
            payload=payload,
            corr=goal_id,
        )
        self._record(env)
        with self._lock:
            for ex in self._executions:
                if ex.ctx.goal_id == goal_id:
                    ex.handle.last_feedback = payload
                    ex.handle.feedback._push(env)
                    break

    def tick(self) -> int:
        """Advance every active executor one step; returns active count."""
        with self._lock:
            executions = list(self._executions)
        for ex in executions:
            if ex.handle.terminal:
                continue
            if not ex.started:
                ex.started = True
                ex.handle._advance(ActionStatus.EXECUTING)
            try:
                next(ex.gen)
                if ex.ctx.outcome is not None:
                    self._finish_execution(ex)
            except StopIteration:
                if ex.ctx.outcome is None:
                    # Executor returned without declaring an outcome.
                    ex.ctx.succeed(None)
                self._finish_execution(ex)
            except Exception as exc:
                logger.exception("action executor for %s failed", ex.ctx.goal_id)
                ex.ctx.outcome = None
                ex.ctx.abort({"error": str(exc)})
                self._finish_execution(ex)
        with self._lock:
            self._executions = [e for e in self._executions if not e.handle.terminal]
            return len(self._executions)

    def run_until_actions_idle(self, max_ticks: int = 10000, tick_ms: int = 0) -> None:
        """Drive tick() until no executions remain (test convenience)."""
        for _ in range(max_ticks):
            if tick_ms:
                self.clock.sleep(tick_ms)
            if self.tick() == 0:
                return
        raise RuntimeError("actions still active after max_ticks")

    def _finish_execution(self, ex: _Execution) -> None:
        assert ex.ctx.outcome is not None
        status, result = ex.ctx.outcome
        self._record(
            Envelope(
                kind=Kind.ACT_RESULT,
                id=self._new_id(),
                topic=ex.handle.action,
                ts=self.clock.now_ms(),
                payload={"status": status.value, "result": result},
                corr=ex.ctx.goal_id,
            )
        )
        ex.handle._advance(status, result)
