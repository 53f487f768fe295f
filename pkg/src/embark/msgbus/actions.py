"""Long-running goals: acceptance, streamed feedback, one terminal result.

An action server supplies an acceptance predicate and an executor. The
executor is a generator; each ``yield`` hands control back to the bus and
marks one execution tick. Cancel requests are latched on the goal context
and observed by cooperative executors between yields, so races between
cancellation and completion are resolved by server tick order.
"""

from __future__ import annotations

import threading
from typing import Any, Callable, Iterator, Optional, Protocol

from embark.msgbus.envelope import ActionStatus, TERMINAL_STATUSES


class ActionServer(Protocol):
    """What the bus needs from an action server implementation."""

    def accept(self, goal: Any) -> bool:
        """Acceptance decision, made synchronously at goal submission."""
        ...

    def execute(self, ctx: "GoalContext") -> Iterator[None]:
        """Executor generator; must end via ctx.succeed/abort/cancelled."""
        ...


class FunctionActionServer:
    """Action server from two plain callables."""

    def __init__(
        self,
        execute: Callable[["GoalContext"], Iterator[None]],
        accept: Optional[Callable[[Any], bool]] = None,
    ) -> None:
        self._execute = execute
        self._accept = accept

    def accept(self, goal: Any) -> bool:
        return True if self._accept is None else bool(self._accept(goal))

    def execute(self, ctx: "GoalContext") -> Iterator[None]:
        return self._execute(ctx)


class GoalContext:
    """Execution-side view of one accepted goal."""

    def __init__(self, goal_id: str, goal: Any, bus: Any, action: str) -> None:
        self.goal_id = goal_id
        self.goal = goal
        self._bus = bus
        self._action = action
        self._cancel = False
        self.outcome: Optional[tuple[ActionStatus, Any]] = None

    @property
    def cancel_requested(self) -> bool:
        return self._cancel

    def request_cancel(self) -> None:
        self._cancel = True

    def publish_feedback(self, payload: Any) -> None:
        self._bus._emit_feedback(self._action, self.goal_id, payload)

    def succeed(self, result: Any = None) -> None:
        self._finish(ActionStatus.SUCCEEDED, result)

    def abort(self, result: Any = None) -> None:
        self._finish(ActionStatus.ABORTED, result)

    def cancelled(self, result: Any = None) -> None:
        self._finish(ActionStatus.CANCELED, result)

    def _finish(self, status: ActionStatus, result: Any) -> None:
        if self.outcome is not None:
            raise RuntimeError(f"goal {self.goal_id} already finished")
        self.outcome = (status, result)


class GoalHandle:
    """Caller-side view of one goal: status history, feedback, result."""

    def __init__(self, goal_id: str, action: str, feedback: Any) -> None:
        self.goal_id = goal_id
        self.action = action
        self.feedback = feedback  # Subscription of ACT_FEEDBACK envelopes
        self.last_feedback: Any = None
        self.result_payload: Any = None
        self._history: list[ActionStatus] = [ActionStatus.PENDING]
        self._cond = threading.Condition()

    @property
    def status(self) -> ActionStatus:
        return self._history[-1]

    @property
    def status_history(self) -> list[ActionStatus]:
        return list(self._history)

    @property
    def terminal(self) -> bool:
        return self.status in TERMINAL_STATUSES

    def result(self) -> Optional[tuple[ActionStatus, Any]]:
        """(terminal status, result payload) once finished, else None."""
        if not self.terminal:
            return None
        return (self.status, self.result_payload)

    def _advance(self, status: ActionStatus, result: Any = None) -> None:
        with self._cond:
            self._history.append(status)
            if status in TERMINAL_STATUSES:
                self.result_payload = result
            self._cond.notify_all()
