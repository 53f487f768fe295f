"""Finite-state-machine control flow with pluggable entry actions.

Each named state has an entry action returning an event string (entry
actions may be plain procedures or bounded ReAct sub-loops). Transitions
are declared (source, event, target) and evaluated in declaration order;
the first match fires. `event` may be an exact string, a callable
predicate on the event, or None to always match.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Union

EntryAction = Callable[[Any], str]
EventMatch = Union[str, None, Callable[[str], bool]]


class NoTransition(RuntimeError):
    """The entry action emitted an event no declared transition matches."""


@dataclass(frozen=True)
class Transition:
    source: str
    event: EventMatch
    target: str

    def matches(self, event: str) -> bool:
        if self.event is None:
            return True
        if callable(self.event):
            return bool(self.event(event))
        return self.event == event


@dataclass(frozen=True)
class FSMDefinition:
    states: dict[str, EntryAction]
    transitions: tuple[Transition, ...]
    initial: str
    terminal: frozenset[str]

    def __post_init__(self) -> None:
        names = set(self.states) | set(self.terminal)
        if self.initial not in names:
            raise ValueError(f"initial state {self.initial!r} undeclared")
        for t in self.transitions:
            for endpoint in (t.source, t.target):
                if endpoint not in names:
                    raise ValueError(f"transition endpoint {endpoint!r} undeclared")


@dataclass
class FSMResult:
    status: str  # "ok" | "failed"
    terminal_state: Optional[str]
    path: list[str]
    error: Optional[str] = None


class FSMRun:
    """Incremental execution: one entry action + one transition per step."""

    def __init__(self, definition: FSMDefinition, context: Any) -> None:
        self.definition = definition
        self.context = context
        self.current = definition.initial
        self.path = [definition.initial]
        self.events: list[str] = []
        self._result: Optional[FSMResult] = None

    @property
    def finished(self) -> bool:
        return self._result is not None

    @property
    def result(self) -> FSMResult:
        if self._result is None:
            raise RuntimeError("fsm still running")
        return self._result

    def step(self) -> bool:
        """Returns False once the machine reached a terminal or failed."""
        if self._result is not None:
            return False
        if self.current in self.definition.terminal:
            self._result = FSMResult("ok", self.current, list(self.path))
            return False
        action = self.definition.states.get(self.current)
        if action is None:
            self._result = FSMResult(
                "failed", None, list(self.path), error=f"state {self.current!r} has no action"
            )
            return False
        event = action(self.context)
        self.events.append(event)
        for transition in self.definition.transitions:
            if transition.source == self.current and transition.matches(event):
                self.current = transition.target
                self.path.append(transition.target)
                if self.current in self.definition.terminal:
                    self._result = FSMResult("ok", self.current, list(self.path))
                    return False
                return True
        self._result = FSMResult(
            "failed",
            None,
            list(self.path),
            error=f"no transition from {self.current!r} on event {event!r}",
        )
        return False


def fsm_run(definition: FSMDefinition, context: Any, max_steps: int = 10000) -> FSMResult:
    """Blocking form: drive the machine to its result."""
    run = FSMRun(definition, context)
    for _ in range(max_steps):
        if not run.step():
            return run.result
    return FSMResult("failed", None, list(run.path), error="step budget exhausted")


def is_walk_in_graph(definition: FSMDefinition, path: list[str]) -> bool:
    """True when `path` starts at initial and follows declared transitions."""
    if not path or path[0] != definition.initial:
        return False
    edges = {(t.source, t.target) for t in definition.transitions}
    return all((a, b) in edges for a, b in zip(path, path[1:]))
