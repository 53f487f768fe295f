"""The agent contract: run and stop.

Agents are sequential loops. `step()` performs one iteration and is what
the scenario runner drives; `run()` is the blocking form of the same loop
for standalone use. `stop()` latches a flag that the loop observes at the
next iteration boundary, so stopping never interrupts a step midway.
"""

from __future__ import annotations

from enum import Enum


class AlreadyRunning(RuntimeError):
    pass


class AgentState(str, Enum):
    CREATED = "created"
    RUNNING = "running"
    STOPPING = "stopping"
    STOPPED = "stopped"


class Agent:
    def __init__(self, agent_id: str) -> None:
        self.id = agent_id
        self.state = AgentState.CREATED
        self._stop_requested = False
        self.iterations = 0

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        if self.state is not AgentState.CREATED:
            raise AlreadyRunning(f"agent {self.id} already started")
        self.state = AgentState.RUNNING

    def stop(self) -> None:
        """Idempotent; the loop exits at its next iteration boundary."""
        self._stop_requested = True
        if self.state is AgentState.RUNNING:
            self.state = AgentState.STOPPING

    def step(self) -> bool:
        """One loop iteration; False once the agent is finished."""
        if self.state is AgentState.STOPPED:
            return False
        if self.state is AgentState.CREATED:
            raise RuntimeError(f"agent {self.id} not started")
        if self._stop_requested or self.done():
            self.state = AgentState.STOPPED
            return False
        self.iterations += 1
        self._iterate()
        if self._stop_requested or self.done():
            self.state = AgentState.STOPPED
            return False
        return True

    def run(self) -> None:
        """Drive the loop to completion (blocking form of step())."""
        self.start()
        while self.step():
            pass

    # -- to be provided by concrete agents ------------------------------------

    def _iterate(self) -> None:
        raise NotImplementedError

    def done(self) -> bool:
        """Terminal condition beyond stop(); conversational agents never are."""
        return False
