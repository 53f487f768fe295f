"""Injectable clocks.

Everything in the runtime that needs time goes through a :class:`Clock` so
tests can run on virtual time and produce identical interleavings on every
run. ``FakeClock.sleep`` advances virtual time instead of blocking, which
lets timeout paths execute deterministically in a single thread.
"""

from __future__ import annotations

import time
from typing import Protocol, runtime_checkable


@runtime_checkable
class Clock(Protocol):
    def now_ms(self) -> int:
        """Current time in integer milliseconds."""
        ...

    def sleep(self, ms: int) -> None:
        """Wait for ``ms`` milliseconds (virtually or for real)."""
        ...


class WallClock:
    """Real time, used by live runs."""

    def now_ms(self) -> int:
        return int(time.time() * 1000)

    def sleep(self, ms: int) -> None:
        if ms > 0:
            time.sleep(ms / 1000.0)


class FakeClock:
    """Virtual time under explicit control.

    ``sleep`` advances the clock immediately; nothing blocks. Start time
    defaults to 0 so timestamps in transcripts are stable across runs.
    """

    def __init__(self, start_ms: int = 0) -> None:
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def advance(self, ms: int) -> None:
        if ms < 0:
            raise ValueError("cannot move time backwards")
        self._now += ms

    def sleep(self, ms: int) -> None:
        self.advance(max(ms, 0))
