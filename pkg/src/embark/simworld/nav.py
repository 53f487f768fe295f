"""Navigation as a bus action server over the kinematic world.

Contract: goals outside world bounds are rejected; success within
``tolerance`` of the goal point; abort after ``stall_limit`` consecutive
ticks without progress (blocked); cancels honored between ticks. One goal
at a time: a second goal while one is active is rejected.
"""

from __future__ import annotations

from typing import Any, Iterator

from embark.msgbus.actions import GoalContext
from embark.simworld.world import World

TOLERANCE = 0.25
STALL_LIMIT = 20
PROGRESS_EPS = 1e-9


def _valid_goal(goal: Any) -> bool:
    if not isinstance(goal, dict):
        return False
    for key in ("x", "y"):
        v = goal.get(key)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            return False
    return True


class NavActionServer:
    def __init__(
        self,
        world: World,
        tolerance: float = TOLERANCE,
        stall_limit: int = STALL_LIMIT,
    ) -> None:
        self.world = world
        self.tolerance = tolerance
        self.stall_limit = stall_limit
        self._busy = False

    def accept(self, goal: Any) -> bool:
        if self._busy or not _valid_goal(goal):
            return False
        return self.world.in_bounds(float(goal["x"]), float(goal["y"]))

    def execute(self, ctx: GoalContext) -> Iterator[None]:
        tx, ty = float(ctx.goal["x"]), float(ctx.goal["y"])
        self._busy = True
        self.world.robot.nav_target = (tx, ty)
        prev_distance: float | None = None
        stalled = 0
        try:
            while True:
                yield  # one world tick happens between executor steps
                d = self.world.robot.pose.distance_to(tx, ty)
                ctx.publish_feedback({"distance_remaining": round(d, 6)})
                if ctx.cancel_requested:
                    ctx.cancelled({"reached": False, "final_distance": round(d, 6)})
                    return
                if d <= self.tolerance:
                    ctx.succeed({"reached": True, "final_distance": round(d, 6)})
                    return
                if prev_distance is not None and d >= prev_distance - PROGRESS_EPS:
                    stalled += 1
                else:
                    stalled = 0
                if stalled >= self.stall_limit:
                    ctx.abort(
                        {"reached": False, "final_distance": round(d, 6), "reason": "blocked"}
                    )
                    return
                prev_distance = d
        finally:
            self._busy = False
            self.world.robot.nav_target = None
