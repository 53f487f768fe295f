"""Task checkers: pure predicates over world state with a diagnosis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from embark.simworld.world import World

SWAP_TOLERANCE = 0.1


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    diagnosis: str

    def __bool__(self) -> bool:
        return self.passed


def _inside(x: float, y: float, rect: Sequence[float]) -> bool:
    x0, y0, x1, y1 = rect
    return x0 <= x <= x1 and y0 <= y <= y1


def check_sorted(world: World, groups: Sequence[Mapping[str, Any]]) -> CheckResult:
    """Every object matching a group's labels must sit inside its region.

    groups: [{"match": [label substrings], "region": region name}, ...]
    """
    misplaced = []
    for group in groups:
        rect = world.regions.get(group["region"])
        if rect is None:
            return CheckResult(False, f"unknown region {group['region']!r}")
        needles = [m.lower() for m in group["match"]]
        for obj in world.placed_objects():
            if obj.fixed or not any(n in obj.label.lower() for n in needles):
                continue
            if not _inside(obj.x, obj.y, rect):
                misplaced.append(f"{obj.id} outside {group['region']}")
    if misplaced:
        return CheckResult(False, "; ".join(sorted(misplaced)))
    return CheckResult(True, "all groups in their regions")


def check_stacked(world: World, order: Sequence[str]) -> CheckResult:
    """The supported_by chain must equal `order`, bottom-up."""
    if not order:
        return CheckResult(False, "empty stack order")
    base = world.objects.get(order[0])
    if base is None:
        return CheckResult(False, f"level 0 expected {order[0]} found nothing")
    if base.supported_by is not None:
        return CheckResult(False, f"level 0 expected {order[0]} on the ground")
    for level in range(1, len(order)):
        below = order[level - 1]
        on_top = world.supported_objects(below)
        if not on_top:
            return CheckResult(False, f"level {level} expected {order[level]} found nothing")
        found = on_top[0].id if len(on_top) == 1 else ",".join(o.id for o in on_top)
        if len(on_top) != 1 or on_top[0].id != order[level]:
            return CheckResult(False, f"level {level} expected {order[level]} found {found}")
    return CheckResult(True, f"stack {'<-'.join(order)} in place")


def check_swapped(
    world: World,
    pair: tuple[str, str],
    initial_positions: Mapping[str, tuple[float, float]],
    tolerance: float = SWAP_TOLERANCE,
) -> CheckResult:
    """Each object of the pair must rest where the other started."""
    a, b = pair
    problems = []
    for here, origin in ((a, b), (b, a)):
        obj = world.objects.get(here)
        if obj is None:
            return CheckResult(False, f"{here} missing from world")
        ox, oy = initial_positions[origin]
        if math.hypot(obj.x - ox, obj.y - oy) > tolerance:
            problems.append(f"{here} not at {origin}'s origin")
    if problems:
        return CheckResult(False, "; ".join(problems))
    return CheckResult(True, f"{a} and {b} swapped")
