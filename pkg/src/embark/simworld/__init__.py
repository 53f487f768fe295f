"""Deterministic tick-based 2D world behind bus endpoints.

Continuous coordinates, axis-aligned footprints, discrete ticks. Agents
reach the world through the bus: action ``nav/goto``, services ``detect``
and ``manip``; the world itself is stepped by the scenario runner.
"""

from embark.simworld.geometry import Pose2D, aabb_overlap, point_box_distance, segment_box_distance
from embark.simworld.world import (
    World,
    WorldObject,
    load_world,
    world_from_dict,
    snapshot,
    world_hash,
)
from embark.simworld.sensing import CameraObservation, Detection, observe, make_detect_handler
from embark.simworld.nav import NavActionServer
from embark.simworld.manip import make_manip_handler
from embark.simworld.checkers import CheckResult, check_sorted, check_stacked, check_swapped
from embark.simworld import orchard

__all__ = [
    "CameraObservation",
    "CheckResult",
    "Detection",
    "NavActionServer",
    "Pose2D",
    "World",
    "WorldObject",
    "aabb_overlap",
    "check_sorted",
    "check_stacked",
    "check_swapped",
    "load_world",
    "make_detect_handler",
    "make_manip_handler",
    "observe",
    "orchard",
    "point_box_distance",
    "segment_box_distance",
    "snapshot",
    "world_from_dict",
    "world_hash",
]
