"""Camera model and the open-set detector service.

Detections are deterministic: an object appears iff it is within the
field of view and range and no other solid footprint cuts the ray from
the sensor to its center. Queries against the detector are case
insensitive substrings of labels, which is the cheapest fully
deterministic stand-in for open-vocabulary detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from embark.simworld.geometry import segment_box_entry
from embark.simworld.world import World, WorldObject

FOV_DEG = 60.0  # half-angle
RANGE = 10.0


@dataclass(frozen=True)
class Detection:
    label: str
    distance: float
    bearing: float  # degrees relative to heading
    confidence: float


@dataclass(frozen=True)
class CameraObservation:
    tick: int
    detections: tuple[Detection, ...]


def _occluded(world: World, target: WorldObject) -> bool:
    pose = world.robot.pose
    for other in world.placed_objects():
        if other.id == target.id:
            continue
        if segment_box_entry(
            pose.x, pose.y, target.x, target.y, other.x, other.y, other.hx, other.hy
        ) is not None:
            return True
    return False


def observe(world: World) -> CameraObservation:
    pose = world.robot.pose
    detections = []
    for obj in world.placed_objects():
        distance = pose.distance_to(obj.x, obj.y)
        if distance > RANGE:
            continue
        bearing = pose.bearing_to(obj.x, obj.y)
        if abs(bearing) > FOV_DEG:
            continue
        if _occluded(world, obj):
            continue
        confidence = round(1.0 - distance / RANGE, 2)
        detections.append((distance, obj.label, obj.id, bearing, confidence))
    detections.sort(key=lambda d: (d[0], d[1], d[2]))
    return CameraObservation(
        tick=world.tick,
        detections=tuple(
            Detection(label, distance, bearing, confidence)
            for distance, label, _oid, bearing, confidence in detections
        ),
    )


def visible_objects(world: World) -> list[WorldObject]:
    """Ground-truth visibility, used by detector localization and oracles."""
    pose = world.robot.pose
    out = []
    for obj in world.placed_objects():
        if pose.distance_to(obj.x, obj.y) > RANGE:
            continue
        if abs(pose.bearing_to(obj.x, obj.y)) > FOV_DEG:
            continue
        if _occluded(world, obj):
            continue
        out.append(obj)
    out.sort(key=lambda o: (pose.distance_to(o.x, o.y), o.label, o.id))
    return out


def make_detect_handler(world: World) -> Callable[[Any], Any]:
    """Bus handler for the ``detect`` service: {queries: [text, ...]}.

    The response enriches each detection with the object's world position
    (the simulated detector is coupled to localization, like a detector
    node on a mapped robot), so planners can turn sightings into goals.
    """

    def handler(request: Any) -> Any:
        queries = request.get("queries") if isinstance(request, dict) else None
        if not isinstance(queries, list) or not all(isinstance(q, str) for q in queries):
            raise ValueError("detect request must be {queries: list of text}")
        pose = world.robot.pose
        hits = []
        for obj in visible_objects(world):
            if not any(q.lower() in obj.label.lower() for q in queries):
                continue
            distance = pose.distance_to(obj.x, obj.y)
            hits.append(
                {
                    "label": obj.label,
                    "distance": distance,
                    "bearing": pose.bearing_to(obj.x, obj.y),
                    "confidence": round(1.0 - distance / RANGE, 2),
                    "x": obj.x,
                    "y": obj.y,
                }
            )
        return {"detections": hits}

    return handler


def observation_to_payload(obs: CameraObservation) -> dict[str, Any]:
    return {
        "tick": obs.tick,
        "detections": [
            {
                "label": d.label,
                "distance": round(d.distance, 6),
                "bearing": round(d.bearing, 6),
                "confidence": d.confidence,
            }
            for d in obs.detections
        ],
    }


def render_observation(obs: CameraObservation) -> str:
    """Model-facing text: one line per detection, nearest first."""
    if not obs.detections:
        return "camera: nothing visible"
    lines = [
        f"{d.label}: distance={d.distance:.2f} bearing={d.bearing:.1f} confidence={d.confidence:.2f}"
        for d in obs.detections
    ]
    return "\n".join(lines)
