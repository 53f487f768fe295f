"""Discrete pick/place manipulation as a bus service.

Physical constraints are enforced, never silently fixed: placing into an
occupied volume answers OVERLAP, placing onto a covered object answers
TOP_OCCUPIED, and so on. Constraint outcomes are normal responses
({"ok": false, "error": CODE, ...}); only malformed requests raise.
"""

from __future__ import annotations

from typing import Any, Callable

from embark.simworld.world import World


def _ok(**extra: Any) -> dict[str, Any]:
    return {"ok": True, **extra}


def _err(code: str, message: str) -> dict[str, Any]:
    return {"ok": False, "error": code, "message": message}


def _pick(world: World, obj_id: str) -> dict[str, Any]:
    if world.held is not None:
        return _err("ALREADY_HOLDING", f"effector already holds {world.held!r}")
    obj = world.objects.get(obj_id)
    if obj is None or obj.fixed:
        return _err("NOT_FOUND", f"no pickable object {obj_id!r}")
    stacked = world.supported_objects(obj_id)
    if stacked:
        return _err("TOP_OCCUPIED", f"{stacked[0].id!r} rests on {obj_id!r}")
    obj.supported_by = None
    world.held = obj_id
    return _ok(held=obj_id)


def _place_at(world: World, x: float, y: float) -> dict[str, Any]:
    if world.held is None:
        return _err("NOTHING_HELD", "effector is empty")
    obj = world.objects[world.held]
    hit = world.collides(obj.id, x, y, 0.0)
    if hit is not None:
        return _err(
            "OVERLAP",
            f"placing {obj.id!r} at ({x}, {y}) intersects {hit.id!r}",
        )
    obj.x, obj.y, obj.z = x, y, 0.0
    obj.supported_by = None
    world.held = None
    return _ok(placed=obj.id, x=x, y=y)


def _place_on(world: World, target_id: str) -> dict[str, Any]:
    if world.held is None:
        return _err("NOTHING_HELD", "effector is empty")
    obj = world.objects[world.held]
    target = world.objects.get(target_id)
    if target is None or target_id == obj.id:
        return _err("NOT_FOUND", f"no target object {target_id!r}")
    covered = world.supported_objects(target_id)
    if covered:
        return _err("TOP_OCCUPIED", f"{covered[0].id!r} already rests on {target_id!r}")
    z = target.z + target.height
    hit = world.collides(obj.id, target.x, target.y, z)
    if hit is not None:
        return _err(
            "OVERLAP",
            f"placing {obj.id!r} on {target_id!r} intersects {hit.id!r}",
        )
    obj.x, obj.y, obj.z = target.x, target.y, z
    obj.supported_by = target_id
    world.held = None
    return _ok(placed=obj.id, on=target_id, z=z)


def make_manip_handler(world: World) -> Callable[[Any], Any]:
    """Bus handler for the ``manip`` service."""

    def handler(request: Any) -> Any:
        if not isinstance(request, dict) or "op" not in request:
            raise ValueError("manip request must be a map with an 'op'")
        op = request["op"]
        if op == "pick":
            if not isinstance(request.get("id"), str):
                raise ValueError("pick needs an object 'id'")
            return _pick(world, request["id"])
        if op == "place_at":
            for key in ("x", "y"):
                v = request.get(key)
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ValueError(f"place_at needs numeric {key!r}")
            return _place_at(world, float(request["x"]), float(request["y"]))
        if op == "place_on":
            if not isinstance(request.get("target"), str):
                raise ValueError("place_on needs a 'target' id")
            return _place_on(world, request["target"])
        raise ValueError(f"unknown manip op {op!r}")

    return handler
