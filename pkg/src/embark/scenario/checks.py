"""Scenario checkers: verdicts computed from the transcript alone.

Every checker reads the transcript index (bus traffic, agent events,
world snapshots), so ``rai checkers --transcript run.jsonl`` can re-run
them long after the process that produced the run is gone. Checkers over
world geometry rebuild the world from the recorded snapshots.
"""

from __future__ import annotations

import math
from typing import Any

from embark.scenario.transcript import TranscriptIndex
from embark.simworld.checkers import check_sorted, check_stacked, check_swapped
from embark.simworld.geometry import point_box_distance
from embark.simworld.world import world_from_snapshot

TERMINAL_MISSION_STATUSES = ("succeeded", "failed")


def _expectation(spec: dict[str, Any], predicate_passed: bool, detail: str) -> dict[str, Any]:
    expect = spec.get("expect", "pass")
    met = predicate_passed if expect == "pass" else not predicate_passed
    return {
        "name": spec.get("name", spec["type"]),
        "passed": met,
        "detail": f"{detail} (expected to {expect})" if expect != "pass" else detail,
    }


def _mission_succeeded(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    records = [p["payload"] for p in index.bus_pubs("mission/status")]
    terminal = [r for r in records if r.get("status") in TERMINAL_MISSION_STATUSES]
    ok = len(terminal) == 1 and terminal[0]["status"] == "succeeded"
    detail = f"{len(terminal)} terminal record(s): " + ", ".join(
        f"{r['status']}:{r.get('report', '')}" for r in terminal
    )
    return _expectation(spec, ok, detail or "no terminal records")


def _final_distance(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    snap = index.final_snapshot()
    robot = snap["robot"]
    target = next((o for o in snap["objects"] if o["id"] == spec["object"]), None)
    if target is None:
        return _expectation(spec, False, f"object {spec['object']!r} missing from final snapshot")
    d = math.hypot(robot["x"] - target["x"], robot["y"] - target["y"])
    limit = float(spec.get("max", 0.25))
    ok = d <= limit
    return _expectation(spec, ok, f"final distance {d:.3f} (limit {limit:.3f})")


def _hri_responsive(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    needle = spec["contains"]
    asked_tick = None
    for event in index.inputs():
        if needle in str(event["payload"].get("text", "")):
            asked_tick = event["tick"]
            break
    if asked_tick is None:
        return _expectation(spec, False, f"no input containing {needle!r}")
    for pub in index.bus_pubs("hri/out"):
        payload = pub["payload"]
        if pub["tick"] >= asked_tick and isinstance(payload, dict) and \
                set(payload.keys()) == {"text"}:
            lag = pub["tick"] - asked_tick
            ok = lag <= int(spec.get("max_ticks", 1))
            return _expectation(spec, ok, f"answered after {lag} tick(s)")
    return _expectation(spec, False, "question never answered on hri/out")


def _sorted(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    world = world_from_snapshot(index.final_snapshot())
    result = check_sorted(world, spec["groups"])
    return _expectation(spec, result.passed, result.diagnosis)


def _stacked(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    world = world_from_snapshot(index.final_snapshot())
    result = check_stacked(world, spec["order"])
    return _expectation(spec, result.passed, result.diagnosis)


def _swapped(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    world = world_from_snapshot(index.final_snapshot())
    initial = {
        o["id"]: (o["x"], o["y"]) for o in index.initial_snapshot()["objects"]
    }
    result = check_swapped(world, tuple(spec["pair"]), initial)
    return _expectation(spec, result.passed, result.diagnosis)


def _expect_error(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    code = spec["code"]
    hits = [e for e in index.tool_outcomes("error") if code in e["payload"].get("text", "")]
    ok = len(hits) >= int(spec.get("at_least", 1))
    return _expectation(spec, ok, f"{len(hits)} tool error(s) mentioning {code}")


def _safety_violations(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    count = index.final_snapshot().get("safety_violations", 0)
    want = int(spec.get("count", 0))
    return _expectation(spec, count == want, f"{count} safety violation(s), wanted {want}")


def _resolution(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    pubs = [p["payload"] for p in index.bus_pubs("anomaly/resolutions")]
    values = [p.get("resolution") for p in pubs]
    ok = len(values) == int(spec.get("count", 1)) and all(v == spec["value"] for v in values)
    return _expectation(spec, ok, f"resolutions published: {values}")


def _tractor_status(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    pubs = [p["payload"] for p in index.bus_pubs("tractor/status")]
    last = pubs[-1].get("status") if pubs else None
    return _expectation(spec, last == spec["value"], f"tractor status {last!r}")


def _detour_clearance(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    final = index.final_snapshot()
    obstacle = next(
        (o for o in final["objects"] if o["label"] == spec["obstacle_kind"]), None
    )
    if obstacle is None:
        return _expectation(spec, False, f"no {spec['obstacle_kind']} in world")
    clearances = []
    for snap in index.snapshots():
        robot = snap["payload"]["robot"]
        clearances.append(
            point_box_distance(robot["x"], robot["y"], obstacle["x"], obstacle["y"],
                               obstacle["hx"], obstacle["hy"])
        )
    low = min(clearances) if clearances else float("inf")
    ok = low >= float(spec.get("min", 0.5))
    return _expectation(spec, ok, f"min robot-obstacle clearance {low:.3f}")


def _image_parts(index: TranscriptIndex, spec: dict[str, Any]) -> dict[str, Any]:
    count = 0
    for event in index.agent_events(spec["agent"], "message"):
        if event["payload"].get("role") == "user":
            count += len(event["payload"].get("image_refs", []))
    want = int(spec["count"])
    return _expectation(spec, count == want, f"{count} image part(s) in user turns, wanted {want}")


_CHECKERS = {
    "mission_succeeded": _mission_succeeded,
    "final_distance": _final_distance,
    "hri_responsive": _hri_responsive,
    "sorted": _sorted,
    "stacked": _stacked,
    "swapped": _swapped,
    "expect_error": _expect_error,
    "safety_violations": _safety_violations,
    "resolution": _resolution,
    "tractor_status": _tractor_status,
    "detour_clearance": _detour_clearance,
    "image_parts": _image_parts,
}


def evaluate_checkers(index: TranscriptIndex, specs: list[dict[str, Any]]) -> list[dict[str, Any]]:
    results = []
    for spec in specs:
        checker = _CHECKERS.get(spec.get("type"))
        if checker is None:
            results.append(
                {"name": spec.get("type", "?"), "passed": False,
                 "detail": f"unknown checker type {spec.get('type')!r}"}
            )
            continue
        try:
            results.append(checker(index, spec))
        except Exception as exc:
            results.append(
                {"name": spec.get("name", spec.get("type", "?")), "passed": False,
                 "detail": f"checker crashed: {exc}"}
            )
    return results
