"""2D geometry: poses, axis-aligned boxes, sweeps, oriented rectangles."""

from __future__ import annotations

import math
from dataclasses import dataclass


def wrap_deg(angle: float) -> float:
    """Normalize to [0, 360)."""
    a = math.fmod(angle, 360.0)
    return a + 360.0 if a < 0 else a


def wrap_signed_deg(angle: float) -> float:
    """Normalize to (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a > 180.0:
        a -= 360.0
    elif a <= -180.0:
        a += 360.0
    return a


@dataclass
class Pose2D:
    x: float
    y: float
    heading: float = 0.0  # degrees in [0, 360)

    def __post_init__(self) -> None:
        self.heading = wrap_deg(self.heading)

    def distance_to(self, x: float, y: float) -> float:
        return math.hypot(x - self.x, y - self.y)

    def bearing_to(self, x: float, y: float) -> float:
        """Bearing relative to heading, degrees in (-180, 180]."""
        absolute = math.degrees(math.atan2(y - self.y, x - self.x))
        return wrap_signed_deg(absolute - self.heading)


def aabb_overlap(
    x1: float, y1: float, hx1: float, hy1: float,
    x2: float, y2: float, hx2: float, hy2: float,
) -> bool:
    """Strict interior overlap; touching boundaries do not count."""
    return abs(x1 - x2) < hx1 + hx2 and abs(y1 - y2) < hy1 + hy2


def intervals_overlap(a0: float, a1: float, b0: float, b1: float) -> bool:
    """Strict overlap of [a0, a1) and [b0, b1)."""
    return a0 < b1 and b0 < a1


def segment_box_entry(
    px: float, py: float, qx: float, qy: float,
    cx: float, cy: float, hx: float, hy: float,
) -> float | None:
    """Earliest t in [0, 1] where segment p->q enters the open box, or None.

    Slab method. A segment that merely grazes the boundary never enters
    the interior and returns None; a start point already inside returns 0.
    """
    dx, dy = qx - px, qy - py
    t0, t1 = 0.0, 1.0
    for d, p, lo, hi in ((dx, px, cx - hx, cx + hx), (dy, py, cy - hy, cy + hy)):
        if d == 0.0:
            if p <= lo or p >= hi:
                return None
            continue
        ta = (lo - p) / d
        tb = (hi - p) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 >= t1:
            return None
    return t0


def point_box_distance(px: float, py: float, cx: float, cy: float, hx: float, hy: float) -> float:
    dx = max(abs(px - cx) - hx, 0.0)
    dy = max(abs(py - cy) - hy, 0.0)
    return math.hypot(dx, dy)


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    norm2 = vx * vx + vy * vy
    if norm2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / norm2))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def segment_box_distance(
    px: float, py: float, qx: float, qy: float,
    cx: float, cy: float, hx: float, hy: float,
) -> float:
    """Minimum distance from segment p->q to the closed box."""
    if segment_box_entry(px, py, qx, qy, cx, cy, hx, hy) is not None:
        return 0.0
    corners = ((cx - hx, cy - hy), (cx - hx, cy + hy), (cx + hx, cy - hy), (cx + hx, cy + hy))
    candidates = [point_box_distance(px, py, cx, cy, hx, hy),
                  point_box_distance(qx, qy, cx, cy, hx, hy)]
    candidates += [_point_segment_distance(x, y, px, py, qx, qy) for x, y in corners]
    return min(candidates)


def oriented_rect_corners(
    x: float, y: float, heading_deg: float, length: float, width: float
) -> list[tuple[float, float]]:
    """Corners of a rectangle extending ``length`` ahead of (x, y)."""
    rad = math.radians(heading_deg)
    fx, fy = math.cos(rad), math.sin(rad)
    lx, ly = -fy, fx  # left normal
    half = width / 2.0
    base_l = (x + lx * half, y + ly * half)
    base_r = (x - lx * half, y - ly * half)
    tip_l = (base_l[0] + fx * length, base_l[1] + fy * length)
    tip_r = (base_r[0] + fx * length, base_r[1] + fy * length)
    return [base_l, tip_l, tip_r, base_r]


def convex_polys_intersect(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> bool:
    """Separating-axis test between two convex polygons (strict overlap)."""
    for poly_a, poly_b in ((a, b), (b, a)):
        n = len(poly_a)
        for i in range(n):
            ax0, ay0 = poly_a[i]
            ax1, ay1 = poly_a[(i + 1) % n]
            nx, ny = ay1 - ay0, ax0 - ax1  # edge normal
            proj_a = [nx * x + ny * y for x, y in poly_a]
            proj_b = [nx * x + ny * y for x, y in poly_b]
            if max(proj_a) <= min(proj_b) or max(proj_b) <= min(proj_a):
                return False
    return True


def aabb_corners(cx: float, cy: float, hx: float, hy: float) -> list[tuple[float, float]]:
    return [(cx - hx, cy - hy), (cx + hx, cy - hy), (cx + hx, cy + hy), (cx - hx, cy + hy)]
