"""
Closest distance between two closed 3D segments, in plain floats.

Called for every chain pair of every grid cell, so it avoids numpy on
3-vectors.
"""
import math
from typing import Sequence, Tuple

Vec = Sequence[float]

_DEGENERATE = 1e-30


def _sub(a: Vec, b: Vec) -> Tuple[float, float, float]:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


def closest_parameters(p1: Vec, q1: Vec, p2: Vec, q2: Vec) -> Tuple[float, float]:
    """Parameters (s, t) in [0,1]² of the closest points p1 + s(q1-p1), p2 + t(q2-p2)."""
    d1 = _sub(q1, p1)
    d2 = _sub(q2, p2)
    r = _sub(p1, p2)
    a = _dot(d1, d1)
    e = _dot(d2, d2)
    f = _dot(d2, r)

    if a <= _DEGENERATE and e <= _DEGENERATE:
        return 0.0, 0.0
    if a <= _DEGENERATE:
        return 0.0, _clamp01(f / e)

    c = _dot(d1, r)
    if e <= _DEGENERATE:
        return _clamp01(-c / a), 0.0

    b = _dot(d1, d2)
    denom = a * e - b * b
    # Parallel segments: any s works, start from 0 and let the clamps fix t and s
    s = _clamp01((b * f - c * e) / denom) if denom > 0.0 else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = _clamp01(-c / a)
    elif t > 1.0:
        t = 1.0
        s = _clamp01((b - c) / a)
    return s, t


def segment_distance(p1: Vec, q1: Vec, p2: Vec, q2: Vec) -> float:
    s, t = closest_parameters(p1, q1, p2, q2)
    dx = (p1[0] + s * (q1[0] - p1[0])) - (p2[0] + t * (q2[0] - p2[0]))
    dy = (p1[1] + s * (q1[1] - p1[1])) - (p2[1] + t * (q2[1] - p2[1]))
    dz = (p1[2] + s * (q1[2] - p1[2])) - (p2[2] + t * (q2[2] - p2[2]))
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def point_segment_distance(point: Vec, p: Vec, q: Vec) -> float:
    return segment_distance(point, point, p, q)
