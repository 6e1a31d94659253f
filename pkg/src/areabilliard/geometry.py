"""Convex polygons, their boundary chart and chord areas.

The boundary of a polygon with counterclockwise vertices ``P_0 ... P_{n-1}``
is charted by normalized arc length ``s`` in ``[0, 1)``, starting at ``P_0``.
Side ``k`` is the half-open segment ``[P_k, P_{k+1})``, so a vertex belongs
to its outgoing side with ``t = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import _pykernels
from .errors import DegenerateChord, DuplicateVertex, NonConvex, TooFewVertices

# relative tolerance for lengths (scaled by the perimeter) and cross products
TOL = 1e-12


class KernelData(NamedTuple):
    xs: object
    ys: object
    cum: object


@dataclass(frozen=True, eq=False)
class Polygon:
    vertices: np.ndarray
    side_lengths: np.ndarray
    cumulative_arc: np.ndarray
    perimeter: float
    area: float
    _arrays: KernelData = field(repr=False)
    _lists: KernelData = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex(self, k: int) -> np.ndarray:
        return self.vertices[k % self.n]

    def side_direction(self, k: int) -> np.ndarray:
        return self.vertex(k + 1) - self.vertex(k)

    def kernel_args(self, backend: str) -> KernelData:
        return self._lists if backend == "python" else self._arrays

    def to_json(self) -> str:
        return json.dumps(self.vertices.tolist())


@dataclass(frozen=True)
class BoundaryPoint:
    side: int
    t: float
    xy: tuple
    s: float

    def __iter__(self):
        return iter(self.xy)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def validate_polygon(points: Sequence[Sequence[float]]) -> Polygon:
    """Build a strictly convex, counterclockwise :class:`Polygon`.

    Clockwise input is reversed while keeping the first vertex first, so the
    arc-length origin stays at the first input point.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected a list of [x, y] pairs")
    n = len(pts)
    if n < 3:
        raise TooFewVertices(f"need at least 3 vertices, got {n}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("vertex coordinates must be finite")

    scale = float(np.ptp(pts, axis=0).max())
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    if scale == 0.0 or np.any(lengths <= TOL * scale):
        raise DuplicateVertex("consecutive vertices coincide")

    signed = 0.5 * float(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1) - np.roll(pts[:, 0], -1) * pts[:, 1]))
    if signed < 0:
        pts = np.concatenate([pts[:1], pts[:0:-1]])
        edges = np.roll(pts, -1, axis=0) - pts
        lengths = np.hypot(edges[:, 0], edges[:, 1])

    prev = np.roll(edges, 1, axis=0)
    prev_len = np.roll(lengths, 1)
    cross = prev[:, 0] * edges[:, 1] - prev[:, 1] * edges[:, 0]
    bad = np.nonzero(cross <= TOL * prev_len * lengths)[0]
    if len(bad):
        raise NonConvex(f"vertex {int(bad[0])} is reflex or collinear with its neighbours")
    dot = np.sum(prev * edges, axis=1)
    turning = float(np.sum(np.arctan2(cross, dot)))
    if abs(turning - 2 * math.pi) > 1e-9:
        raise NonConvex("boundary winds more than once (self-intersecting)")

    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    xs = np.ascontiguousarray(pts[:, 0])
    ys = np.ascontiguousarray(pts[:, 1])
    area = 0.5 * math.fsum(
        float(xs[k] * ys[(k + 1) % n] - xs[(k + 1) % n] * ys[k]) for k in range(n)
    )
    return Polygon(
        vertices=pts,
        side_lengths=lengths,
        cumulative_arc=cum,
        perimeter=float(cum[-1]),
        area=area,
        _arrays=KernelData(xs, ys, np.ascontiguousarray(cum)),
        _lists=KernelData(xs.tolist(), ys.tolist(), cum.tolist()),
    )


def load_polygon(path: str | Path) -> Polygon:
    with open(path) as fh:
        return validate_polygon(json.load(fh))


def unit_square() -> Polygon:
    return validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def regular_polygon(n: int, side: float = 1.0) -> Polygon:
    """Regular ``n``-gon with the given side length and its first side on the x-axis."""
    pts = [(0.0, 0.0)]
    for k in range(n - 1):
        ang = 2 * math.pi * k / n
        x, y = pts[-1]
        pts.append((x + side * math.cos(ang), y + side * math.sin(ang)))
    return validate_polygon(pts)


def house_pentagon() -> Polygon:
    return validate_polygon([(0, 0), (2, 0), (2, 1), (1, 2), (0, 1)])


BUILTIN_POLYGONS = {
    "square": unit_square,
    "regular-pentagon": lambda: regular_polygon(5),
    "house-pentagon": house_pentagon,
}


def point_from(poly: Polygon, side: int, t: float) -> BoundaryPoint:
    side = side % poly.n
    if (1.0 - t) * poly.side_lengths[side] <= TOL * poly.perimeter:
        side, t = (side + 1) % poly.n, 0.0
    p, q = poly.vertex(side), poly.vertex(side + 1)
    xy = (float(p[0] + t * (q[0] - p[0])), float(p[1] + t * (q[1] - p[1])))
    s = _pykernels.position(poly._lists.cum, side, t)
    return BoundaryPoint(side, float(t), xy, s)


def point_at(poly: Polygon, s: float) -> BoundaryPoint:
    frac = s - math.floor(s)
    if frac >= 1.0:
        frac = 0.0
    side, t = _pykernels.locate(poly._lists.cum, frac)
    return point_from(poly, side, t)


def arc_of(x: BoundaryPoint) -> float:
    return x.s


def project_to_boundary(poly: Polygon, xy: Sequence[float]) -> BoundaryPoint:
    """Boundary point nearest to ``xy`` (used to seed points given by coordinates)."""
    p = np.asarray(xy, dtype=float)
    best = None
    for k in range(poly.n):
        a, d = poly.vertex(k), poly.side_direction(k)
        t = float(np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0))
        dist = float(np.hypot(*(a + t * d - p)))
        if best is None or dist < best[0]:
            best = (dist, k, t)
    return point_from(poly, best[1], min(best[2], 1.0))


def _shoelace(pts) -> float:
    m = len(pts)
    return 0.5 * math.fsum(
        pts[i][0] * pts[(i + 1) % m][1] - pts[(i + 1) % m][0] * pts[i][1] for i in range(m)
    )


def cut_region(poly: Polygon, x: BoundaryPoint, y: BoundaryPoint) -> list:
    """Vertices of the region between chord ``x -> y`` and the ccw arc from ``x`` to ``y``."""
    if x.side == y.side and x.t == y.t:
        return []
    count = (y.side - x.side) % poly.n
    if count == 0 and y.t < x.t:
        count = poly.n
    region = [x.xy]
    region += [tuple(poly.vertex(x.side + j)) for j in range(1, count + 1)]
    region.append(y.xy)
    return region


def cut_area(poly: Polygon, x: BoundaryPoint, y: BoundaryPoint) -> float:
    region = cut_region(poly, x, y)
    if not region:
        return 0.0
    return _shoelace(region)


def side_line_intersection(poly: Polygon, i: int, j: int):
    """Intersection of the lines through sides ``i`` and ``j``; ``None`` if parallel."""
    p, d = poly.vertex(i), poly.side_direction(i)
    q, e = poly.vertex(j), poly.side_direction(j)
    return line_intersection(p, d, q, e)


def line_intersection(p, d, q, e):
    p, d, q, e = (np.asarray(v, dtype=float) for v in (p, d, q, e))
    den = _cross(d[0], d[1], e[0], e[1])
    if abs(den) <= TOL * float(np.hypot(*d) * np.hypot(*e)):
        return None
    w = q - p
    u = _cross(w[0], w[1], e[0], e[1]) / den
    return p + u * d


def distance_to_line(p, a, d) -> float:
    """Distance from ``p`` to the line through ``a`` with direction ``d``."""
    p, a, d = (np.asarray(v, dtype=float) for v in (p, a, d))
    w = p - a
    return abs(_cross(d[0], d[1], w[0], w[1])) / float(np.hypot(*d))


def half_plane_sign(chord_from, chord_to, p, scale: float | None = None) -> int:
    """Side of ``p`` relative to the directed chord: +1 left, -1 right, 0 on it.

    ``scale`` sets the length scale for the tolerance band (defaults to the
    chord length); pass the polygon perimeter for boundary chords.
    """
    a = np.asarray(chord_from, dtype=float)
    b = np.asarray(chord_to, dtype=float)
    d = b - a
    length = float(np.hypot(*d))
    if scale is None:
        scale = length
    if length <= TOL * scale:
        raise DegenerateChord("chord endpoints coincide")
    w = np.asarray(p, dtype=float) - a
    c = _cross(d[0], d[1], w[0], w[1]) / length
    if abs(c) <= TOL * scale:
        return 0
    return 1 if c > 0 else -1
