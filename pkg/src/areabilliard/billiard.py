"""The constant-area chord map on a polygon boundary.

``phi`` sends a boundary point ``x`` to the point ``y`` counterclockwise of it
such that the chord ``xy`` cuts off area ``A`` together with the boundary arc
from ``x`` to ``y``.  The chords envelope an outer billiard table, tangent
at their midpoints, for which the polygon is an invariant curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import BACKEND, kernels
from .errors import AreaOutOfRange, VertexNonSmooth
from .geometry import (
    TOL,
    BoundaryPoint,
    Polygon,
    distance_to_line,
    line_intersection,
    point_at,
    point_from,
)

FD_STEP = 1e-7


@dataclass(frozen=True)
class MapConfig:
    poly: Polygon
    A: float

    def __post_init__(self):
        check_area(self.poly, self.A)

    @property
    def a(self) -> float:
        """Area parameter ``a = 2A``."""
        return 2.0 * self.A

    @classmethod
    def from_a(cls, poly: Polygon, a: float) -> "MapConfig":
        return cls(poly, a / 2.0)


@dataclass
class OrbitRecord:
    points: list
    lift_values: list
    winding: int
    derivative_product: float
    step_derivatives: list = field(default_factory=list)
    # indices of steps whose derivative came from finite differences
    fd_steps: list = field(default_factory=list)
    areas: list = field(default_factory=list)

    @property
    def closure_error(self) -> float:
        return self.lift_values[-1] - self.lift_values[0] - self.winding


def check_area(poly: Polygon, A: float) -> None:
    if not (0.0 < A < 0.5 * poly.area):
        raise AreaOutOfRange(f"area {A!r} outside (0, S/2) with S = {poly.area!r}")


def _kargs(poly: Polygon):
    return poly.kernel_args(BACKEND)


def phi_step_area(poly: Polygon, x: BoundaryPoint, area: float) -> BoundaryPoint:
    """One chord step cutting ``area`` (which may vary from step to step)."""
    check_area(poly, area)
    xs, ys, cum = _kargs(poly)
    side, t, _ = kernels.step(xs, ys, cum, area, x.side, x.t)
    if side < 0:
        raise AreaOutOfRange(f"no chord of area {area!r} from {x.xy}")
    return point_from(poly, side, t)


def phi(cfg: MapConfig, x: BoundaryPoint) -> BoundaryPoint:
    return phi_step_area(cfg.poly, x, cfg.A)


def phi_lift(cfg: MapConfig, s: float) -> float:
    """Lift ``F`` of ``phi`` to the real line: ``F(s + 1) = F(s) + 1``."""
    xs, ys, cum = _kargs(cfg.poly)
    return kernels.lift_iterate(xs, ys, cum, cfg.A, s, 1)


def lift_parts(cfg: MapConfig, s: float) -> tuple:
    """``F(s)`` split as ``(integer part, boundary coordinate in [0, 1))``.

    ``F(s + 1) = F(s) + 1`` holds exactly in this form, while the float sum
    can round differently on either side of an integer.
    """
    base = math.floor(s)
    x = point_at(cfg.poly, s)
    xs, ys, cum = _kargs(cfg.poly)
    side, t, wrapped = kernels.step(xs, ys, cum, cfg.A, x.side, x.t)
    return base + int(wrapped), kernels.position(cum, side, t)


def lift_n(cfg: MapConfig, s: float, n: int) -> float:
    """``F^n(s)``."""
    xs, ys, cum = _kargs(cfg.poly)
    return kernels.lift_iterate(xs, ys, cum, cfg.A, s, int(n))


def lift_areas(poly: Polygon, areas: Sequence[float], s: float) -> float:
    """Lift of the composed steps cutting ``areas[0]``, ``areas[1]``, ..."""
    for area in areas:
        check_area(poly, area)
    xs, ys, cum = _kargs(poly)
    return kernels.lift_areas(xs, ys, cum, [float(a) for a in areas], s)


def near_vertex(poly: Polygon, x: BoundaryPoint) -> bool:
    length = poly.side_lengths[x.side]
    tol = TOL * poly.perimeter
    return x.t * length <= tol or (1.0 - x.t) * length <= tol


def step_derivative(poly: Polygon, x: BoundaryPoint, area: float) -> float:
    """Arc-length derivative of one step, as a ratio of side-line distances.

    Moving ``x`` along its side by ``dx`` changes the cut area by
    ``-dist(y, line(x)) dx / 2``; moving ``y`` by ``dy`` changes it by
    ``+dist(x, line(y)) dy / 2``.
    """
    y = phi_step_area(poly, x, area)
    if near_vertex(poly, x) or near_vertex(poly, y):
        raise VertexNonSmooth(f"orbit point at a vertex: {x.xy} -> {y.xy}")
    hy = distance_to_line(y.xy, poly.vertex(x.side), poly.side_direction(x.side))
    hx = distance_to_line(x.xy, poly.vertex(y.side), poly.side_direction(y.side))
    return hy / hx


def derivative(cfg: MapConfig, x: BoundaryPoint) -> float:
    return step_derivative(cfg.poly, x, cfg.A)


def _fd_step_derivative(poly: Polygon, s: float, area: float, h: float = FD_STEP) -> float:
    return (lift_areas(poly, [area], s + h) - lift_areas(poly, [area], s - h)) / (2 * h)


def orbit_areas(poly: Polygon, s0: float, areas: Sequence[float]) -> OrbitRecord:
    """Orbit of ``s0`` under steps cutting ``areas`` in turn."""
    areas = [float(a) for a in areas]
    for area in areas:
        check_area(poly, area)
    xs, ys, cum = _kargs(poly)
    base = math.floor(s0)
    x = point_at(poly, s0)
    points, lifts = [x], [float(s0)]
    turns = 0
    derivs, fd_steps = [], []
    product = 1.0
    for i, area in enumerate(areas):
        try:
            dv = step_derivative(poly, x, area)
        except VertexNonSmooth:
            dv = _fd_step_derivative(poly, lifts[-1], area)
            fd_steps.append(i)
        side, t, wrapped = kernels.step(xs, ys, cum, area, x.side, x.t)
        turns += bool(wrapped)
        x = point_from(poly, side, t)
        points.append(x)
        lifts.append((base + turns) + x.s)
        derivs.append(dv)
        product *= dv
    winding = math.floor(lifts[-1] - lifts[0] + 1e-9)
    return OrbitRecord(points, lifts, winding, product, derivs, fd_steps, areas)


def orbit(cfg: MapConfig, s0: float, n: int) -> OrbitRecord:
    if n < 1:
        raise ValueError("orbit length must be at least 1")
    return orbit_areas(cfg.poly, s0, [cfg.A] * int(n))


def envelope_midpoint(cfg: MapConfig, x: BoundaryPoint) -> np.ndarray:
    """Point where the chord from ``x`` touches the table (its midpoint)."""
    y = phi(cfg, x)
    return 0.5 * (np.asarray(x.xy) + np.asarray(y.xy))


def chord_intersection(cfg: MapConfig, s1: float, s2: float):
    """Intersection of the chords starting at ``s1`` and ``s2``; ``None`` if parallel."""
    x1, x2 = point_at(cfg.poly, s1), point_at(cfg.poly, s2)
    y1, y2 = phi(cfg, x1), phi(cfg, x2)
    p1, p2 = np.asarray(x1.xy), np.asarray(x2.xy)
    return line_intersection(p1, np.asarray(y1.xy) - p1, p2, np.asarray(y2.xy) - p2)
