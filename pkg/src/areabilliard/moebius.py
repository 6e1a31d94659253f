"""Line-to-line constant-area maps as projective transformations.

For two lines ``l_k`` and ``l_{k+1}`` meeting at ``I_k``, the map sends a point
``u`` on ``l_k`` to the point ``v`` on ``l_{k+1}`` such that the triangle
``(u, I_k, v)`` has area ``c``.  In coordinates centred at ``I_k`` this is
``U * V = const``, a Moebius transformation that swaps ``I_k`` and infinity.
Composing the maps around a closed configuration of lines can give the
identity even though every factor is far from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ParallelLines
from .geometry import TOL, line_intersection

INF = math.inf


@dataclass(frozen=True)
class ChartedLine:
    """Line ``origin + u * direction`` with ``u`` in the extended reals."""

    origin: tuple
    direction: tuple

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        norm = float(np.hypot(*d))
        if norm == 0.0:
            raise ValueError("line direction must be nonzero")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "direction", tuple(float(v) for v in d / norm))

    @classmethod
    def through(cls, p, q) -> "ChartedLine":
        """Chart with origin ``p`` and direction toward ``q``."""
        return cls(tuple(p), tuple(np.asarray(q, dtype=float) - np.asarray(p, dtype=float)))

    def point(self, u: float):
        if math.isinf(u):
            return None
        return np.asarray(self.origin) + u * np.asarray(self.direction)

    def coord(self, p) -> float:
        w = np.asarray(p, dtype=float) - np.asarray(self.origin)
        return float(np.dot(w, self.direction))

    def distance(self, p) -> float:
        w = np.asarray(p, dtype=float) - np.asarray(self.origin)
        d = self.direction
        return abs(d[0] * w[1] - d[1] * w[0])


def _homog(u: float) -> np.ndarray:
    return np.array([1.0, 0.0]) if math.isinf(u) else np.array([u, 1.0])


def same_point(u: float, v: float, tol: float = 1e-9) -> bool:
    """Equality on the projective line, comparing homogeneous coordinates."""
    a, b = _homog(u), _homog(v)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    return abs(a[0] * b[1] - a[1] * b[0]) <= tol


@dataclass(frozen=True, eq=False)
class ProjMap:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(2, 2)
        if abs(np.linalg.det(m)) <= 1e-12 * float(np.sum(m * m)):
            raise ValueError("singular projective map")
        object.__setattr__(self, "m", m)

    def apply(self, u: float) -> float:
        (a, b), (c, d) = self.m
        if math.isinf(u):
            num, den = a, c
        else:
            num, den = a * u + b, c * u + d
        if den == 0.0:
            return INF
        return num / den

    def __call__(self, u: float) -> float:
        return self.apply(u)

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(self.m @ other.m)

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.m))

    def normalized(self) -> np.ndarray:
        return self.m / np.linalg.norm(self.m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjMap):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= 1e-12


def area_map(lk: ChartedLine, lk1: ChartedLine, c: float, orientation: int = -1) -> ProjMap:
    """Map ``l_k -> l_{k+1}`` cutting a triangle of area ``c`` at their intersection.

    In coordinates ``U, V`` centred at ``I = l_k & l_{k+1}`` the signed area is
    ``U * V * cross(d_k, d_{k+1}) / 2``; ``orientation`` picks its sign and
    is -1 for lines listed counterclockwise around the enclosed region.
    """
    if c <= 0:
        raise ValueError("cut area must be positive")
    d1, d2 = np.asarray(lk.direction), np.asarray(lk1.direction)
    cross = float(d1[0] * d2[1] - d1[1] * d2[0])
    I = line_intersection(lk.origin, d1, lk1.origin, d2)
    if I is None or abs(cross) <= TOL:
        raise ParallelLines("consecutive lines are parallel")
    u_i, v_i = lk.coord(I), lk1.coord(I)
    K = 2.0 * orientation * c / cross
    return ProjMap([[v_i, K - v_i * u_i], [1.0, -u_i]])


def compose(maps: Sequence[ProjMap]) -> ProjMap:
    """Composite applying ``maps[0]`` first, normalized to unit Frobenius norm."""
    if not maps:
        raise ValueError("nothing to compose")
    m = np.eye(2)
    for f in maps:
        m = f.m @ m
    return ProjMap(m / np.linalg.norm(m))


def identity_distance(m: ProjMap) -> float:
    a = m.normalized()
    eye = np.eye(2) / math.sqrt(2.0)
    return float(min(np.linalg.norm(a - eye), np.linalg.norm(a + eye)))


def is_identity(m: ProjMap, tol: float = 1e-9) -> bool:
    return identity_distance(m) <= tol


@dataclass(frozen=True)
class MarkedConfig:
    """Closed cycle of lines with named points and documented point chains.

    ``marked`` maps a name to ``(line index, chart coordinate)``; the
    intersections ``I1 .. In`` (``I_k`` on lines ``k`` and ``k+1``, 1-based)
    and ``inf`` are resolved on any line.  A chain is a list of names visited
    on lines ``start, start+1, ...``.
    """

    name: str
    lines: tuple
    cut_area: float
    marked: dict = field(default_factory=dict)
    chains: tuple = ()
    orientation: int = -1

    @property
    def intersections(self) -> list:
        n = len(self.lines)
        out = []
        for k in range(n):
            a, b = self.lines[k], self.lines[(k + 1) % n]
            p = line_intersection(a.origin, a.direction, b.origin, b.direction)
            if p is None:
                raise ParallelLines(f"lines {k + 1} and {(k + 1) % n + 1} are parallel")
            out.append(p)
        return out

    def maps(self) -> list:
        n = len(self.lines)
        return [area_map(self.lines[k], self.lines[(k + 1) % n], self.cut_area, self.orientation) for k in range(n)]

    def composition(self) -> ProjMap:
        return compose(self.maps())

    def coordinate(self, name: str, line: int) -> float:
        """Chart coordinate of a named point on line ``line`` (0-based)."""
        if name == "inf":
            return INF
        ln = self.lines[line % len(self.lines)]
        if name in self.marked:
            k, u = self.marked[name]
            if k % len(self.lines) != line % len(self.lines):
                raise ValueError(f"{name} is not on line {line + 1}")
            return u
        if name.startswith("I"):
            p = self.intersections[int(name[1:]) - 1]
            if ln.distance(p) > 1e-12 * max(1.0, float(np.hypot(*p))):
                raise ValueError(f"{name} is not on line {line + 1}")
            return ln.coord(p)
        raise KeyError(name)

    def run_chain(self, chain: Sequence[str], start: int = 0) -> list:
        """Images of ``chain[0]`` under successive maps, with their expected names."""
        maps = self.maps()
        n = len(self.lines)
        u = self.coordinate(chain[0], start)
        steps = []
        for j, name in enumerate(chain[1:]):
            line = (start + j + 1) % n
            u = maps[(start + j) % n].apply(u)
            steps.append((name, line, u, self.coordinate(name, line)))
        return steps

    def check_chains(self, tol: float = 1e-9) -> list:
        """One ``(chain, closes)`` pair per documented chain."""
        out = []
        for start, chain in self.chains:
            steps = self.run_chain(chain, start)
            ok = all(same_point(got, want, tol) for _, _, got, want in steps)
            out.append((chain, ok))
        return out


def _cycle_lines(corners: Sequence) -> tuple:
    """Line ``k`` runs from corner ``k-1`` to corner ``k`` (charts: origin at the
    previous intersection, direction toward the next)."""
    n = len(corners)
    return tuple(ChartedLine.through(corners[k - 1], corners[k]) for k in range(n))


def triangle_config() -> MarkedConfig:
    I1, I2, I3 = (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)
    lines = _cycle_lines([I1, I2, I3])
    # line k+1 in 1-based naming is lines[k]; its chart starts at I_{k}
    l1, l2, l3 = lines[0], lines[1], lines[2]
    marked = {
        "M1": (0, l1.coord((-1.0, 0.0))),
        "M2": (1, l2.coord((0.5, 0.5))),
        "M3": (2, l3.coord((0.0, -1.0))),
    }
    chains = (
        (0, ("inf", "I1", "I3", "inf")),
        (0, ("I1", "inf", "I2", "I1")),
        (0, ("M1", "M2", "M3", "M1")),
    )
    return MarkedConfig("triangle", lines, 0.5, marked, chains)


def parallelogram_config() -> MarkedConfig:
    I1, I2, I3, I4 = (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)
    lines = _cycle_lines([I1, I2, I3, I4])
    l1, l3, l4 = lines[0], lines[2], lines[3]
    marked = {
        "M1": (0, l1.coord((0.5, 0.0))),
        "M2": (2, l3.coord((0.5, 1.0))),
        "M3": (3, l4.coord((0.0, 0.5))),
    }
    chains = (
        (0, ("M1", "I2", "inf", "I3", "M1")),
        (0, ("inf", "I1", "M2", "I4", "inf")),
        (0, ("I1", "inf", "I2", "M3", "I1")),
    )
    return MarkedConfig("parallelogram", lines, 0.25, marked, chains)


CONFIGS = {"triangle": triangle_config, "parallelogram": parallelogram_config}


def _tri_area(p, q, r) -> float:
    p, q, r = (np.asarray(v, dtype=float) for v in (p, q, r))
    return 0.5 * abs(float((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])))


def perturbed(config: MarkedConfig, eps: float, name: str = "M2") -> MarkedConfig:
    """Slide a marked point along its line by ``eps`` and re-derive the cut area.

    The area is taken from the triangle the moved point spans in its defining
    link: ``(M1, I1, M2)`` for the triangle, ``(I1, I2, M2)`` for the
    parallelogram.  The identity composition does not survive the change.
    """
    line, u = config.marked[name]
    marked = dict(config.marked)
    marked[name] = (line, u + eps)
    ln = config.lines[line]
    moved = ln.point(u + eps)
    inter = config.intersections
    if config.name == "triangle":
        m1 = config.lines[config.marked["M1"][0]].point(config.marked["M1"][1])
        area = _tri_area(m1, inter[0], moved)
    elif config.name == "parallelogram":
        area = _tri_area(inter[0], inter[1], moved)
    else:
        raise ValueError(f"no defining link known for config {config.name!r}")
    return replace(config, marked=marked, cut_area=area)


def chain_report(config: MarkedConfig, tol: float = 1e-9) -> list:
    rows = []
    for (start, chain), (_, ok) in zip(config.chains, config.check_chains(tol)):
        rows.append({"chain": list(chain), "closes": ok, "images": [s[2] for s in config.run_chain(chain, start)]})
    return rows
