"""Rotation numbers of the constant-area map and devil's staircase sweeps.

A rational rotation number ``p/q`` is certified by a zero of the displacement
``g(s) = F^q(s) - s - p``; otherwise the long-run average
``(F^n(s0) - s0) / n`` is reported, which is within ``1/n`` of the rotation
number for every starting point.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, TextIO

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._backend import BACKEND, kernels
from .billiard import MapConfig, check_area, lift_n
from .errors import AreaOutOfRange, BracketInvalid
from .geometry import BoundaryPoint, Polygon, point_at

log = logging.getLogger(__name__)

# a refined displacement extremum this close to zero counts as a zero
ZERO_TOL = 1e-11
# the longrun bracket is widened by this much to absorb rounding in F^n
HINT_SLACK = 1e-9

STAIRCASE_COLUMNS = ["A", "A_over_S", "tau", "p", "q", "exact"]


@dataclass(frozen=True)
class RationalOrbit:
    p: int
    q: int
    s: float
    witness: BoundaryPoint
    residual: float


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    kind: str  # "exact" or "longrun"
    iterations: int
    error_bound: float
    p: Optional[int] = None
    q: Optional[int] = None
    witness: Optional[BoundaryPoint] = None

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    def __str__(self):
        if self.exact:
            return f"exact {self.p}/{self.q}"
        return f"longrun {self.value!r} +/- {self.error_bound:.1e}"


@dataclass(frozen=True)
class StaircaseRow:
    A: float
    A_normalized: float
    tau: float
    p: Optional[int]
    q: Optional[int]
    exact: bool
    error_bound: float = 0.0


def rotation_number_longrun(cfg: MapConfig, s0: float = 0.0, n: int = 200_000) -> RotationEstimate:
    if n < 1:
        raise ValueError("need at least one iterate")
    value = (lift_n(cfg, s0, n) - s0) / n
    return RotationEstimate(value, "longrun", int(n), 1.0 / n)


def displacement(cfg: MapConfig, p: int, q: int, s: float) -> float:
    """``F^q(s) - s - p``; zero exactly at points of a ``q``-periodic orbit winding ``p`` times."""
    return lift_n(cfg, s, q) - s - p


def grid_points(poly: Polygon, grid: int) -> np.ndarray:
    """``grid`` equally spaced points per side, vertices included, as arc coordinates."""
    t = np.arange(grid) / grid
    cum, lengths = poly.cumulative_arc, poly.side_lengths
    s = (cum[:-1, None] + t[None, :] * lengths[:, None]) / poly.perimeter
    return s.ravel()


def _displacement_grid(cfg: MapConfig, p: int, q: int, svals: np.ndarray) -> np.ndarray:
    xs, ys, cum = cfg.poly.kernel_args(BACKEND)
    return np.asarray(kernels.displacement_grid(xs, ys, cum, cfg.A, svals, p, q), dtype=float)


def _refine_extremum(func, svals, gvals, j, sign):
    """Refine the grid extremum at index ``j``: ``sign=+1`` for a minimum, -1 for a maximum."""
    m = len(svals)
    lo = svals[j - 1] - (1.0 if j == 0 else 0.0)
    hi = svals[(j + 1) % m] + (1.0 if j == m - 1 else 0.0)
    res = minimize_scalar(
        lambda s: sign * func(s), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13}
    )
    s_best, g_best = float(res.x), float(res.fun) * sign
    if sign * gvals[j] < sign * g_best:
        s_best, g_best = float(svals[j]), float(gvals[j])
    return s_best, g_best


def find_closure(func, svals: np.ndarray, gvals: np.ndarray):
    """Locate a zero of the periodic function ``func`` sampled as ``gvals``.

    A downward crossing (attracting orbit) is preferred over an upward one;
    if the samples never change sign the extremum nearest zero is refined.
    Returns ``(s, g(s))`` or ``None``.
    """
    m = len(svals)
    nxt = np.roll(np.arange(m), -1)
    s_next = np.where(nxt == 0, svals[0] + 1.0, svals[nxt])
    g_next = gvals[nxt]
    for down in (True, False):
        if down:
            hits = np.nonzero((gvals > 0) & (g_next <= 0))[0]
        else:
            hits = np.nonzero((gvals < 0) & (g_next >= 0))[0]
        if len(hits):
            j = int(hits[0])
            if g_next[j] == 0.0:
                s = float(s_next[j])
            else:
                s = brentq(func, float(svals[j]), float(s_next[j]), xtol=1e-15, rtol=8.9e-16, maxiter=200)
            return s, func(s)
    if np.all(gvals > 0):
        s, g = _refine_extremum(func, svals, gvals, int(np.argmin(gvals)), +1)
    else:
        s, g = _refine_extremum(func, svals, gvals, int(np.argmax(gvals)), -1)
    if abs(g) <= ZERO_TOL:
        return s, g
    return None


def classify(cfg: MapConfig, p: int, q: int, svals: np.ndarray):
    """Compare the rotation number with ``p/q``.

    Returns ``(c, closure)`` with ``c = -1`` if the rotation number is below
    ``p/q``, ``+1`` if above, ``0`` with a closing point if equal.
    """
    gvals = _displacement_grid(cfg, p, q, svals)

    def g(s):
        return displacement(cfg, p, q, s)

    if np.any(gvals > 0) and np.any(gvals <= 0) or np.any(gvals == 0):
        return 0, find_closure(g, svals, gvals)
    if np.all(gvals > 0):
        s, val = _refine_extremum(g, svals, gvals, int(np.argmin(gvals)), +1)
        return (0, (s, val)) if val <= ZERO_TOL else (1, None)
    s, val = _refine_extremum(g, svals, gvals, int(np.argmax(gvals)), -1)
    return (0, (s, val)) if val >= -ZERO_TOL else (-1, None)


def _rational_orbit(cfg, p, q, closure) -> RationalOrbit:
    s, g = closure
    s = s - math.floor(s)
    return RationalOrbit(p, q, s, point_at(cfg.poly, s), abs(g))


def detect_rational(
    cfg: MapConfig,
    q_max: int = 200,
    grid: int = 64,
    hint: Optional[tuple] = None,
) -> Optional[RationalOrbit]:
    """Stern-Brocot search for a rational rotation number with denominator <= ``q_max``.

    ``hint`` is an open interval known to contain the rotation number (for
    instance from a long-run estimate); tree nodes outside it are decided
    without evaluating the displacement.
    """
    if q_max < 1 or grid < 8:
        raise ValueError("need q_max >= 1 and grid >= 8")
    svals = grid_points(cfg.poly, grid)
    lp, lq, rp, rq = 0, 1, 1, 1
    while True:
        p, q = lp + rp, lq + rq
        if q > q_max:
            return None
        if hint is not None and p / q <= hint[0]:
            c = 1
        elif hint is not None and p / q >= hint[1]:
            c = -1
        else:
            c, closure = classify(cfg, p, q, svals)
        if c == 0:
            return _rational_orbit(cfg, p, q, closure)
        if c > 0:
            lp, lq = p, q
        else:
            rp, rq = p, q


def rotation_number(
    cfg: MapConfig,
    n: int = 200_000,
    q_max: int = 200,
    grid: int = 64,
    s0: float = 0.0,
) -> RotationEstimate:
    """Exact ``p/q`` when a periodic orbit with ``q <= q_max`` exists, else the long-run value."""
    est = rotation_number_longrun(cfg, s0, n)
    slack = est.error_bound + HINT_SLACK
    found = detect_rational(cfg, q_max, grid, hint=(est.value - slack, est.value + slack))
    if found is None:
        return est
    return RotationEstimate(found.p / found.q, "exact", int(n), 0.0, found.p, found.q, found.witness)


def _sweep_row(args) -> StaircaseRow:
    poly, A, n, q_max, grid = args
    est = rotation_number(MapConfig(poly, A), n=n, q_max=q_max, grid=grid)
    return StaircaseRow(A, A / poly.area, est.value, est.p, est.q, est.exact, est.error_bound)


def staircase_sweep(
    poly: Polygon,
    A_lo: float,
    A_hi: float,
    samples: int,
    n: int = 100_000,
    q_max: int = 200,
    grid: int = 64,
    jobs: int = 1,
    refine_threshold: Optional[float] = None,
) -> list:
    """Rotation number on a uniform grid of areas.

    With ``refine_threshold`` set, one extra pass inserts the midpoint of
    every pair of neighbouring rows whose values differ by more than it.
    """
    if not (0.0 < A_lo < A_hi < 0.5 * poly.area):
        raise AreaOutOfRange(f"need 0 < A_lo < A_hi < S/2 = {0.5 * poly.area!r}")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    areas = [float(a) for a in np.linspace(A_lo, A_hi, samples)]
    rows = _run_rows(poly, areas, n, q_max, grid, jobs)
    if refine_threshold is not None:
        mids = [
            0.5 * (r0.A + r1.A)
            for r0, r1 in zip(rows, rows[1:])
            if abs(r1.tau - r0.tau) > refine_threshold
        ]
        rows = sorted(rows + _run_rows(poly, mids, n, q_max, grid, jobs), key=lambda r: r.A)
    return rows


def _run_rows(poly, areas, n, q_max, grid, jobs):
    tasks = [(poly, A, n, q_max, grid) for A in areas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_row, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_sweep_row(t) for t in tasks]


def write_staircase_csv(rows, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(STAIRCASE_COLUMNS)
    for r in rows:
        writer.writerow([
            repr(float(r.A)),
            repr(float(r.A_normalized)),
            repr(float(r.tau)),
            "" if r.p is None else r.p,
            "" if r.q is None else r.q,
            int(r.exact),
        ])


def plateaus(rows) -> list:
    """Maximal runs of consecutive exact rows sharing one rational value.

    Returns ``(Fraction, first_index, last_index)`` triples.
    """
    runs = []
    for i, r in enumerate(rows):
        key = Fraction(r.p, r.q) if r.exact else None
        if key is not None and runs and runs[-1][0] == key and runs[-1][2] == i - 1:
            runs[-1][2] = i
        elif key is not None:
            runs.append([key, i, i])
    return [tuple(r) for r in runs]


def classify_area(poly: Polygon, A: float, p: int, q: int, grid: int = 64) -> int:
    """-1, 0 or +1 as the rotation number at area ``A`` is below, at or above ``p/q``."""
    c, _ = classify(MapConfig(poly, A), p, q, grid_points(poly, grid))
    return c


def plateau_bounds(
    poly: Polygon,
    p: int,
    q: int,
    bracket: tuple,
    tol: float = 1e-6,
    grid: int = 64,
) -> tuple:
    """Endpoints of the area interval on which the rotation number equals ``p/q``.

    Edges that lie outside ``bracket`` are searched out to the admissible
    area range ``[1e-6 S, S/2 - 1e-6 S]``; an edge that reaches that range
    is reported as the range limit.
    """
    A1, A2 = map(float, bracket)
    if not A1 < A2:
        raise BracketInvalid(f"empty bracket [{A1}, {A2}]")
    check_area(poly, A1)
    check_area(poly, A2)
    floor, ceil = 1e-6 * poly.area, (0.5 - 1e-6) * poly.area

    def cls(A):
        return classify_area(poly, A, p, q, grid)

    c1, c2 = cls(A1), cls(A2)
    if c1 > 0 or c2 < 0:
        raise BracketInvalid(f"{p}/{q} is not between the rotation numbers at the bracket ends")

    lo, hi = A1, A2
    inside = A1 if c1 == 0 else A2 if c2 == 0 else None
    while inside is None:
        mid = 0.5 * (lo + hi)
        c = cls(mid)
        if c == 0:
            inside = mid
        elif c < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and inside is None:
            log.info("plateau %d/%d narrower than tol near %g", p, q, mid)
            return mid, mid

    def edge(inner, outer):
        # bisect between a plateau point and a point outside it
        while abs(outer - inner) > tol:
            mid = 0.5 * (inner + outer)
            if cls(mid) == 0:
                inner = mid
            else:
                outer = mid
        return 0.5 * (inner + outer)

    if c1 < 0:
        a_lo = edge(inside, lo)
    elif cls(floor) == 0:
        a_lo = floor
    else:
        a_lo = edge(A1 if c1 == 0 else inside, floor)

    if c2 > 0:
        a_hi = edge(inside, hi)
    elif cls(ceil) == 0:
        a_hi = ceil
    else:
        a_hi = edge(A2 if c2 == 0 else inside, ceil)
    return a_lo, a_hi
