"""Numerical checks of the chord-sign lemmas and the return-map derivative.

Every chord ``x -> y`` of an orbit lies on two polygon sides whose lines meet
at ``Q`` (unless parallel).  The chord is *good* (sigma = +1) when ``Q`` is on
the same side of the chord as the cut-off region, *bad* (sigma = -1) when it
is on the other side, and sigma = 0 for parallel sides.  The marks are

* ``a``: distance from ``x`` to the next vertex counterclockwise,
* ``b``: distance from ``y`` to the previous vertex,
* ``d``, ``d_prime``: distances from those two vertices to ``Q``.

Deforming an orbit by sliding its first point clockwise makes every ``a``
grow; the velocity ratios between consecutive chords are the quantities the
lemmas constrain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import BACKEND, kernels
from .billiard import (
    MapConfig,
    OrbitRecord,
    check_area,
    lift_areas,
    near_vertex,
    orbit,
    orbit_areas,
)
from .errors import NoClosure, SameSide, VertexAmbiguous, VertexNonSmooth
from .geometry import BoundaryPoint, Polygon, half_plane_sign, point_at, point_from, side_line_intersection
from .rotation import find_closure, grid_points

DEFAULT_H = 1e-6  # deformation step, in units of the perimeter


def _dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


@dataclass
class ChordRecord:
    index: int
    from_pt: BoundaryPoint
    to_pt: BoundaryPoint
    sigma: Optional[int]
    Q: Optional[np.ndarray]
    a: float
    b: float
    d: Optional[float]
    d_prime: Optional[float]
    flag: Optional[str] = None  # "parallel" or "vertex"

    @property
    def skipped(self) -> bool:
        return self.flag is not None

    @property
    def lever_from(self) -> Optional[float]:
        """``|x Q|`` from the marks: ``a + d`` when good, ``d - a`` when bad."""
        if self.sigma == 1:
            return self.a + self.d
        if self.sigma == -1:
            return self.d - self.a
        return None

    @property
    def lever_to(self) -> Optional[float]:
        if self.sigma == 1:
            return self.b + self.d_prime
        if self.sigma == -1:
            return self.d_prime - self.b
        return None

    @property
    def analytic_ratio(self) -> Optional[float]:
        """Velocity ratio of the next chord's ``a`` to this one's."""
        if self.sigma == 0:
            return 1.0
        if self.sigma is None:
            return None
        return self.lever_to / self.lever_from

    def collinearity_residual(self) -> float:
        if self.sigma not in (1, -1):
            return 0.0
        return max(
            abs(_dist(self.from_pt.xy, self.Q) - self.lever_from),
            abs(_dist(self.to_pt.xy, self.Q) - self.lever_to),
        )


@dataclass
class DeformationRecord:
    h: float
    velocities: list
    analytic_ratios: list
    fd_ratios: list

    def lemma3_residuals(self) -> list:
        return [
            abs(fd - an) if an is not None else None
            for fd, an in zip(self.fd_ratios, self.analytic_ratios)
        ]


@dataclass
class ReturnDerivative:
    product: float
    paired_sum: Optional[float]
    fd_fallback: bool
    parabolic: bool
    all_parallel: bool


def sigma(poly: Polygon, x: BoundaryPoint, y: BoundaryPoint) -> int:
    if x.side == y.side:
        raise SameSide("chord endpoints lie on one side")
    if near_vertex(poly, x) or near_vertex(poly, y):
        raise VertexAmbiguous(f"chord endpoint at a vertex: {x.xy} -> {y.xy}")
    Q = side_line_intersection(poly, x.side, y.side)
    if Q is None:
        return 0
    L = poly.perimeter
    # the next vertex after x lies strictly inside the cut-off arc
    inside = half_plane_sign(x.xy, y.xy, poly.vertex(x.side + 1), scale=L)
    where = half_plane_sign(x.xy, y.xy, Q, scale=L)
    if where == 0 or inside == 0:
        raise VertexAmbiguous("intersection point on the chord line")
    return 1 if where == inside else -1


def chord_record(poly: Polygon, x: BoundaryPoint, y: BoundaryPoint, index: int = 0) -> ChordRecord:
    P_next = poly.vertex(x.side + 1)
    P_prev = poly.vertex(y.side)
    a, b = _dist(x.xy, P_next), _dist(y.xy, P_prev)
    try:
        sg = sigma(poly, x, y)
    except VertexAmbiguous:
        return ChordRecord(index, x, y, None, None, a, b, None, None, "vertex")
    if sg == 0:
        return ChordRecord(index, x, y, 0, None, a, b, None, None, "parallel")
    Q = side_line_intersection(poly, x.side, y.side)
    return ChordRecord(index, x, y, sg, Q, a, b, _dist(P_next, Q), _dist(P_prev, Q))


def chord_marks(cfg, orb: OrbitRecord) -> list:
    """One :class:`ChordRecord` per orbit step; parallel and vertex chords are flagged."""
    poly = getattr(cfg, "poly", cfg)
    pts = orb.points
    return [chord_record(poly, pts[i], pts[i + 1], i) for i in range(len(pts) - 1)]


def verify_lemma1(marks: Sequence, cyclic: bool = False, skip_parallel: bool = True) -> list:
    """Neighbours of every bad chord must be good.

    ``marks`` holds :class:`ChordRecord` objects or bare sigma values.  Vertex
    chords are dropped; parallel ones too when ``skip_parallel``.  Returns the
    offending neighbour pairs as ``(index, index, sigma, sigma)``.
    """
    seq = []
    for i, m in enumerate(marks):
        sg = m.sigma if isinstance(m, ChordRecord) else m
        idx = m.index if isinstance(m, ChordRecord) else i
        if sg is None or (skip_parallel and sg == 0):
            continue
        seq.append((idx, sg))
    pairs = list(zip(seq, seq[1:]))
    if cyclic and len(seq) > 1:
        pairs.append((seq[-1], seq[0]))
    bad = []
    for (i, si), (j, sj) in pairs:
        if (si == -1 and sj != 1) or (sj == -1 and si != 1):
            bad.append((i, j, si, sj))
    return bad


def _trace(poly: Polygon, s0: float, areas: Sequence[float]) -> list:
    xs, ys, cum = poly.kernel_args(BACKEND)
    x = point_at(poly, s0)
    pts = [x]
    for area in areas:
        side, t, _ = kernels.step(xs, ys, cum, area, x.side, x.t)
        x = point_from(poly, side, t)
        pts.append(x)
    return pts


def _a_mark(poly: Polygon, x: BoundaryPoint) -> float:
    return _dist(x.xy, poly.vertex(x.side + 1))


def _local_chord(poly: Polygon, orb: OrbitRecord, k: int, delta: float) -> tuple:
    """Chord ``k`` of the deformed orbit whose ``k``-th point has slid by ``delta``.

    The deformed orbits form a one-parameter family, so moving ``beta_k``
    directly traces the same chords as moving ``beta_0`` while keeping the
    displacement (and the finite-difference error) at the scale of ``delta``.
    """
    x, y = orb.points[k], orb.points[k + 1]
    pts = _trace(poly, orb.lift_values[k] + delta, orb.areas[k : k + 1])
    if pts[0].side != x.side or pts[1].side != y.side:
        raise VertexNonSmooth(f"deformation of size {abs(delta):.1e} crosses a vertex preimage at chord {k}")
    return pts[0], pts[1]


def deformation_velocities(cfg, orb: OrbitRecord, h: float = DEFAULT_H) -> DeformationRecord:
    """Finite-difference velocities of the ``a`` marks under a clockwise slide of ``beta_0``.

    ``h`` is in units of the perimeter.  The velocity of ``a_0`` and the ratio
    of each chord's outgoing to incoming velocity are symmetric differences
    over ``+-h``; velocities further along are chained from those ratios, since
    after strong contraction the later points barely move at all under a
    slide of ``beta_0``.  Velocities are per unit arc length of ``beta_0``.
    """
    poly = getattr(cfg, "poly", cfg)
    marks = chord_marks(poly, orb)
    if any(m.flag == "vertex" for m in marks):
        raise VertexNonSmooth("orbit touches a vertex")
    L = poly.perimeter
    fd_ratios, v0 = [], None
    for k in range(len(marks)):
        x0, y0 = _local_chord(poly, orb, k, -h)
        x1, y1 = _local_chord(poly, orb, k, h)
        da = _a_mark(poly, x0) - _a_mark(poly, x1)
        if v0 is None:
            v0 = da / (2 * h * L)
        fd_ratios.append((_a_mark(poly, y0) - _a_mark(poly, y1)) / da)
    velocities = [v0]
    for r in fd_ratios:
        velocities.append(velocities[-1] * r)
    return DeformationRecord(h, velocities, [m.analytic_ratio for m in marks], fd_ratios)


def verify_lemma3(cfg, orb: OrbitRecord, h: float = DEFAULT_H, tol: float = 1e-5) -> dict:
    dr = deformation_velocities(cfg, orb, h)
    res = [r for r in dr.lemma3_residuals() if r is not None]
    same_sign = all(v > 0 for v in dr.velocities) or all(v < 0 for v in dr.velocities)
    return {
        "passed": bool((not res or max(res) <= tol) and same_sign),
        "max_residual": float(max(res, default=0.0)),
        "same_sign": same_sign,
        "record": dr,
    }


def verify_lemma2(cfg, orb: OrbitRecord, h: float = DEFAULT_H, tol: float = 1e-7) -> dict:
    """Lever products and ``a_{k+1} + b_k`` stay constant as the orbit slides over +-10h."""
    poly = getattr(cfg, "poly", cfg)
    base = chord_marks(poly, orb)
    if any(m.flag == "vertex" for m in base):
        raise VertexNonSmooth("orbit touches a vertex")
    prod_res, sum_res = [], []
    for k, rec in enumerate(base):
        prods, sums = [], []
        for j in (-10, -5, 0, 5, 10):
            x, y = _local_chord(poly, orb, k, j * h)
            r = chord_record(poly, x, y, k)
            if rec.sigma in (1, -1):
                prods.append(r.lever_from * r.lever_to)
            sums.append(r.b + _a_mark(poly, y))
        for vals, out in ((prods, prod_res), (sums, sum_res)):
            if vals:
                out.append(float((max(vals) - min(vals)) / max(abs(np.mean(vals)), 1e-300)))
    worst = max(prod_res + sum_res, default=0.0)
    return {
        "passed": worst <= tol,
        "max_product_residual": max(prod_res, default=0.0),
        "max_sum_residual": max(sum_res, default=0.0),
        "product_residuals": prod_res,
        "sum_residuals": sum_res,
    }


def verify_lemma4(cfg, orb: OrbitRecord, h: float = DEFAULT_H, tol: float = 1e-9, record: Optional[DeformationRecord] = None) -> dict:
    """Each bad chord followed by a good one satisfies the lever inequality.

    With ``v`` the forward velocities, ``v[k+1] / |x_{k+1} Q_{k+1}| >= v[k] / |x_k Q_k|``;
    equality must come with ``beta_k`` and ``beta_{k+2}`` on one side.  The
    check runs in ratio form, dividing through by ``v[k]``.
    """
    poly = getattr(cfg, "poly", cfg)
    marks = chord_marks(poly, orb)
    checks, violations, equalities = [], [], []
    pairs = [(k, marks[k], marks[k + 1]) for k in range(len(marks) - 1) if marks[k].sigma == -1 and marks[k + 1].sigma == 1]
    if not pairs:
        return {"passed": True, "vacuous": True, "checks": [], "violations": [], "equalities": []}
    dr = record if record is not None else deformation_velocities(poly, orb, h)
    for k, bad, good in pairs:
        # divide both sides by the (positive) velocity of chord k
        lhs = dr.fd_ratios[k] / good.lever_from
        rhs = 1.0 / bad.lever_from
        scale = max(abs(lhs), abs(rhs))
        diff = lhs - rhs
        same_side = orb.points[k].side == orb.points[k + 2].side
        lhs, rhs = float(lhs), float(rhs)
        checks.append({"chord": k, "lhs": lhs, "rhs": rhs, "same_side": same_side})
        if diff < -tol * scale:
            violations.append({"chord": k, "lhs": lhs, "rhs": rhs, "kind": "inequality"})
        elif abs(diff) <= tol * scale:
            equalities.append(k)
            if not same_side:
                violations.append({"chord": k, "lhs": lhs, "rhs": rhs, "kind": "equality-not-same-side"})
        elif same_side:
            violations.append({"chord": k, "lhs": lhs, "rhs": rhs, "kind": "same-side-strict"})
    return {
        "passed": not violations,
        "vacuous": False,
        "checks": checks,
        "violations": violations,
        "equalities": equalities,
    }


def return_derivative(cfg: MapConfig, p: int, q: int, witness, h: float = 1e-7) -> ReturnDerivative:
    """Derivative of the ``q``-th iterate at a periodic point, plus the lever-sum diagnostic.

    The diagnostic is ``sum_good v_k / |x_k Q_k| - sum_bad v_k / |x_k Q_k|``
    with ``v`` the forward velocities chained from the analytic step ratios.
    """
    s = witness.s if isinstance(witness, BoundaryPoint) else float(witness)
    orb = orbit(cfg, s, q)
    closure = orb.lift_values[-1] - s - p
    if abs(closure) > 1e-9:
        raise ValueError(f"witness does not close: F^q(s) - s - p = {closure:.3e}")
    fd = bool(orb.fd_steps)
    if fd:
        from .billiard import lift_n

        product = (lift_n(cfg, s + h, q) - lift_n(cfg, s - h, q)) / (2 * h)
    else:
        product = orb.derivative_product
    marks = chord_marks(cfg, orb)
    active = [m for m in marks if m.sigma in (1, -1)]
    paired = None
    if active and not fd:
        v, total = 1.0, 0.0
        for m, dv in zip(marks, orb.step_derivatives):
            if m.sigma in (1, -1):
                total += m.sigma * v / m.lever_from
            v *= dv
        paired = total
    return ReturnDerivative(
        product=product,
        paired_sum=paired,
        fd_fallback=fd,
        parabolic=abs(product - 1.0) <= 1e-6,
        all_parallel=not active and all(m.sigma == 0 for m in marks),
    )


def fake_orbit(
    poly: Polygon,
    areas: Sequence[float],
    p: int,
    bracket: Optional[tuple] = None,
    grid: int = 64,
) -> OrbitRecord:
    """Closed chain cutting ``areas[0], areas[1], ...`` in turn and winding ``p`` times.

    The start is the root of ``Phi(s) - s - p`` for the composed lift ``Phi``,
    taken inside ``bracket`` when given, else located from a grid scan.
    """
    areas = [float(a) for a in areas]
    for area in areas:
        check_area(poly, area)

    def g(s):
        return lift_areas(poly, areas, s) - s - p

    if bracket is not None:
        lo, hi = map(float, bracket)
        glo, ghi = g(lo), g(hi)
        if glo == 0.0:
            s0 = lo
        elif ghi == 0.0:
            s0 = hi
        elif glo * ghi > 0:
            raise NoClosure(f"no sign change of the displacement on [{lo}, {hi}]")
        else:
            from scipy.optimize import brentq

            s0 = brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    else:
        svals = grid_points(poly, grid)
        xs, ys, cum = poly.kernel_args(BACKEND)
        gvals = np.array([g(s) for s in svals])
        found = find_closure(g, svals, gvals)
        if found is None:
            raise NoClosure("the displacement has no zero")
        s0 = found[0] - math.floor(found[0])
    orb = orbit_areas(poly, s0, areas)
    if abs(orb.lift_values[-1] - orb.lift_values[0] - p) > 1e-9:
        raise NoClosure("root did not close the chain to 1e-9")
    return orb


def verify_orbit(cfg: MapConfig, s0: float, steps: int, h: float = DEFAULT_H) -> dict:
    """Run every chord check on the orbit segment from ``s0``.

    Orbits touching a vertex are nudged by 1e-6 (then -1e-6) and flagged.
    """
    perturbed = None
    orb = orbit(cfg, s0, steps)
    for nudge in (1e-6, -1e-6):
        if not any(near_vertex(cfg.poly, x) for x in orb.points):
            break
        perturbed = nudge
        orb = orbit(cfg, s0 + nudge, steps)
    marks = chord_marks(cfg, orb)
    report = {
        "area": cfg.A,
        "start": orb.lift_values[0],
        "steps": steps,
        "h": h,
        "perturbed": perturbed,
        "sigma": [m.sigma for m in marks],
        "collinearity": {
            "max_residual": max((m.collinearity_residual() for m in marks), default=0.0),
        },
    }
    report["collinearity"]["passed"] = bool(report["collinearity"]["max_residual"] <= 1e-9 * cfg.poly.perimeter)
    l1 = verify_lemma1(marks)
    report["lemma1"] = {"passed": not l1, "violations": [list(v) for v in l1]}
    try:
        l2 = verify_lemma2(cfg, orb, h)
        l3 = verify_lemma3(cfg, orb, h)
        l4 = verify_lemma4(cfg, orb, h, record=l3["record"])
    except VertexNonSmooth as exc:
        report["deformation"] = {"skipped": str(exc)}
    else:
        report["lemma2"] = {k: l2[k] for k in ("passed", "max_product_residual", "max_sum_residual")}
        report["lemma2"]["passed"] = bool(l2["passed"])
        report["lemma3"] = {
            "passed": l3["passed"],
            "max_residual": l3["max_residual"],
            "same_sign": l3["same_sign"],
            "velocities": [float(v) for v in l3["record"].velocities],
        }
        report["lemma4"] = {k: l4[k] for k in ("passed", "vacuous", "violations", "equalities")}
    report["derivative_product"] = float(orb.derivative_product)
    return report
