"""Pure-Python kernels for the constant-area boundary map.

Same signatures and arithmetic as the compiled ``_kernels`` extension; used
when the extension is not built or ``AREABILLIARD_PURE_PYTHON`` is set.

Polygon data arrives flattened: ``xs``, ``ys`` hold the ``n`` counterclockwise
vertices and ``cum`` the ``n + 1`` cumulative arc lengths (``cum[n]`` is the
perimeter). A boundary point is ``(side, t)`` with ``0 <= t < 1``.
"""

import math

SNAP = 1e-12


def locate(cum, frac):
    """Return ``(side, t)`` for normalized arc length ``frac`` in ``[0, 1)``."""
    n = len(cum) - 1
    L = cum[n]
    arc = frac * L
    lo, hi = 0, n
    # last k with cum[k] <= arc
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cum[mid] <= arc:
            lo = mid
        else:
            hi = mid
    side = lo
    length = cum[side + 1] - cum[side]
    t = (arc - cum[side]) / length
    if t < 0.0:
        t = 0.0
    if (1.0 - t) * length <= SNAP * L:
        side = (side + 1) % n
        t = 0.0
    return side, t


def position(cum, side, t):
    n = len(cum) - 1
    return (cum[side] + t * (cum[side + 1] - cum[side])) / cum[n]


def step(xs, ys, cum, area, side, t):
    """Advance ``(side, t)`` by one chord cutting ``area``.

    Returns ``(side, t, wrapped)``; ``side == -1`` signals that no chord of
    that area exists (area too large).
    """
    n = len(xs)
    L = cum[n]
    k1 = side + 1 if side + 1 < n else 0
    px = xs[side] + t * (xs[k1] - xs[side])
    py = ys[side] + t * (ys[k1] - ys[side])
    acc = 0.0
    for j in range(1, n):
        m = side + j
        a = m % n
        b = (m + 1) % n
        ex = xs[b] - xs[a]
        ey = ys[b] - ys[a]
        tri = 0.5 * ((xs[a] - px) * ey - (ys[a] - py) * ex)
        if acc + tri >= area:
            tn = (area - acc) / tri
            length = cum[a + 1] - cum[a]
            if (1.0 - tn) * length <= SNAP * L:
                m += 1
                tn = 0.0
            return m % n, tn, m >= n
        acc += tri
    return -1, 0.0, False


def lift_iterate(xs, ys, cum, area, s0, nsteps):
    """``F^nsteps(s0)`` for the lift ``F`` of the constant-area map."""
    base = math.floor(s0)
    side, t = locate(cum, s0 - base)
    turns = 0
    for _ in range(nsteps):
        side, t, wrapped = step(xs, ys, cum, area, side, t)
        if side < 0:
            raise ValueError("area too large for a forward chord")
        if wrapped:
            turns += 1
    return (base + turns) + position(cum, side, t)


def lift_areas(xs, ys, cum, areas, s0):
    """Lift of the composition of one step per entry of ``areas``."""
    base = math.floor(s0)
    side, t = locate(cum, s0 - base)
    turns = 0
    for area in areas:
        side, t, wrapped = step(xs, ys, cum, area, side, t)
        if side < 0:
            raise ValueError("area too large for a forward chord")
        if wrapped:
            turns += 1
    return (base + turns) + position(cum, side, t)


def displacement_grid(xs, ys, cum, area, svals, p, q):
    """``F^q(s) - s - p`` at every ``s`` in ``svals``."""
    return [lift_iterate(xs, ys, cum, area, s, q) - s - p for s in svals]
