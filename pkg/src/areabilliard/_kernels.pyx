# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the constant-area boundary map.

Mirrors ``_pykernels`` operation for operation so both backends produce the
same floating-point results.
"""

from libc.math cimport floor

import numpy as np

cdef double SNAP = 1e-12


cdef inline void _locate(const double[::1] cum, double frac, int* side, double* t) noexcept nogil:
    cdef Py_ssize_t n = cum.shape[0] - 1
    cdef double L = cum[n]
    cdef double arc = frac * L
    cdef Py_ssize_t lo = 0, hi = n, mid
    cdef double length, tt
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cum[mid] <= arc:
            lo = mid
        else:
            hi = mid
    length = cum[lo + 1] - cum[lo]
    tt = (arc - cum[lo]) / length
    if tt < 0.0:
        tt = 0.0
    if (1.0 - tt) * length <= SNAP * L:
        lo = (lo + 1) % n
        tt = 0.0
    side[0] = <int>lo
    t[0] = tt


cdef inline double _position(const double[::1] cum, int side, double t) noexcept nogil:
    cdef Py_ssize_t n = cum.shape[0] - 1
    return (cum[side] + t * (cum[side + 1] - cum[side])) / cum[n]


cdef inline int _step(const double[::1] xs, const double[::1] ys, const double[::1] cum,
                      double area, int* side, double* t) noexcept nogil:
    # returns 1 if the step wrapped past vertex 0, 0 if not, -1 on failure
    cdef int n = <int>xs.shape[0]
    cdef double L = cum[n]
    cdef int s = side[0]
    cdef int k1 = s + 1 if s + 1 < n else 0
    cdef double px = xs[s] + t[0] * (xs[k1] - xs[s])
    cdef double py = ys[s] + t[0] * (ys[k1] - ys[s])
    cdef double acc = 0.0, ex, ey, tri, tn, length
    cdef int j, m, a, b
    for j in range(1, n):
        m = s + j
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
            side[0] = m % n
            t[0] = tn
            return 1 if m >= n else 0
        acc += tri
    return -1


def locate(const double[::1] cum, double frac):
    cdef int side
    cdef double t
    _locate(cum, frac, &side, &t)
    return side, t


def position(const double[::1] cum, int side, double t):
    return _position(cum, side, t)


def step(const double[::1] xs, const double[::1] ys, const double[::1] cum,
         double area, int side, double t):
    cdef int r = _step(xs, ys, cum, area, &side, &t)
    if r < 0:
        return -1, 0.0, False
    return side, t, r == 1


cdef double _lift_iterate(const double[::1] xs, const double[::1] ys, const double[::1] cum,
                          double area, double s0, long nsteps, int* err) noexcept nogil:
    cdef double base = floor(s0)
    cdef int side
    cdef double t
    cdef long i, turns = 0
    cdef int r
    _locate(cum, s0 - base, &side, &t)
    for i in range(nsteps):
        r = _step(xs, ys, cum, area, &side, &t)
        if r < 0:
            err[0] = 1
            return 0.0
        turns += r
    return (base + turns) + _position(cum, side, t)


def lift_iterate(const double[::1] xs, const double[::1] ys, const double[::1] cum,
                 double area, double s0, long nsteps):
    cdef int err = 0
    cdef double out
    with nogil:
        out = _lift_iterate(xs, ys, cum, area, s0, nsteps, &err)
    if err:
        raise ValueError("area too large for a forward chord")
    return out


def lift_areas(const double[::1] xs, const double[::1] ys, const double[::1] cum,
               areas, double s0):
    cdef double base = floor(s0)
    cdef int side, r
    cdef double t
    cdef long turns = 0
    _locate(cum, s0 - base, &side, &t)
    for area in areas:
        r = _step(xs, ys, cum, area, &side, &t)
        if r < 0:
            raise ValueError("area too large for a forward chord")
        turns += r
    return (base + turns) + _position(cum, side, t)


def displacement_grid(const double[::1] xs, const double[::1] ys, const double[::1] cum,
                      double area, svals, long p, long q):
    cdef double[::1] s = np.ascontiguousarray(svals, dtype=np.float64)
    cdef Py_ssize_t i, m = s.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] g = out
    cdef int err = 0
    with nogil:
        for i in range(m):
            g[i] = _lift_iterate(xs, ys, cum, area, s[i], q, &err) - s[i] - p
    if err:
        raise ValueError("area too large for a forward chord")
    return out
