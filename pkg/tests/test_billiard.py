import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from areabilliard.billiard import (
    MapConfig,
    chord_intersection,
    derivative,
    envelope_midpoint,
    lift_n,
    orbit,
    phi,
    phi_lift,
    phi_step_area,
)
from areabilliard.errors import AreaOutOfRange, VertexNonSmooth
from areabilliard.geometry import cut_area, point_at, project_to_boundary, regular_polygon, unit_square
from areabilliard.sampling import random_config

from oracles import phi_bisect

GOLDEN_SMALL = (3 - math.sqrt(5)) / 2  # 0.381966...
U_ATTRACT = (1 + math.sqrt(0.2)) / 2  # distance to the next corner on the A = 0.1 orbit


def at(poly, xy):
    return project_to_boundary(poly, xy)


@pytest.mark.parametrize(
    "A, start, end",
    [
        (0.125, (0.5, 0), (1, 0.5)),
        (0.45, (0.5, 0), (0.6, 1)),
        (0.3, (0, 1), (0.6, 0)),
        (0.1, (1 - U_ATTRACT, 0), (1, 1 - U_ATTRACT)),
    ],
)
def test_phi_examples(square, A, start, end):
    y = phi(MapConfig(square, A), at(square, start))
    assert y.xy == pytest.approx(end, abs=1e-12)


def test_phi_step_area_matches_phi(square):
    x = at(square, (0.5, 0))
    assert phi_step_area(square, x, 0.125).xy == phi(MapConfig(square, 0.125), x).xy


def test_area_out_of_range(square):
    for A in (0.0, -0.1, 0.5, 0.6):
        with pytest.raises(AreaOutOfRange):
            MapConfig(square, A)


def test_area_parameter():
    cfg = MapConfig.from_a(unit_square(), 0.2)
    assert cfg.A == 0.1 and cfg.a == 0.2


def test_lift_examples(square):
    cfg = MapConfig(square, 0.125)
    assert phi_lift(cfg, 0.125) == pytest.approx(0.375, abs=1e-15)
    cfg = MapConfig(square, 0.1)
    assert phi_lift(cfg, 1.2) - phi_lift(cfg, 0.2) == pytest.approx(1.0, abs=4e-16)


def test_lift_matches_bisection_oracle(rng):
    for _ in range(40):
        cfg = random_config(rng, n_max=8)
        s = rng.uniform()
        got = phi_lift(cfg, s)
        want = phi_bisect(cfg.poly.vertices, s, cfg.A)
        assert got == pytest.approx(want, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.02, 0.48))
def test_lift_is_monotone_and_advances(s1, s2, frac):
    cfg = MapConfig(regular_polygon(5), frac * regular_polygon(5).area)
    a, b = sorted((s1, s2))
    Fa, Fb = phi_lift(cfg, a), phi_lift(cfg, b)
    assert Fa <= Fb + 1e-15
    assert a < Fa < a + 1


@pytest.mark.parametrize(
    "A, start, want",
    [(0.125, (0.5, 0), 1.0), (0.1, (1 - U_ATTRACT, 0), GOLDEN_SMALL), (0.45, (0.5, 0), 1.0)],
)
def test_derivative_examples(square, A, start, want):
    assert derivative(MapConfig(square, A), at(square, start)) == pytest.approx(want, abs=1e-12)


def test_derivative_matches_finite_difference(rng):
    for _ in range(100):
        cfg = random_config(rng)
        s = rng.uniform()
        try:
            d = derivative(cfg, point_at(cfg.poly, s))
        except VertexNonSmooth:
            continue
        h = 1e-7
        fd = (phi_lift(cfg, s + h) - phi_lift(cfg, s - h)) / (2 * h)
        assert d == pytest.approx(fd, rel=1e-5)


def test_derivative_at_vertex_raises(square):
    with pytest.raises(VertexNonSmooth):
        derivative(MapConfig(square, 0.1), point_at(square, 0.25))


def test_periodic_orbit(square_cfg):
    s0 = (1 - U_ATTRACT) / 4
    orb = orbit(square_cfg, s0, 4)
    assert orb.winding == 1
    assert orb.lift_values[-1] == pytest.approx(s0 + 1, abs=1e-12)
    assert orb.derivative_product == pytest.approx(GOLDEN_SMALL**4, abs=1e-12)
    assert orb.derivative_product == pytest.approx(0.0212862, abs=1e-7)
    assert abs(orb.closure_error) < 1e-12


def test_single_step_cuts_area(rng):
    for _ in range(100):
        cfg = random_config(rng)
        orb = orbit(cfg, rng.uniform(), 1)
        x, y = orb.points
        assert cut_area(cfg.poly, x, y) == pytest.approx(cfg.A, abs=1e-9 * cfg.poly.area)


def test_orbit_requires_a_step(square_cfg):
    with pytest.raises(ValueError):
        orbit(square_cfg, 0.0, 0)


def test_lift_n_composes(square_cfg):
    s = 0.0371
    assert lift_n(square_cfg, s, 7) == pytest.approx(lift_n(square_cfg, lift_n(square_cfg, s, 3), 4), abs=1e-14)


@pytest.mark.parametrize("A, start, mid", [(0.125, (0.5, 0), (0.75, 0.25)), (0.3, (0, 1), (0.3, 0.5))])
def test_envelope_midpoint(square, A, start, mid):
    m = envelope_midpoint(MapConfig(square, A), at(square, start))
    assert m == pytest.approx(mid, abs=1e-12)


def test_neighbouring_chords_meet_near_midpoint(square):
    cfg = MapConfig(square, 0.125)
    p = chord_intersection(cfg, 0.125, 0.125 + 1e-6)
    assert np.hypot(*(p - [0.75, 0.25])) < 1e-5


def test_parallel_chords_have_no_intersection(square):
    cfg = MapConfig(square, 0.45)
    s = at(square, (0.5, 0)).s
    assert chord_intersection(cfg, s, s) is None
