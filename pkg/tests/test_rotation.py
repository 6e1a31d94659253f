import io
import math
from fractions import Fraction

import numpy as np
import pytest

from areabilliard.billiard import MapConfig
from areabilliard.errors import BracketInvalid
from areabilliard.rotation import (
    STAIRCASE_COLUMNS,
    classify_area,
    detect_rational,
    displacement,
    grid_points,
    plateau_bounds,
    plateaus,
    rotation_number,
    rotation_number_longrun,
    staircase_sweep,
    write_staircase_csv,
)

from oracles import longrun_rotation, square_corner_orbit_distance

PENTAGON_MIDPOINT_AREA = math.sin(math.radians(108)) / 8


@pytest.mark.parametrize("A", [0.1, 0.125])
def test_longrun_square(square, A):
    est = rotation_number_longrun(MapConfig(square, A), n=100_000)
    assert est.value == pytest.approx(0.25, abs=1e-5)
    assert est.error_bound == 1e-5
    assert not est.exact


def test_longrun_pentagon_midpoint_orbit(pentagon):
    est = rotation_number_longrun(MapConfig(pentagon, PENTAGON_MIDPOINT_AREA), n=100_000)
    assert est.value == pytest.approx(0.2, abs=1e-5)


def test_longrun_matches_bisection_oracle(square):
    est = rotation_number_longrun(MapConfig(square, 0.3), n=2000)
    assert est.value == pytest.approx(longrun_rotation(square.vertices, 0.3, n=2000), abs=1e-9)


def test_displacement_at_periodic_point(square_cfg):
    s = (1 - square_corner_orbit_distance(0.1)) / 4
    assert abs(displacement(square_cfg, 1, 4, s)) < 1e-9


def test_displacement_positive_without_quarter_orbit(square):
    cfg = MapConfig(square, 0.2)
    g = [displacement(cfg, 1, 4, s) for s in grid_points(square, 64)]
    assert min(g) > 0


def test_grid_contains_vertices(pentagon):
    pts = grid_points(pentagon, 8)
    assert len(pts) == 40
    for k in range(5):
        assert np.any(np.isclose(pts, pentagon.cumulative_arc[k] / pentagon.perimeter, atol=1e-15))


@pytest.mark.parametrize("A", [0.1, 0.001])
def test_detect_quarter(square, A):
    found = detect_rational(MapConfig(square, A), q_max=50)
    assert (found.p, found.q) == (1, 4)
    assert found.residual <= 1e-9


def test_detect_witness_is_attracting_root(square_cfg):
    found = detect_rational(square_cfg, q_max=50)
    w = found.witness
    corner = square_cfg.poly.vertex(w.side + 1)
    assert math.dist(w.xy, corner) == pytest.approx(square_corner_orbit_distance(0.1), abs=1e-9)


def test_detect_nothing_below_q3(square):
    # tau(0.3) ~ 0.3965 is not locked to any rational with a small denominator
    assert detect_rational(MapConfig(square, 0.3), q_max=3) is None


def test_rotation_number_exact(square_cfg):
    est = rotation_number(square_cfg)
    assert est.exact and (est.p, est.q) == (1, 4)
    assert str(est) == "exact 1/4"


def test_rotation_number_longrun_fallback(square):
    est = rotation_number(MapConfig(square, 0.3), n=100_000)
    assert not est.exact
    assert 0.25 < est.value < 0.5
    assert str(est).startswith("longrun 0.39")


def test_quarter_plateau_edge_is_exact_third_orbit(square):
    # A = 0.2 sits at the lower edge of the 1/3 plateau: (0.5,0) -> (1,0.8) -> (0,0.8) closes
    est = rotation_number(MapConfig(square, 0.2))
    assert (est.p, est.q) == (1, 3)
    assert 0.25 < est.value < 0.5


def test_thirteen_hundredths(square):
    est = rotation_number(MapConfig(square, 0.13))
    assert Fraction(est.p, est.q) == Fraction(15, 56)
    lr = rotation_number_longrun(MapConfig(square, 0.13), n=100_000)
    assert abs(lr.value - 15 / 56) <= lr.error_bound


def test_house_pentagon_value(house):
    est = rotation_number(MapConfig(house, 1.2))
    assert 0.0 < est.value < 0.5
    lo = rotation_number(MapConfig(house, 1.15)).value
    hi = rotation_number(MapConfig(house, 1.25)).value
    assert lo <= est.value <= hi


def test_classify_area(square):
    assert classify_area(square, 0.1, 1, 4) == 0
    assert classify_area(square, 0.2, 1, 4) == 1
    assert classify_area(square, 0.2, 1, 2) == -1


def test_plateau_bounds_quarter(square):
    lo, hi = plateau_bounds(square, 1, 4, (0.10, 0.20), tol=1e-6)
    assert hi == pytest.approx(0.125, abs=1e-6)
    assert lo == pytest.approx(1e-6, abs=1e-12)


def test_plateau_bounds_degenerate_bracket(square):
    with pytest.raises(BracketInvalid):
        plateau_bounds(square, 1, 4, (0.3, 0.3))


def test_small_sweep_and_csv(square):
    rows = staircase_sweep(square, 0.02, 0.48, 25, n=20_000)
    taus = [r.tau for r in rows]
    assert np.all(np.diff(taus) >= -2 * 5e-5)
    assert rows[0].exact and Fraction(rows[0].p, rows[0].q) == Fraction(1, 4)
    buf = io.StringIO()
    write_staircase_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(STAIRCASE_COLUMNS)
    assert len(lines) == 26
    assert lines[1] == "0.02,0.02,0.25,1,4,1"


def test_parallel_sweep_is_identical(square):
    a = staircase_sweep(square, 0.05, 0.45, 12, n=5_000, jobs=1)
    b = staircase_sweep(square, 0.05, 0.45, 12, n=5_000, jobs=2)
    assert [(r.A, r.tau, r.p, r.q) for r in a] == [(r.A, r.tau, r.p, r.q) for r in b]


def test_plateaus_groups_runs():
    from areabilliard.rotation import StaircaseRow

    rows = [
        StaircaseRow(0.1, 0.1, 0.25, 1, 4, True, 0.0),
        StaircaseRow(0.2, 0.2, 0.25, 1, 4, True, 0.0),
        StaircaseRow(0.3, 0.3, 0.3, None, None, False, 1e-5),
        StaircaseRow(0.4, 0.4, 1 / 3, 1, 3, True, 0.0),
    ]
    assert plateaus(rows) == [(Fraction(1, 4), 0, 1), (Fraction(1, 3), 3, 3)]
