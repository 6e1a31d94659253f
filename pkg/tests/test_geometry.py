import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from areabilliard.errors import DegenerateChord, DuplicateVertex, NonConvex, TooFewVertices
from areabilliard.geometry import (
    TOL,
    arc_of,
    cut_area,
    half_plane_sign,
    point_at,
    point_from,
    project_to_boundary,
    regular_polygon,
    side_line_intersection,
    validate_polygon,
)
from areabilliard.sampling import random_convex_polygon

from oracles import chord_cut_area, shoelace


def test_unit_square(square):
    assert square.area == 1.0
    assert square.perimeter == 4.0
    assert list(square.cumulative_arc) == [0.0, 1.0, 2.0, 3.0, 4.0]


def test_house_pentagon_area(house):
    assert house.area == pytest.approx(3.0, abs=1e-15)
    assert house.n == 5


def test_clockwise_input_is_reversed_keeping_first_vertex():
    poly = validate_polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert poly.area == 1.0
    assert poly.vertices.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]


@pytest.mark.parametrize(
    "pts, err",
    [
        ([(0, 0), (1, 0), (2, 0), (2, 2)], NonConvex),
        ([(0, 0), (1, 0)], TooFewVertices),
        ([(0, 0), (1, 0), (1, 0), (0, 1)], DuplicateVertex),
        ([(0, 0), (2, 0), (1, 0.5), (2, 2), (0, 2)], NonConvex),
        ([(0, 0), (1, 0), (0, 1), (1, 1)], NonConvex),
    ],
)
def test_rejects_bad_polygons(pts, err):
    with pytest.raises(err):
        validate_polygon(pts)


def test_collinear_triple_is_a_validation_error():
    from areabilliard.errors import ValidationError

    with pytest.raises(ValidationError):
        validate_polygon([(0, 0), (1, 0), (2, 0), (2, 2)])


def test_pentagram_winding_twice_rejected():
    star = [(math.cos(4 * math.pi * k / 5), math.sin(4 * math.pi * k / 5)) for k in range(5)]
    with pytest.raises(NonConvex):
        validate_polygon(star)


def test_point_at_origin(square):
    x = point_at(square, 0.0)
    assert (x.side, x.t, x.xy) == (0, 0.0, (0.0, 0.0))


def test_vertex_is_canonical_on_outgoing_side(square):
    x = point_at(square, 0.25)
    assert (x.side, x.t, x.xy) == (1, 0.0, (1.0, 0.0))
    y = point_from(square, 0, 1.0)
    assert (y.side, y.t) == (1, 0.0)


def test_point_at_reduces_mod_one(square):
    assert point_at(square, 1.3).xy == pytest.approx(point_at(square, 0.3).xy, abs=1e-15)
    assert point_at(square, -0.7).s == pytest.approx(0.3, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0, exclude_max=True))
def test_point_at_arc_roundtrip(s):
    poly = regular_polygon(7, side=0.3)
    x = point_at(poly, s)
    assert abs(arc_of(x) - s) <= 1e-12 or abs(abs(arc_of(x) - s) - 1.0) <= 1e-12
    p, q = poly.vertex(x.side), poly.vertex(x.side + 1)
    expect = (1 - x.t) * p + x.t * q
    assert np.hypot(*(np.asarray(x.xy) - expect)) <= 1e-12 * poly.perimeter


def test_cut_area_examples(square):
    x = project_to_boundary(square, (0, 1))
    y = project_to_boundary(square, (0.6, 0))
    assert cut_area(square, x, y) == pytest.approx(0.3, abs=1e-15)
    x = project_to_boundary(square, (0.5, 0))
    y = project_to_boundary(square, (1, 0.5))
    assert cut_area(square, x, y) == pytest.approx(0.125, abs=1e-15)


def test_cut_area_same_side_behind_wraps_whole_polygon(square):
    x = point_from(square, 0, 0.5)
    y = point_from(square, 0, 0.25)
    assert cut_area(square, x, y) == pytest.approx(1.0, abs=1e-15)


def test_cut_area_matches_clipping_oracle(rng):
    for _ in range(200):
        poly = random_convex_polygon(rng, 3, 12)
        x = point_at(poly, rng.uniform())
        y = point_at(poly, x.s + rng.uniform(0.05, 0.95))
        if x.side == y.side:
            continue
        want = chord_cut_area(poly.vertices, x.xy, y.xy)
        assert cut_area(poly, x, y) == pytest.approx(want, abs=1e-12 * poly.area)


def test_area_is_shoelace(rng):
    for _ in range(50):
        poly = random_convex_polygon(rng)
        assert poly.area == pytest.approx(shoelace(poly.vertices), rel=1e-14)
        assert poly.area > 0
        assert np.all(np.diff(poly.cumulative_arc) > 0)
        assert poly.cumulative_arc[-1] == pytest.approx(poly.perimeter)


def test_side_line_intersection(square, quad):
    assert side_line_intersection(square, 0, 2) is None
    assert np.allclose(side_line_intersection(square, 0, 1), [1, 0])
    assert np.allclose(side_line_intersection(quad, 2, 0), [8, 0])


def test_half_plane_sign():
    assert half_plane_sign((0, 0), (1, 0), (0.5, 1)) == 1
    assert half_plane_sign((0, 0), (1, 0), (0.5, -1)) == -1
    assert half_plane_sign((0, 0), (1, 0), (3, 1e-14)) == 0
    with pytest.raises(DegenerateChord):
        half_plane_sign((0, 0), (0, 0), (1, 1))


def test_random_polygons_are_strictly_convex(rng):
    for _ in range(200):
        poly = random_convex_polygon(rng, 3, 12)
        assert 3 <= poly.n <= 12
        e = np.roll(poly.vertices, -1, axis=0) - poly.vertices
        cross = np.roll(e, 1, axis=0)[:, 0] * e[:, 1] - np.roll(e, 1, axis=0)[:, 1] * e[:, 0]
        assert np.all(cross > TOL)


def test_json_roundtrip(tmp_path, house):
    from areabilliard.geometry import load_polygon

    path = tmp_path / "p.json"
    path.write_text(house.to_json())
    assert np.array_equal(load_polygon(path).vertices, house.vertices)
