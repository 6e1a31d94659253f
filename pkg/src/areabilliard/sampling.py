"""Random convex polygons and orbit segments for property checks."""

from __future__ import annotations

import math

import numpy as np

from .billiard import MapConfig
from .geometry import Polygon, validate_polygon


def random_convex_polygon(rng: np.random.Generator, n_min: int = 3, n_max: int = 12) -> Polygon:
    """Vertices at sorted random angles on the unit circle, then a random affine map.

    Angular gaps are kept away from zero and from ``pi`` so the result is
    strictly convex with no near-degenerate corners.
    """
    n = int(rng.integers(n_min, n_max + 1))
    while True:
        ang = np.sort(rng.uniform(0.0, 2 * math.pi, n))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
        if gaps.min() > 0.05 and gaps.max() < 0.9 * math.pi:
            break
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    # affine image with bounded distortion
    rot = rng.uniform(0.0, 2 * math.pi)
    c, s = math.cos(rot), math.sin(rot)
    stretch = np.diag([1.0, rng.uniform(0.4, 1.0)])
    shear = np.array([[1.0, rng.uniform(-0.5, 0.5)], [0.0, 1.0]])
    m = np.array([[c, -s], [s, c]]) @ stretch @ shear
    pts = pts @ m.T + rng.uniform(-2.0, 2.0, 2)
    return validate_polygon(pts)


def random_config(rng: np.random.Generator, n_max: int = 12, lo: float = 0.01, hi: float = 0.49) -> MapConfig:
    poly = random_convex_polygon(rng, 3, n_max)
    return MapConfig(poly, rng.uniform(lo, hi) * poly.area)
