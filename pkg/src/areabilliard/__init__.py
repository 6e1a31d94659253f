"""Constant-area chord maps on convex polygons, their rotation numbers, and
numerical checks of the chord-sign lemmas behind them."""

from ._backend import BACKEND
from .analysis import (
    ChordRecord,
    DeformationRecord,
    chord_marks,
    deformation_velocities,
    fake_orbit,
    return_derivative,
    sigma,
    verify_lemma1,
    verify_lemma2,
    verify_lemma3,
    verify_lemma4,
)
from .billiard import MapConfig, OrbitRecord, derivative, envelope_midpoint, lift_n, orbit, phi, phi_lift, phi_step_area
from .errors import NumericalFailure, ValidationError
from .geometry import BoundaryPoint, Polygon, cut_area, point_at, validate_polygon
from .moebius import ChartedLine, MarkedConfig, ProjMap, area_map, compose, is_identity
from .rotation import RotationEstimate, plateau_bounds, rotation_number, staircase_sweep

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundaryPoint",
    "ChartedLine",
    "ChordRecord",
    "DeformationRecord",
    "MapConfig",
    "MarkedConfig",
    "NumericalFailure",
    "OrbitRecord",
    "Polygon",
    "ProjMap",
    "RotationEstimate",
    "ValidationError",
    "area_map",
    "chord_marks",
    "compose",
    "cut_area",
    "deformation_velocities",
    "derivative",
    "envelope_midpoint",
    "fake_orbit",
    "is_identity",
    "lift_n",
    "orbit",
    "phi",
    "phi_lift",
    "phi_step_area",
    "plateau_bounds",
    "point_at",
    "return_derivative",
    "rotation_number",
    "sigma",
    "staircase_sweep",
    "validate_polygon",
    "verify_lemma1",
    "verify_lemma2",
    "verify_lemma3",
    "verify_lemma4",
]
