"""Shortest curves on proximally smooth sets: projections, spindles, certified solvers."""
from .curves import Polyline, SampledCurve, curve_dist, r_arclength, standard_parametrization
from .euclid import Partition
from .sets import (
    AffineFlat,
    BallComplement,
    ImplicitLevelSet,
    ParallelPlanes,
    Sphere,
    ellipsoid,
    project,
    set_distance,
    set_from_json,
    torus,
)
from .shortest_path import (
    Certificate,
    ShortestCurveConfig,
    discrete_energy,
    energy_descent,
    shortest_curve,
    slice_bisection,
    slice_project,
)
from .spindle import Spindle, spindle_contains

__all__ = [
    "AffineFlat", "BallComplement", "Certificate", "ImplicitLevelSet", "ParallelPlanes",
    "Partition", "Polyline", "SampledCurve", "ShortestCurveConfig", "Sphere", "Spindle",
    "curve_dist", "discrete_energy", "ellipsoid", "energy_descent", "project", "r_arclength",
    "set_distance", "set_from_json", "shortest_curve", "slice_bisection", "slice_project",
    "spindle_contains", "standard_parametrization", "torus",
]
