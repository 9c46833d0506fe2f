"""Folding into a half-plane and radial projection onto circles.

A fold frame is a line through ``origin`` with unit direction ``axis``.  The
target half-plane is kept abstract: a point is represented by its coordinate
``xi`` along the axis and its (nonnegative) distance ``eta`` from the line.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import r_arclength
from .errors import ChordTooLong, DegenerateChord, DegenerateRadialDirection
from .euclid import ZERO_TOL, as_point


@dataclass(frozen=True)
class FoldFrame:
    origin: np.ndarray
    axis: np.ndarray

    def __post_init__(self):
        o = as_point(self.origin).copy()
        u = as_point(self.axis, dim=o.size).copy()
        nu = np.linalg.norm(u)
        if nu < ZERO_TOL:
            raise DegenerateChord("fold axis must be nonzero")
        u /= nu
        o.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "axis", u)

    @classmethod
    def through(cls, a, b) -> "FoldFrame":
        a = as_point(a)
        return cls(a, as_point(b, dim=a.size) - a)


def fold(frame: FoldFrame, x) -> tuple[float, float]:
    v = np.asarray(x, dtype=float) - frame.origin
    xi = float(v @ frame.axis)
    eta = float(np.linalg.norm(v - xi * frame.axis))
    return xi, eta


def fold_many(frame: FoldFrame, xs) -> np.ndarray:
    """Vectorized fold; returns an (m, 2) array of (xi, eta)."""
    V = np.asarray(xs, dtype=float) - frame.origin
    xi = V @ frame.axis
    eta = np.linalg.norm(V - np.outer(xi, frame.axis), axis=1)
    return np.column_stack([xi, eta])


def radial_project_to_circle(p2d, center2d, R: float) -> np.ndarray:
    p = np.asarray(p2d, dtype=float)
    c = np.asarray(center2d, dtype=float)
    v = p - c
    nv = float(np.hypot(v[0], v[1]))
    if nv < ZERO_TOL:
        raise DegenerateRadialDirection("point coincides with the circle center")
    return c + R * v / nv


def folded_arclength_lower_bound(a, b, interior, R: float) -> float:
    """R-arclength of the fold of a*interior*b radially pushed onto the main-arc circle.

    When every interior vertex lies outside the open spindle D_R[a, b] the
    result is at least ``r_arclength(a, b, R)``; it never exceeds the
    R-arclength of the original polyline.
    """
    a = as_point(a)
    b = as_point(b, dim=a.size)
    d = float(np.linalg.norm(b - a))
    if d >= 2 * R:
        raise ChordTooLong(f"|a-b| = {d} must be < 2R = {2 * R}")
    interior = np.asarray(interior, dtype=float).reshape(-1, a.size)
    if interior.shape[0] == 0:
        return r_arclength(a, b, R)
    if d < ZERO_TOL:
        raise DegenerateChord("a and b coincide")
    frame = FoldFrame.through(a, b)
    h = np.sqrt(R * R - d * d / 4.0)
    center = np.array([d / 2.0, -h])
    pts = [np.zeros(2)]
    pts += [radial_project_to_circle(q, center, R) for q in fold_many(frame, interior)]
    pts.append(np.array([d, 0.0]))
    chords = np.linalg.norm(np.diff(np.array(pts), axis=0), axis=1)
    ratio = np.minimum(chords / (2 * R), 1.0)
    return float(np.sum(2 * R * np.arcsin(ratio)))
