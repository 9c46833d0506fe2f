"""Strongly convex segments (spindles) D_R[a, b].

D_R[a, b] is the intersection of all radius-R balls containing a and b.  The
balls whose spheres pass through both points have centers m + h*w with w a
unit vector orthogonal to b - a; maximizing |x - (m + h*w)| over w gives the
closed-form membership test used here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CHORD_REL_TOL, Polyline
from .errors import BadDirection, ChordTooLong, DegenerateChord, DomainError
from .euclid import ZERO_TOL, angle, as_point
from .folding import FoldFrame, fold

BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class Spindle:
    a: np.ndarray
    b: np.ndarray
    R: float
    m: np.ndarray = field(init=False)
    c: float = field(init=False)
    h: float = field(init=False)

    def __post_init__(self):
        a = as_point(self.a).copy()
        b = as_point(self.b, dim=a.size).copy()
        R = float(self.R)
        if R <= 0:
            raise DomainError("R must be positive")
        d = float(np.linalg.norm(b - a))
        if d > 2 * R * (1 + CHORD_REL_TOL):
            raise ChordTooLong(f"|a-b| = {d} exceeds 2R = {2 * R}")
        c = min(d / 2.0, R)
        for v in (a, b):
            v.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "m", (a + b) / 2.0)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "h", float(np.sqrt(max(R * R - c * c, 0.0))))

    @property
    def chord(self) -> float:
        return 2.0 * self.c

    @property
    def degenerate(self) -> bool:
        return self.chord < ZERO_TOL * max(1.0, self.R)

    @property
    def axis(self) -> np.ndarray:
        if self.degenerate:
            raise DegenerateChord("a and b coincide")
        return (self.b - self.a) / self.chord

    @property
    def frame(self) -> FoldFrame:
        return FoldFrame(self.a, self.b - self.a)

    @property
    def tol(self) -> float:
        return BOUNDARY_TOL * self.R


def _max_center_distance(sp: Spindle, x: np.ndarray) -> float:
    v = x - sp.m
    along = float(v @ sp.axis)
    perp = float(np.linalg.norm(v - along * sp.axis))
    return float(np.hypot(along, perp + sp.h))


def spindle_margin(sp: Spindle, x) -> float:
    """Largest distance from x to a bounding-ball center, minus R (<= 0 inside)."""
    x = np.asarray(x, dtype=float)
    if sp.degenerate:
        return float(np.linalg.norm(x - sp.a))
    return _max_center_distance(sp, x) - sp.R


def spindle_contains(sp: Spindle, x, tol: float | None = None) -> bool:
    tol = sp.tol if tol is None else tol
    return spindle_margin(sp, x) <= tol


def _dist_to_arc(p: np.ndarray, center: np.ndarray, R: float, side: float, ends) -> float:
    v = p - center
    r = float(np.hypot(v[0], v[1]))
    if r < ZERO_TOL:
        return R
    q = center + R * v / r
    if side * q[1] >= -ZERO_TOL * R:
        return abs(r - R)
    return min(float(np.hypot(*(p - e))) for e in ends)


def spindle_boundary_distance(sp: Spindle, x) -> float:
    """Signed distance to the spindle boundary (negative inside)."""
    if sp.degenerate:
        raise DegenerateChord("a and b coincide")
    xi, eta = fold(sp.frame, x)
    p = np.array([xi, eta])
    d = sp.chord
    ends = (np.zeros(2), np.array([d, 0.0]))
    upper = _dist_to_arc(p, np.array([d / 2.0, -sp.h]), sp.R, 1.0, ends)
    lower = _dist_to_arc(p, np.array([d / 2.0, sp.h]), sp.R, -1.0, ends)
    dist = min(upper, lower)
    inside = np.hypot(xi - d / 2.0, eta + sp.h) <= sp.R
    return -dist if inside else dist


def _unit_perp(sp: Spindle, direction) -> np.ndarray:
    w = as_point(direction, dim=sp.a.size)
    nw = float(np.linalg.norm(w))
    if nw < ZERO_TOL or abs(float(w @ sp.axis)) > 1e-9 * nw:
        raise BadDirection("direction must be a nonzero vector orthogonal to b - a")
    w = w - float(w @ sp.axis) * sp.axis
    return w / np.linalg.norm(w)


def arc_points(sp: Spindle, w: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Points of the main R-arc bulging towards unit w, at angles in [-theta, theta]."""
    o = sp.m - sp.h * w
    return o + sp.R * (np.outer(np.cos(phis), w) + np.outer(np.sin(phis), sp.axis))


def half_angle(sp: Spindle) -> float:
    return float(np.arcsin(min(sp.c / sp.R, 1.0)))


def main_arc(sp: Spindle, direction, k: int) -> Polyline:
    """k+1 points equally spaced along the main R-arc on the side of ``direction``."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if sp.degenerate:
        raise DegenerateChord("a and b coincide")
    w = _unit_perp(sp, direction)
    theta = half_angle(sp)
    pts = arc_points(sp, w, np.linspace(-theta, theta, k + 1))
    pts[0], pts[-1] = sp.a, sp.b
    return Polyline(pts)


def ray_enters_spindle(sp: Spindle, direction) -> bool:
    """Whether the ray from a along ``direction`` meets D_R[a, b] away from a and b."""
    if sp.degenerate:
        raise DegenerateChord("a and b coincide")
    threshold = float(np.arcsin(min(sp.chord / (2 * sp.R), 1.0)))
    # strict inequality, guarded against rounding in arccos
    return angle(direction, sp.b - sp.a) < threshold - 1e-12


def random_perp(sp: Spindle, rng: np.random.Generator) -> np.ndarray:
    n = sp.a.size
    while True:
        w = rng.standard_normal(n)
        w -= float(w @ sp.axis) * sp.axis
        nw = np.linalg.norm(w)
        if nw > 1e-6:
            return w / nw


def sample_spindle(sp: Spindle, rng: np.random.Generator, count: int) -> np.ndarray:
    """Random points of D_R[a, b]: chord points, boundary arcs and mixtures."""
    if sp.degenerate:
        return np.repeat(sp.a[None, :], count, axis=0)
    theta = half_angle(sp)
    out = np.empty((count, sp.a.size))
    for i in range(count):
        w = random_perp(sp, rng)
        q = arc_points(sp, w, np.array([rng.uniform(-theta, theta)]))[0]
        base = sp.m + float((q - sp.m) @ sp.axis) * sp.axis
        s = rng.choice([0.0, 1.0, rng.uniform()])
        out[i] = base + s * (q - base)
    return out


def hereditary_check(
    sp: Spindle, c, d, samples: int, rng: np.random.Generator | None = None
) -> tuple[bool, np.ndarray | None]:
    """Sample D_R[c, d] and confirm every sample lies in D_R[a, b].

    Returns ``(True, None)`` or ``(False, witness)`` for the first violation.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    inner = Spindle(c, d, sp.R)
    for x in np.vstack([inner.a, inner.b, inner.m, sample_spindle(inner, rng, samples)]):
        if not spindle_contains(sp, x):
            return False, x
    return True, None
