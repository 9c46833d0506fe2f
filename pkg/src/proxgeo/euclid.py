"""Ambient vector helpers, partitions of [0, 1] and discrete variations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeMismatch

ZERO_TOL = 1e-12


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite float vector of length >= 2."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise DomainError(f"a point needs shape (n,) with n >= 2, got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError("point has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise DomainError(f"expected dimension {dim}, got {p.size}")
    return p


def as_points(xs) -> np.ndarray:
    arr = np.asarray(xs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DomainError(f"expected an (m, n) array with n >= 2, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("points have non-finite coordinates")
    return arr


def norm(v) -> float:
    return float(np.linalg.norm(v))


def angle(a, b) -> float:
    """Angle between two vectors in [0, pi]; zero if either vector vanishes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = norm(a), norm(b)
    if na < ZERO_TOL or nb < ZERO_TOL:
        return 0.0
    c = float(np.dot(a, b)) / (na * nb)
    return float(np.arccos(min(1.0, max(-1.0, c))))


@dataclass(frozen=True)
class Partition:
    """Strictly increasing knots 0 = t_0 < ... < t_n = 1."""

    knots: np.ndarray

    def __post_init__(self):
        t = np.array(self.knots, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise DomainError("a partition needs at least two knots")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise DomainError("partition must start at 0 and end at 1")
        if not np.all(np.diff(t) > 0):
            raise DomainError("partition knots must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "knots", t)

    @classmethod
    def uniform(cls, n: int) -> "Partition":
        if n < 1:
            raise DomainError("need at least one interval")
        t = np.linspace(0.0, 1.0, n + 1)
        t[0], t[-1] = 0.0, 1.0
        return cls(t)

    @property
    def n(self) -> int:
        """Number of intervals."""
        return self.knots.size - 1

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.knots)

    @property
    def mesh(self) -> float:
        return float(self.steps.max())

    def refine(self, depth: int) -> "Partition":
        """Dyadic refinement: split every interval into 2**depth equal parts."""
        if depth < 0:
            raise DomainError("refinement depth must be >= 0")
        if depth == 0:
            return self
        k = 2**depth
        t = self.knots
        frac = np.arange(k) / k
        fine = (t[:-1, None] + np.outer(np.diff(t), frac)).ravel()
        return Partition(np.append(fine, 1.0))

    def contains(self, other: "Partition") -> bool:
        """True if every knot of ``other`` is a knot of ``self``."""
        return bool(np.all(np.isin(other.knots, self.knots)))


def part_variation(samples, T: Partition, p: float) -> float:
    """Discrete variation of order p of samples taken at the knots of T."""
    if p < 1:
        raise DomainError(f"variation order must be >= 1, got {p}")
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != T.knots.size:
        raise SizeMismatch(f"{X.shape[0]} samples for {T.knots.size} knots")
    inc = np.linalg.norm(np.diff(X, axis=0), axis=1)
    if p == 1:
        return float(inc.sum())
    dt = T.steps
    return float(np.sum(inc**p * dt ** (1.0 - p)) ** (1.0 / p))


def interpolate(T: Partition, points: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation of knot values at parameters t."""
    t = np.asarray(t, dtype=float)
    idx = np.clip(np.searchsorted(T.knots, t, side="right") - 1, 0, T.n - 1)
    t0, t1 = T.knots[idx], T.knots[idx + 1]
    w = ((t - t0) / (t1 - t0))[:, None]
    return (1.0 - w) * points[idx] + w * points[idx + 1]


def variation_estimate(curve, p: float, refine_depth: int) -> float:
    """V_p of a sampled curve on the dyadic refinement of its partition.

    Between knots the curve is the linear interpolant, so the value is
    nondecreasing in ``refine_depth``.
    """
    if refine_depth < 0:
        raise DomainError("refine_depth must be >= 0")
    T = curve.partition
    if refine_depth == 0:
        return part_variation(curve.points, T, p)
    fine = T.refine(refine_depth)
    return part_variation(interpolate(T, curve.points, fine.knots), fine, p)
