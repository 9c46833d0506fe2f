"""Polylines and sampled curves: length, R-arclength, reparametrization, distance."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ChordTooLong, DomainError, PartitionMismatch, SizeMismatch, ZeroLength
from .euclid import Partition, as_points, interpolate, part_variation, variation_estimate

CHORD_REL_TOL = 1e-12


@dataclass(frozen=True)
class Polyline:
    vertices: np.ndarray

    def __post_init__(self):
        v = as_points(self.vertices).copy()
        if v.shape[0] < 2:
            raise DomainError("a polyline needs at least two vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def chords(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    @property
    def mesh(self) -> float:
        return float(self.chords.max())

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self):
        return self.vertices.shape[0]


@dataclass(frozen=True)
class SampledCurve:
    partition: Partition
    points: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points).copy()
        if pts.shape[0] != self.partition.knots.size:
            raise SizeMismatch(
                f"{pts.shape[0]} points for {self.partition.knots.size} knots"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, points) -> "SampledCurve":
        pts = as_points(points)
        return cls(Partition.uniform(pts.shape[0] - 1), pts)

    @property
    def length(self) -> float:
        return part_variation(self.points, self.partition, 1)

    def variation(self, p: float, refine_depth: int = 0) -> float:
        return variation_estimate(self, p, refine_depth)

    def polyline(self) -> Polyline:
        return Polyline(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def polyline_length(pl: Polyline) -> float:
    return float(pl.chords.sum())


def r_arclength(a, b, R: float) -> float:
    """Length 2R*arcsin(|a-b|/2R) of a main R-arc through a and b."""
    if R <= 0:
        raise DomainError("R must be positive")
    d = float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
    return _r_arc_of_chord(d, R)


def _r_arc_of_chord(d: float, R: float) -> float:
    ratio = d / (2.0 * R)
    if ratio > 1.0 + CHORD_REL_TOL:
        raise ChordTooLong(f"chord {d} exceeds 2R = {2 * R}")
    return 2.0 * R * float(np.arcsin(min(ratio, 1.0)))


def r_arclength_polyline(pl: Polyline, R: float) -> float:
    if R <= 0:
        raise DomainError("R must be positive")
    return float(sum(_r_arc_of_chord(d, R) for d in pl.chords))


def standard_parametrization(c: SampledCurve, n_out: int) -> SampledCurve:
    """Resample the linear interpolant of ``c`` uniformly in arc length."""
    if n_out < 1:
        raise DomainError("n_out must be >= 1")
    chords = np.linalg.norm(np.diff(c.points, axis=0), axis=1)
    L = float(chords.sum())
    if L <= 0.0:
        raise ZeroLength("curve has zero length")
    s = np.concatenate([[0.0], np.cumsum(chords)])
    s[-1] = L
    keep = np.concatenate([[True], chords > 0])
    s_k, pts = s[keep], c.points[keep]
    target = np.linspace(0.0, L, n_out + 1)
    out = np.empty((n_out + 1, c.dim))
    for j in range(c.dim):
        out[:, j] = np.interp(target, s_k, pts[:, j])
    out[0], out[-1] = c.points[0], c.points[-1]
    return SampledCurve(Partition.uniform(n_out), out)


def resample_common(c1: SampledCurve, c2: SampledCurve) -> tuple[SampledCurve, SampledCurve]:
    n = max(c1.partition.n, c2.partition.n)
    return standard_parametrization(c1, n), standard_parametrization(c2, n)


def curve_dist(c1: SampledCurve, c2: SampledCurve, refine_depth: int = 0) -> float:
    """V_1 of the pointwise difference of two curves on a common partition."""
    if c1.partition.knots.size != c2.partition.knots.size or not np.array_equal(
        c1.partition.knots, c2.partition.knots
    ):
        raise PartitionMismatch("curves must share a partition; resample first")
    if c1.dim != c2.dim:
        raise SizeMismatch("curves live in different dimensions")
    diff = SampledCurve(c1.partition, c1.points - c2.points)
    return variation_estimate(diff, 1, refine_depth)


# serialization


def polyline_to_json(pl: Polyline | SampledCurve) -> str:
    pts = pl.vertices if isinstance(pl, Polyline) else pl.points
    return json.dumps([[float(v) for v in p] for p in pts])


def polyline_from_json(text: str) -> Polyline:
    return Polyline(np.array(json.loads(text), dtype=float))


def curve_to_csv(c: SampledCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i + 1}" for i in range(c.dim)])
    for t, p in zip(c.partition.knots, c.points):
        w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in p])
    return buf.getvalue()


def curve_from_csv(text: str) -> SampledCurve:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "t":
        raise DomainError("curve CSV must start with a 't,x1,...' header")
    body = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    return SampledCurve(Partition(body[:, 0]), body[:, 1:])
