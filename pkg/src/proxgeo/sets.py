"""Proximally smooth sets with distance and metric-projection oracles.

Each variant knows its exact nearest-point map (or, for implicit level sets,
a multi-start constrained Newton solver), how to sample itself and how to
serialize to the JSON set-spec format.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, ClassVar

import numpy as np

from .errors import (
    AmbiguousProjection,
    DomainError,
    InvalidSet,
    OutsideReach,
    SolverDiverged,
    UnsupportedVariant,
)
from .euclid import as_point

AMBIGUITY_RTOL = 1e-9
MEMBERSHIP_RTOL = 1e-8


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    distance: float
    iterations: int = 0
    residual: float = 0.0


def _frozen(v) -> np.ndarray:
    arr = np.array(v, dtype=float)
    arr.setflags(write=False)
    return arr


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(n)
        nv = np.linalg.norm(v)
        if nv > 1e-9:
            return v / nv


class ProxSetSpec:
    """Common interface; concrete variants are frozen dataclasses below."""

    variant: ClassVar[str] = ""
    R: float

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def true_radius(self) -> float:
        """Largest radius for which the set is known to be proximally smooth."""
        raise NotImplementedError

    def _check_radius(self, unchecked: bool) -> None:
        if not self.R > 0:
            raise InvalidSet("R must be positive")
        if not unchecked and self.R > self.true_radius * (1 + 1e-12):
            raise InvalidSet(
                f"{self.variant}: claimed R = {self.R} exceeds {self.true_radius}"
            )

    def nearest(self, x: np.ndarray) -> ProjectionResult:
        """Nearest point without reach checks; raises AmbiguousProjection."""
        raise NotImplementedError

    def distance(self, x: np.ndarray) -> float:
        return self.nearest(x).distance

    def membership_residual(self, x: np.ndarray) -> float:
        return self.distance(x)

    def contains(self, x, tol: float | None = None) -> bool:
        tol = MEMBERSHIP_RTOL * self.R if tol is None else tol
        return self.membership_residual(np.asarray(x, dtype=float)) <= tol

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def normal(self, p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """A unit vector v such that p + s*v projects back to p for small s >= 0."""
        raise NotImplementedError

    def sample_near(
        self, rng: np.random.Generator, count: int, max_dist: float
    ) -> np.ndarray:
        """Points at distance at most ``max_dist`` from the set."""
        base = self.sample(rng, count)
        out = np.empty_like(base)
        for i, p in enumerate(base):
            out[i] = p + rng.uniform(0.0, max_dist) * self.normal(p, rng)
        return out

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Sphere(ProxSetSpec):
    center: np.ndarray
    radius: float
    R: float
    unchecked_radius: bool = False
    variant: ClassVar[str] = "sphere"

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_point(self.center)))
        if not self.radius > 0:
            raise InvalidSet("sphere radius must be positive")
        self._check_radius(self.unchecked_radius)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def true_radius(self) -> float:
        return float(self.radius)

    def nearest(self, x):
        v = np.asarray(x, dtype=float) - self.center
        r = float(np.linalg.norm(v))
        if r < AMBIGUITY_RTOL * self.R:
            raise AmbiguousProjection("the sphere center projects to every point")
        return ProjectionResult(self.center + self.radius * v / r, abs(r - self.radius))

    def distance(self, x):
        return abs(float(np.linalg.norm(np.asarray(x, float) - self.center)) - self.radius)

    def sample(self, rng, count):
        return np.array(
            [self.center + self.radius * _random_unit(rng, self.dim) for _ in range(count)]
        )

    def normal(self, p, rng):
        v = p - self.center
        v = v / np.linalg.norm(v)
        return v if rng.uniform() < 0.5 else -v

    def to_json(self):
        return {
            "variant": self.variant,
            "center": self.center.tolist(),
            "radius": float(self.radius),
            "R": float(self.R),
        }


@dataclass(frozen=True)
class BallComplement(ProxSetSpec):
    """Closure of the complement of the open ball B(center, radius)."""

    center: np.ndarray
    radius: float
    R: float
    unchecked_radius: bool = False
    variant: ClassVar[str] = "ball_complement"

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_point(self.center)))
        if not self.radius > 0:
            raise InvalidSet("ball radius must be positive")
        self._check_radius(self.unchecked_radius)

    @property
    def dim(self):
        return self.center.size

    @property
    def true_radius(self):
        return float(self.radius)

    def nearest(self, x):
        x = np.asarray(x, dtype=float)
        v = x - self.center
        r = float(np.linalg.norm(v))
        if r >= self.radius:
            return ProjectionResult(x.copy(), 0.0)
        if r < AMBIGUITY_RTOL * self.R:
            raise AmbiguousProjection("the ball center projects to every boundary point")
        return ProjectionResult(self.center + self.radius * v / r, self.radius - r)

    def distance(self, x):
        r = float(np.linalg.norm(np.asarray(x, float) - self.center))
        return max(0.0, self.radius - r)

    def sample(self, rng, count):
        out = np.empty((count, self.dim))
        for i in range(count):
            scale = 1.0 if rng.uniform() < 0.5 else 1.0 + rng.uniform(0.0, 0.5)
            out[i] = self.center + self.radius * scale * _random_unit(rng, self.dim)
        return out

    def sample_near(self, rng, count, max_dist):
        out = np.empty((count, self.dim))
        for i in range(count):
            u = _random_unit(rng, self.dim)
            r = self.radius - rng.uniform(0.0, max_dist) if rng.uniform() < 0.8 else (
                self.radius + rng.uniform(0.0, max_dist)
            )
            out[i] = self.center + r * u
        return out

    def normal(self, p, rng):
        v = p - self.center
        return -v / np.linalg.norm(v)

    def to_json(self):
        return {
            "variant": self.variant,
            "center": self.center.tolist(),
            "radius": float(self.radius),
            "R": float(self.R),
        }


@dataclass(frozen=True)
class AffineFlat(ProxSetSpec):
    """base + span(basis rows); rows must be orthonormal."""

    base: np.ndarray
    basis: np.ndarray
    R: float
    unchecked_radius: bool = False
    variant: ClassVar[str] = "flat"

    def __post_init__(self):
        base = as_point(self.base)
        Q = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if Q.shape[1] != base.size or Q.shape[0] < 1 or Q.shape[0] > base.size:
            raise InvalidSet(f"basis shape {Q.shape} does not fit dimension {base.size}")
        if not np.allclose(Q @ Q.T, np.eye(Q.shape[0]), atol=1e-9):
            raise InvalidSet("flat basis must be orthonormal")
        object.__setattr__(self, "base", _frozen(base))
        object.__setattr__(self, "basis", _frozen(Q))
        self._check_radius(self.unchecked_radius)

    @property
    def dim(self):
        return self.base.size

    @property
    def true_radius(self):
        return float("inf")

    def nearest(self, x):
        x = np.asarray(x, dtype=float)
        p = self.base + self.basis.T @ (self.basis @ (x - self.base))
        return ProjectionResult(p, float(np.linalg.norm(x - p)))

    def sample(self, rng, count):
        k = self.basis.shape[0]
        coeffs = rng.uniform(-1.0, 1.0, size=(count, k)) * self.R
        return self.base + coeffs @ self.basis

    def normal(self, p, rng):
        v = rng.standard_normal(self.dim)
        v -= self.basis.T @ (self.basis @ v)
        nv = np.linalg.norm(v)
        return v / nv if nv > 1e-9 else np.zeros(self.dim)

    def to_json(self):
        return {
            "variant": self.variant,
            "base": self.base.tolist(),
            "basis": self.basis.tolist(),
            "R": float(self.R),
        }


@dataclass(frozen=True)
class ParallelPlanes(ProxSetSpec):
    """Union of the hyperplanes <x, normal> = offsets[0] and = offsets[1]."""

    normal_vec: np.ndarray
    offsets: tuple
    R: float
    unchecked_radius: bool = False
    variant: ClassVar[str] = "parallel_planes"

    def __post_init__(self):
        nu = as_point(self.normal_vec)
        if abs(np.linalg.norm(nu) - 1.0) > 1e-9:
            raise InvalidSet("plane normal must be a unit vector")
        lo, hi = sorted(float(o) for o in self.offsets)
        if not hi > lo:
            raise InvalidSet("plane offsets must differ")
        object.__setattr__(self, "normal_vec", _frozen(nu))
        object.__setattr__(self, "offsets", (lo, hi))
        self._check_radius(self.unchecked_radius)

    @property
    def dim(self):
        return self.normal_vec.size

    @property
    def true_radius(self):
        return (self.offsets[1] - self.offsets[0]) / 2.0

    def nearest(self, x):
        x = np.asarray(x, dtype=float)
        s = float(x @ self.normal_vec)
        d0, d1 = abs(s - self.offsets[0]), abs(s - self.offsets[1])
        if abs(d0 - d1) < AMBIGUITY_RTOL * self.R:
            raise AmbiguousProjection("point is equidistant from both planes")
        target = self.offsets[0] if d0 < d1 else self.offsets[1]
        return ProjectionResult(x + (target - s) * self.normal_vec, min(d0, d1))

    def distance(self, x):
        s = float(np.asarray(x, float) @ self.normal_vec)
        return min(abs(s - self.offsets[0]), abs(s - self.offsets[1]))

    def plane_index(self, x) -> int:
        s = float(np.asarray(x, float) @ self.normal_vec)
        return int(abs(s - self.offsets[1]) < abs(s - self.offsets[0]))

    def sample(self, rng, count):
        out = np.empty((count, self.dim))
        for i in range(count):
            v = rng.uniform(-1.0, 1.0, self.dim) * 2 * self.R
            v -= float(v @ self.normal_vec) * self.normal_vec
            out[i] = v + self.offsets[rng.integers(2)] * self.normal_vec
        return out

    def normal(self, p, rng):
        s = float(p @ self.normal_vec)
        # towards the other plane keeps the projection unchanged up to the midline
        return self.normal_vec if abs(s - self.offsets[0]) < abs(s - self.offsets[1]) else -self.normal_vec

    def to_json(self):
        return {
            "variant": self.variant,
            "normal": self.normal_vec.tolist(),
            "offsets": list(self.offsets),
            "R": float(self.R),
        }


# implicit level sets


@dataclass(frozen=True)
class ImplicitFunction:
    """Scalar function F with gradient and Hessian; the set is {F = 0}."""

    name: str
    params: dict
    dim: int
    func: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray] | None
    reach: float
    sampler: Callable[[np.random.Generator], np.ndarray]


def ellipsoid(semi_axes, center=None) -> ImplicitFunction:
    ax = np.asarray(semi_axes, dtype=float)
    if ax.ndim != 1 or ax.size < 2 or np.any(ax <= 0):
        raise InvalidSet("ellipsoid semi-axes must be positive")
    c = np.zeros(ax.size) if center is None else as_point(center, dim=ax.size)
    w = 1.0 / ax**2

    def func(x):
        y = x - c
        return float(np.sum(w * y * y) - 1.0)

    def grad(x):
        return 2.0 * w * (x - c)

    def hess(x):
        return np.diag(2.0 * w)

    def sampler(rng):
        u = _random_unit(rng, ax.size)
        return c + ax * u

    params = {"semi_axes": ax.tolist(), "center": c.tolist()}
    return ImplicitFunction(
        "ellipsoid", params, ax.size, func, grad, hess, float(ax.min() ** 2 / ax.max()), sampler
    )


def torus(major: float, minor: float, center=None) -> ImplicitFunction:
    """Torus in R^3 around the z-axis: (sqrt(x^2+y^2) - major)^2 + z^2 = minor^2."""
    if not 0 < minor < major:
        raise InvalidSet("torus needs 0 < minor < major")
    c = np.zeros(3) if center is None else as_point(center, dim=3)

    def func(x):
        y = x - c
        rho = np.hypot(y[0], y[1])
        return float((rho - major) ** 2 + y[2] ** 2 - minor**2)

    def grad(x):
        y = x - c
        rho = max(np.hypot(y[0], y[1]), 1e-300)
        k = 2.0 * (rho - major) / rho
        return np.array([k * y[0], k * y[1], 2.0 * y[2]])

    def hess(x):
        y = x - c
        rho = max(np.hypot(y[0], y[1]), 1e-300)
        e = np.array([y[0], y[1]]) / rho
        H = np.zeros((3, 3))
        H[:2, :2] = 2.0 * np.outer(e, e) + 2.0 * (rho - major) / rho * (np.eye(2) - np.outer(e, e))
        H[2, 2] = 2.0
        return H

    def sampler(rng):
        u, v = rng.uniform(0, 2 * np.pi, 2)
        rr = major + minor * np.cos(v)
        return c + np.array([rr * np.cos(u), rr * np.sin(u), minor * np.sin(v)])

    params = {"major": float(major), "minor": float(minor), "center": c.tolist()}
    return ImplicitFunction(
        "torus", params, 3, func, grad, hess, float(min(minor, major - minor)), sampler
    )


IMPLICIT_REGISTRY: dict[str, Callable[..., ImplicitFunction]] = {
    "ellipsoid": ellipsoid,
    "torus": torus,
}


@lru_cache(maxsize=None)
def _jitter_directions(n: int) -> np.ndarray:
    rng = np.random.default_rng(20240229 + n)
    d = rng.standard_normal((8, n))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


@dataclass(frozen=True)
class ImplicitLevelSet(ProxSetSpec):
    fn: ImplicitFunction
    R: float
    unchecked_radius: bool = False
    max_iter: int = 200
    variant: ClassVar[str] = "implicit"

    def __post_init__(self):
        self._check_radius(self.unchecked_radius)

    @property
    def dim(self):
        return self.fn.dim

    @property
    def true_radius(self):
        return self.fn.reach

    def membership_residual(self, x):
        g = self.fn.grad(x)
        ng = float(np.linalg.norm(g))
        if ng == 0.0:
            return float("inf")
        return abs(self.fn.func(x)) / ng

    def _solve(self, x: np.ndarray, y0: np.ndarray):
        """Damped Newton on the KKT system of min |y - x|^2 s.t. F(y) = 0."""
        fn, n = self.fn, self.dim
        y = y0.copy()
        g = fn.grad(y)
        gg = float(g @ g)
        if gg == 0.0:
            return None
        mu = -float((y - x) @ g) / gg

        def resid(y, mu):
            g = fn.grad(y)
            return np.concatenate([y - x + mu * g, [fn.func(y)]]), g

        r, g = resid(y, mu)
        step_tol = 1e-12 * self.R
        for it in range(1, self.max_iter + 1):
            J = np.empty((n + 1, n + 1))
            if fn.hess is not None:
                J[:n, :n] = np.eye(n) + mu * fn.hess(y)
            else:
                J[:n, :n] = np.eye(n)
            J[:n, n] = g
            J[n, :n] = g
            J[n, n] = 0.0
            try:
                delta = np.linalg.solve(J, -r)
            except np.linalg.LinAlgError:
                return None
            rn = float(np.linalg.norm(r))
            t = 1.0
            for _ in range(30):
                y_new, mu_new = y + t * delta[:n], mu + t * delta[n]
                r_new, g_new = resid(y_new, mu_new)
                if np.linalg.norm(r_new) < (1 - 1e-4 * t) * rn or rn < 1e-14:
                    break
                t *= 0.5
            else:
                return None
            step = t * float(np.linalg.norm(delta[:n]))
            y, mu, r, g = y_new, mu_new, r_new, g_new
            ng = float(np.linalg.norm(g))
            residual = float(np.linalg.norm(r[:n])) + (abs(r[n]) / ng if ng else np.inf)
            if step < step_tol or residual < 1e-13 * max(1.0, self.R):
                return y, it, residual
        return None

    def _candidates(self, x: np.ndarray) -> list:
        starts = [x] + [x + 0.1 * self.R * d for d in _jitter_directions(self.dim)]
        found = []
        for y0 in starts:
            sol = self._solve(x, y0)
            if sol is not None:
                y, it, res = sol
                found.append((float(np.linalg.norm(y - x)), y, it, res))
        if not found:
            raise SolverDiverged("no start converged to a point of the level set")
        found.sort(key=lambda f: f[0])
        return found

    def distance(self, x):
        # well defined even where the nearest point is not unique
        return self._candidates(np.asarray(x, dtype=float))[0][0]

    def nearest(self, x):
        x = np.asarray(x, dtype=float)
        found = self._candidates(x)
        best = found[0]
        for other in found[1:]:
            if other[0] - best[0] > AMBIGUITY_RTOL * self.R:
                break
            if np.linalg.norm(other[1] - best[1]) > 1e-6 * self.R:
                raise AmbiguousProjection("two distinct nearest points found")
        return ProjectionResult(best[1], best[0], best[2], best[3])

    def sample(self, rng, count):
        return np.array([self.fn.sampler(rng) for _ in range(count)])

    def normal(self, p, rng):
        g = self.fn.grad(p)
        g = g / np.linalg.norm(g)
        return g if rng.uniform() < 0.5 else -g

    def to_json(self):
        return {
            "variant": self.variant,
            "function": self.fn.name,
            "params": dict(self.fn.params),
            "R": float(self.R),
        }


# oracle entry points


def set_distance(s: ProxSetSpec, x) -> float:
    return s.distance(as_point(x, dim=s.dim))


def project(s: ProxSetSpec, x) -> ProjectionResult:
    """Unique nearest point of ``s`` to ``x``; requires dist(x, s) < R."""
    x = as_point(x, dim=s.dim)
    res = s.nearest(x)
    if res.distance >= s.R:
        raise OutsideReach(f"dist = {res.distance} >= R = {s.R}")
    return res


@dataclass(frozen=True)
class SupportCheck:
    passed: bool
    margin: float
    projection: np.ndarray
    support_center: np.ndarray


def check_weak_convexity_support(s: ProxSetSpec, x, tol: float | None = None) -> SupportCheck:
    """Audit dist(p + R (x - p)/|x - p|, A) >= R for p the projection of x."""
    x = as_point(x, dim=s.dim)
    tol = MEMBERSHIP_RTOL * s.R if tol is None else tol
    p = project(s, x).point
    v = x - p
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise DomainError("x lies in the set; the support condition needs dist(x, A) > 0")
    o = p + s.R * v / nv
    d = s.distance(o)
    return SupportCheck(d >= s.R - tol, d - s.R, p, o)


@dataclass
class PairOutcome:
    a: np.ndarray
    b: np.ndarray
    status: str  # "found", "missing", "skipped", "error"
    point: np.ndarray | None = None
    detail: str = ""


@dataclass
class SmoothnessReport:
    outcomes: list = field(default_factory=list)

    @property
    def found(self) -> int:
        return sum(o.status == "found" for o in self.outcomes)

    @property
    def skipped(self) -> int:
        return sum(o.status == "skipped" for o in self.outcomes)

    @property
    def failures(self) -> list:
        return [o for o in self.outcomes if o.status in ("missing", "error")]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_prox_smoothness_sampled(s: ProxSetSpec, pairs) -> SmoothnessReport:
    """For each pair, look for a point of A in D_R[a, b] other than a and b."""
    from .shortest_path import slice_project
    from .spindle import Spindle, spindle_contains

    report = SmoothnessReport()
    for a, b in pairs:
        a = as_point(a, dim=s.dim)
        b = as_point(b, dim=s.dim)
        d = float(np.linalg.norm(a - b))
        if not 0.0 < d < 2 * s.R:
            report.outcomes.append(PairOutcome(a, b, "skipped", detail="needs 0 < |a-b| < 2R"))
            continue
        try:
            y = slice_project(s, a, b, 0.5)
        except Exception as exc:  # collected per pair, never thrown
            report.outcomes.append(PairOutcome(a, b, "error", detail=f"{type(exc).__name__}: {exc}"))
            continue
        tol = 1e-7 * s.R
        ok = (
            s.contains(y, tol)
            and spindle_contains(Spindle(a, b, s.R), y, tol)
            and min(np.linalg.norm(y - a), np.linalg.norm(y - b)) > tol
        )
        report.outcomes.append(PairOutcome(a, b, "found" if ok else "missing", y))
    return report


# JSON set-spec format


def _req(d: dict, key: str):
    if key not in d:
        raise InvalidSet(f"set spec is missing '{key}'")
    return d[key]


def set_from_json(d: dict) -> ProxSetSpec:
    if not isinstance(d, dict):
        raise InvalidSet("set spec must be a JSON object")
    variant = _req(d, "variant")
    R = float(_req(d, "R"))
    unchecked = bool(d.get("unchecked_radius", False))
    if variant == "sphere":
        return Sphere(_req(d, "center"), float(_req(d, "radius")), R, unchecked)
    if variant == "ball_complement":
        return BallComplement(_req(d, "center"), float(_req(d, "radius")), R, unchecked)
    if variant == "flat":
        return AffineFlat(_req(d, "base"), _req(d, "basis"), R, unchecked)
    if variant == "parallel_planes":
        offsets = _req(d, "offsets")
        if len(offsets) != 2:
            raise InvalidSet("parallel_planes needs exactly two offsets")
        return ParallelPlanes(_req(d, "normal"), tuple(offsets), R, unchecked)
    if variant == "implicit":
        name = _req(d, "function")
        if name not in IMPLICIT_REGISTRY:
            raise UnsupportedVariant(f"unknown implicit function '{name}'")
        try:
            fn = IMPLICIT_REGISTRY[name](**d.get("params", {}))
        except TypeError as exc:
            raise InvalidSet(f"bad parameters for '{name}': {exc}") from exc
        return ImplicitLevelSet(fn, R, unchecked)
    raise UnsupportedVariant(f"unknown set variant '{variant}'")


def set_to_json(s: ProxSetSpec) -> dict:
    out = s.to_json()
    if getattr(s, "unchecked_radius", False):
        out["unchecked_radius"] = True
    return out
