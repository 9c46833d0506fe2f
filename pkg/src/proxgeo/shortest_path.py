"""Constructive shortest-curve algorithms on proximally smooth sets.

slice_project       nearest point of A in the hyperplane through a chord point
unfold_flat_curve   unfolding of a polyline inscribed in a main R-arc
slice_bisection     dyadic curve built from chord-midpoint slice-projections
energy_descent      Gauss-Seidel minimization of the discrete energy
average_and_project projected averaging of two inscribed polylines
shortest_curve      the end-to-end pipeline with a certificate
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .curves import (
    Polyline,
    SampledCurve,
    r_arclength,
    r_arclength_polyline,
    standard_parametrization,
)
from .errors import (
    AmbiguousProjection,
    ChordTooLong,
    DegenerateChord,
    DegenerateEndpoints,
    DomainError,
    EndpointsNotInSet,
    EnergyIncreased,
    MeshTooCoarse,
    NotReachable,
    OutsideReach,
    PointsTooFar,
    PointsTooFarApart,
    ProjectionFailed,
    RootNotBracketed,
    SizeMismatch,
    SolverDiverged,
    TemplateNotOnArc,
)
from .euclid import Partition, as_point
from .sets import ProxSetSpec
from .spindle import (
    Spindle,
    arc_points,
    random_perp,
    spindle_boundary_distance,
    spindle_contains,
)

logger = logging.getLogger(__name__)

IN_SET_RTOL = 1e-7
HYPERPLANE_RTOL = 1e-8
_PROJECTION_ERRORS = (AmbiguousProjection, OutsideReach, SolverDiverged)


def _nearest_within_reach(s: ProxSetSpec, x: np.ndarray) -> np.ndarray:
    res = s.nearest(x)
    if res.distance >= s.R:
        raise OutsideReach(f"dist = {res.distance} >= R = {s.R}")
    return res.point


def _check_in_set(s: ProxSetSpec, *pts) -> None:
    for p in pts:
        if not s.contains(p, IN_SET_RTOL * s.R):
            raise EndpointsNotInSet(f"point {p} is not in the set")


# slice-projection


def _slice_at_fraction(s: ProxSetSpec, p: np.ndarray, q: np.ndarray, frac: float) -> np.ndarray:
    """Slice-projection of p + frac*(q - p) with respect to [p, q]."""
    e = q - p
    d2 = float(e @ e)
    target = p + frac * e

    def g(u: float) -> float:
        if u <= 0.0:
            return -frac * d2
        if u >= 1.0:
            return (1.0 - frac) * d2
        try:
            y = _nearest_within_reach(s, p + u * e)
        except _PROJECTION_ERRORS as exc:
            raise RootNotBracketed(f"projection failed along the chord: {exc}") from exc
        return float((y - target) @ e)

    try:
        u_star = brentq(g, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    except RuntimeError as exc:
        raise RootNotBracketed(str(exc)) from exc
    try:
        y = _nearest_within_reach(s, p + u_star * e)
    except _PROJECTION_ERRORS as exc:
        raise RootNotBracketed(f"projection failed at the root: {exc}") from exc
    offset = abs(float((y - target) @ e)) / math.sqrt(d2)
    if offset > HYPERPLANE_RTOL * s.R:
        raise RootNotBracketed(
            f"projection curve jumps across the slice (offset {offset:.3g}); "
            "the set is not proximally smooth with the claimed R"
        )
    return y


def slice_project(s: ProxSetSpec, x1, x2, t: float) -> np.ndarray:
    """Unique nearest point of A in the hyperplane through t*x1 + (1-t)*x2
    orthogonal to x2 - x1."""
    x1 = as_point(x1, dim=s.dim)
    x2 = as_point(x2, dim=s.dim)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    _check_in_set(s, x1, x2)
    d = float(np.linalg.norm(x2 - x1))
    if d == 0.0:
        raise DegenerateChord("x1 and x2 coincide")
    if d >= 2 * s.R:
        raise ChordTooLong(f"|x1-x2| = {d} must be < 2R = {2 * s.R}")
    if t == 1.0:
        return x1.copy()
    if t == 0.0:
        return x2.copy()
    return _slice_at_fraction(s, x1, x2, 1.0 - t)


# slice-bisection


def bisection_levels(s: ProxSetSpec, a, b, depth: int) -> list[Polyline]:
    """Polylines Gamma_0, ..., Gamma_depth of the slice-bisection construction."""
    a = as_point(a, dim=s.dim)
    b = as_point(b, dim=s.dim)
    if depth < 0:
        raise DomainError("depth must be >= 0")
    _check_in_set(s, a, b)
    d = float(np.linalg.norm(a - b))
    if d == 0.0:
        raise DegenerateChord("a and b coincide")
    if d >= 2 * s.R:
        raise ChordTooLong(f"|a-b| = {d} must be < 2R = {2 * s.R}")
    levels = [Polyline(np.array([a, b]))]
    for _ in range(depth):
        levels.append(_bisect_once(s, levels[-1]))
    return levels


def _bisect_once(s: ProxSetSpec, level: Polyline) -> Polyline:
    pts = level.vertices
    tiny = 1e-14 * s.R
    out = [pts[0]]
    for p, q in zip(pts[:-1], pts[1:]):
        if np.linalg.norm(q - p) <= tiny:
            out.append(p.copy())
        else:
            out.append(_slice_at_fraction(s, p, q, 0.5))
        out.append(q)
    return Polyline(np.array(out))


def slice_bisection(s: ProxSetSpec, a, b, depth: int) -> SampledCurve:
    pl = bisection_levels(s, a, b, depth)[-1]
    return SampledCurve(Partition.uniform(2**depth), pl.vertices)


# unfolding of a flat curve


def _check_template(template: Polyline, R: float) -> None:
    x0, xn = template.vertices[0], template.vertices[-1]
    d = float(np.linalg.norm(xn - x0))
    if d >= 2 * R:
        raise TemplateNotOnArc("template endpoints must be closer than 2R")
    if d == 0.0:
        if np.any(template.chords > 1e-12 * R):
            raise TemplateNotOnArc("a closed template cannot lie on a main arc")
        return
    sp = Spindle(x0, xn, R)
    tol = 1e-7 * R
    for v in template.vertices[1:-1]:
        if abs(spindle_boundary_distance(sp, v)) > tol:
            raise TemplateNotOnArc(f"vertex {v} is off the main arcs of [x0, xn]")
    try:
        excess = r_arclength_polyline(template, R) - r_arclength(x0, xn, R)
    except ChordTooLong as exc:
        raise TemplateNotOnArc(str(exc)) from exc
    if abs(excess) > tol * len(template):
        raise TemplateNotOnArc("template vertices are not ordered along one main arc")


def unfold_flat_curve(s: ProxSetSpec, template: Polyline, y0, yn) -> Polyline:
    """Polyline in A with chords no longer than the template's chords.

    Each new vertex is the slice-projection onto the hyperplane orthogonal to
    [y_i, y_n] at which the boundary of D_R[y_i, y_n] is at the prescribed
    chord distance from y_i.
    """
    R = s.R
    y0 = as_point(y0, dim=s.dim)
    yn = as_point(yn, dim=s.dim)
    _check_template(template, R)
    X = template.vertices
    n = X.shape[0] - 1
    _check_in_set(s, y0, yn)
    if np.linalg.norm(y0 - yn) > np.linalg.norm(X[0] - X[-1]) * (1 + 1e-12) + 1e-15:
        raise DomainError("need |y0 - yn| <= |x0 - xn|")
    ys = [y0]
    i = 0
    while i < n:
        yi = ys[i]
        rest = float(np.linalg.norm(yi - yn))
        step = float(np.linalg.norm(X[i + 1] - X[i]))
        if rest <= step * (1 + 1e-9) or rest <= 1e-14 * R:
            ys.extend([yn] * (n - i))
            break
        if step <= 1e-15 * R:
            ys.append(yi)
            i += 1
            continue
        gap = math.asin(min(rest / (2 * R), 1.0)) - math.asin(min(step / (2 * R), 1.0))
        along = step * math.cos(gap)
        ys.append(_slice_at_fraction(s, yi, yn, along / rest))
        i += 1
    return Polyline(np.array(ys))


# discrete energy


def discrete_energy(T: Partition, X) -> float:
    X = np.asarray(X, dtype=float)
    if X.shape[0] != T.knots.size:
        raise SizeMismatch(f"{X.shape[0]} points for {T.knots.size} knots")
    inc = np.diff(X, axis=0)
    return float(np.sum(np.einsum("ij,ij->i", inc, inc) / T.steps))


def energy_bound_kT(T: Partition) -> float:
    """Energy-to-length distortion factor for partitions of mesh at most 4/pi^2."""
    mesh = T.mesh
    if mesh > 4.0 / math.pi**2 * (1 + 1e-12):
        raise MeshTooCoarse(f"mesh {mesh} exceeds 4/pi^2")
    x = min(math.pi / 2.0 * math.sqrt(mesh), 1.0)
    return math.asin(x) / x


@dataclass
class DescentTrace:
    energies: list = field(default_factory=list)
    sweeps: int = 0
    converged: bool = False


def energy_descent(
    s: ProxSetSpec,
    T: Partition,
    X0,
    sweeps: int,
    tol: float | None = None,
    trace: DescentTrace | None = None,
) -> np.ndarray:
    """Gauss-Seidel sweeps of three-point minimizers with fixed endpoints.

    Sweeps alternate forward and backward.  With ``tol`` set, stops once a
    sweep lowers the energy by less than ``tol``.
    """
    X = np.array(X0, dtype=float)
    if X.shape[0] != T.knots.size:
        raise SizeMismatch(f"{X.shape[0]} points for {T.knots.size} knots")
    t = T.knots
    lam = (t[1:-1] - t[:-2]) / (t[2:] - t[:-2])
    n = T.n
    E = discrete_energy(T, X)
    if trace is not None:
        trace.energies.append(E)
    for sweep in range(sweeps):
        order = range(1, n) if sweep % 2 == 0 else range(n - 1, 0, -1)
        for i in order:
            w = lam[i - 1]
            y = (1.0 - w) * X[i - 1] + w * X[i + 1]
            try:
                X[i] = _nearest_within_reach(s, y)
            except _PROJECTION_ERRORS as exc:
                raise ProjectionFailed(f"vertex {i}: {exc}") from exc
        E_new = discrete_energy(T, X)
        if E_new > E + 1e-11 * max(1.0, E):
            raise EnergyIncreased(f"sweep {sweep}: {E} -> {E_new}")
        drop, E = E - E_new, E_new
        if trace is not None:
            trace.energies.append(E)
            trace.sweeps = sweep + 1
        if tol is not None and drop < tol:
            if trace is not None:
                trace.converged = True
            break
    return X


# projected averaging


@dataclass(frozen=True)
class AveragingResult:
    Z: np.ndarray
    lam: float
    gap: float
    delta_energy: float
    speed: float
    bound: float
    mesh_term: float

    @property
    def margin(self) -> float:
        """gap minus the guaranteed decrease; nonnegative when the inequality holds."""
        return self.gap - self.bound


def average_and_project(s: ProxSetSpec, T: Partition, X, Y, lam: float) -> AveragingResult:
    """z_i = projection of lam*x_i + (1 - lam)*y_i, with energy diagnostics."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape or X.shape[0] != T.knots.size:
        raise SizeMismatch("X, Y and T must have matching sizes")
    if not 0.0 < lam <= 1.0 / 16.0:
        raise DomainError("lambda must lie in (0, 1/16]")
    if not (np.allclose(X[0], Y[0], atol=1e-12) and np.allclose(X[-1], Y[-1], atol=1e-12)):
        raise DomainError("X and Y must share endpoints")
    R = s.R
    gaps = np.linalg.norm(X - Y, axis=1)
    if np.any(gaps >= 2 * R):
        raise PointsTooFarApart(f"max |x_i - y_i| = {gaps.max()} >= 2R")
    Z = np.empty_like(X)
    for i, (x, y) in enumerate(zip(X, Y)):
        try:
            Z[i] = _nearest_within_reach(s, lam * x + (1 - lam) * y)
        except _PROJECTION_ERRORS as exc:
            raise ProjectionFailed(f"vertex {i}: {exc}") from exc
    EX, EY, EZ = discrete_energy(T, X), discrete_energy(T, Y), discrete_energy(T, Z)
    E_delta = discrete_energy(T, X - Y)
    dt = T.steps
    speed = float(
        max(
            (np.linalg.norm(np.diff(X, axis=0), axis=1) / dt).max(),
            (np.linalg.norm(np.diff(Y, axis=0), axis=1) / dt).max(),
        )
    )
    coeff = lam * (1 - lam) * (1 - speed**2 / (math.pi**2 * R**2) * (1 + 20 * lam))
    mesh_term = T.n * (speed**2 * T.mesh / R) ** 2
    return AveragingResult(
        Z=Z,
        lam=lam,
        gap=lam * EX + (1 - lam) * EY - EZ,
        delta_energy=E_delta,
        speed=speed,
        bound=coeff * E_delta - mesh_term,
        mesh_term=mesh_term,
    )


def default_lambda(R: float, rho: float) -> float:
    """Averaging weight min(1/16, min(1, 4 pi^2 R^2 / (pi R + rho)^2 - 1) / 30)."""
    inner = min(1.0, 4 * math.pi**2 * R**2 / (math.pi * R + rho) ** 2 - 1.0)
    return min(1.0 / 16.0, inner / 30.0) if inner > 0 else 1.0 / 16.0


# spindle repair


def repair_outside_spindle(s: ProxSetSpec, T: Partition, X, tol: float | None = None) -> np.ndarray:
    """Replace runs of vertices outside D_R[a, b] without increasing chord lengths.

    A run x_i ... x_{i+m} with outside interior vertices has R-arclength at
    least that of [x_i, x_{i+m}]; its central angles are shrunk onto a main
    arc of that exact chord and the resulting template is unfolded into A.
    """
    X = np.array(X, dtype=float)
    if X.shape[0] != T.knots.size:
        raise SizeMismatch(f"{X.shape[0]} points for {T.knots.size} knots")
    R = s.R
    tol = 1e-8 * R if tol is None else tol
    sp = Spindle(X[0], X[-1], R)
    outside = [not spindle_contains(sp, x, tol) for x in X]
    outside[0] = outside[-1] = False
    i = 0
    n = X.shape[0] - 1
    while i < n:
        if not outside[i + 1]:
            i += 1
            continue
        j = i + 1
        while outside[j]:
            j += 1
        X[i : j + 1] = _repair_run(s, X[i : j + 1])
        i = j
    return X


def _repair_run(s: ProxSetSpec, run: np.ndarray) -> np.ndarray:
    R = s.R
    p, q = run[0], run[-1]
    chords = np.linalg.norm(np.diff(run, axis=0), axis=1)
    if np.any(chords >= 2 * R):
        raise ChordTooLong("a chord of the polyline reaches 2R")
    D = float(np.linalg.norm(q - p))
    if D <= 1e-14 * R:
        return np.repeat(p[None, :], run.shape[0], axis=0)
    angles = 2 * np.arcsin(chords / (2 * R))
    total = 2 * math.asin(min(D / (2 * R), 1.0))
    scale = min(1.0, total / angles.sum())
    if scale >= 1.0 and angles.sum() < total * (1 - 1e-9):
        logger.warning("outside run is shorter than the main arc; leaving it unchanged")
        return run
    phis = np.concatenate([[0.0], np.cumsum(angles * scale)])
    phis *= total / phis[-1]
    # template on a unit-frame circle: only chord lengths matter to the unfolding
    sp = Spindle(p, q, R)
    w = random_perp(sp, np.random.default_rng(0))
    template = arc_points(sp, w, phis - total / 2)
    template[0], template[-1] = p, q
    return unfold_flat_curve(s, Polyline(template), p, q).vertices


# pipeline


@dataclass(frozen=True)
class ShortestCurveConfig:
    bisection_depth: int = 6
    energy_sweeps: int = 3000
    averaging_rounds: int = 0
    lam: float | None = None
    tol_length: float = 1e-6
    partition_size: int = 64
    seed: int = 0
    init_jitter: float = 1e-3
    sandwich_slack: float = 1e-6

    def __post_init__(self):
        if self.bisection_depth < 1:
            raise DomainError("bisection_depth must be >= 1")
        if self.energy_sweeps < 0 or self.averaging_rounds < 0:
            raise DomainError("sweep and round counts must be >= 0")
        if self.lam is not None and not 0.0 < self.lam <= 1.0 / 16.0:
            raise DomainError("lambda must lie in (0, 1/16]")
        if not self.tol_length > 0:
            raise DomainError("tol_length must be positive")
        if self.partition_size < 3:
            raise DomainError("partition_size must be >= 3 (mesh <= 4/pi^2)")
        if self.init_jitter < 0:
            raise DomainError("init_jitter must be >= 0")


@dataclass
class Certificate:
    length: float
    arc_bound: float
    bound_satisfied: bool
    spindle_contained: bool
    tangent_lipschitz_ok: bool
    energy_value: float
    k_T: float
    energy_sandwich_ok: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return (
            self.bound_satisfied
            and self.spindle_contained
            and self.tangent_lipschitz_ok
            and self.energy_sandwich_ok
        )

    def to_json(self) -> dict:
        out = asdict(self)
        out["all_ok"] = self.all_ok
        return out


def _initial_polyline(
    s: ProxSetSpec, base: SampledCurve, n: int, jitter: float, rng: np.random.Generator
) -> np.ndarray:
    X = standard_parametrization(base, n).points.copy()
    step = base.length / n
    for i in range(1, n):
        y = X[i]
        if jitter > 0:
            y = y + jitter * step * rng.standard_normal(X.shape[1])
        X[i] = _nearest_within_reach(s, y)
    return X


def shortest_curve(
    s: ProxSetSpec, a, b, cfg: ShortestCurveConfig | None = None
) -> tuple[SampledCurve, Certificate]:
    """Approximate the shortest curve in A from a to b and certify it."""
    from .verify import tangent_lipschitz_check

    cfg = ShortestCurveConfig() if cfg is None else cfg
    a = as_point(a, dim=s.dim)
    b = as_point(b, dim=s.dim)
    R = s.R
    d = float(np.linalg.norm(a - b))
    if d == 0.0:
        raise DegenerateEndpoints("a and b coincide")
    if d >= 2 * R:
        raise PointsTooFar(f"|a-b| = {d} >= 2R = {2 * R}")
    _check_in_set(s, a, b)
    arc_bound = r_arclength(a, b, R)

    try:
        level = bisection_levels(s, a, b, 1)[-1]
    except RootNotBracketed as exc:
        raise NotReachable(str(exc)) from exc
    for _ in range(cfg.bisection_depth - 1):
        level = _bisect_once(s, level)
    bis = SampledCurve(Partition.uniform(2**cfg.bisection_depth), level.vertices)
    bis_len = bis.length
    logger.debug("slice-bisection length %.12g (bound %.12g)", bis_len, arc_bound)

    n = cfg.partition_size
    T = Partition.uniform(n)
    rng = np.random.default_rng(cfg.seed)
    stop = cfg.tol_length**2 / n

    def descend(X0):
        tr = DescentTrace()
        X = energy_descent(s, T, X0, cfg.energy_sweeps, tol=stop, trace=tr)
        return X, tr

    X, trace = descend(_initial_polyline(s, bis, n, cfg.init_jitter, rng))
    rounds = []
    for _ in range(cfg.averaging_rounds):
        Y, _ = descend(_initial_polyline(s, bis, n, max(cfg.init_jitter, 0.05), rng))
        lam = cfg.lam if cfg.lam is not None else default_lambda(R, bis_len)
        avg = average_and_project(s, T, X, Y, lam)
        rounds.append({"lam": lam, "gap": avg.gap, "delta_energy": avg.delta_energy})
        Z, _ = descend(avg.Z)
        X = min((X, Y, Z), key=lambda P: discrete_energy(T, P))
    X = repair_outside_spindle(s, T, X)
    curve = SampledCurve(T, X)
    if curve.length > arc_bound + cfg.tol_length:
        logger.warning("descent output exceeds the bound; falling back to slice-bisection")
        curve = bis

    length = curve.length
    sp = Spindle(a, b, R)
    E = discrete_energy(curve.partition, curve.points)
    kT = energy_bound_kT(curve.partition)
    slack = cfg.sandwich_slack
    cert = Certificate(
        length=length,
        arc_bound=arc_bound,
        bound_satisfied=length <= arc_bound + cfg.tol_length,
        spindle_contained=all(spindle_contains(sp, x, 1e-7 * R) for x in curve.points),
        tangent_lipschitz_ok=tangent_lipschitz_check(curve, R).passed,
        energy_value=E,
        k_T=kT,
        energy_sandwich_ok=(length**2 + slack >= E >= length**2 / kT**2 - slack),
        diagnostics={
            "bisection_length": bis_len,
            "sweeps": trace.sweeps,
            "descent_converged": trace.converged,
            "averaging": rounds,
            "partition_size": curve.partition.n,
            "seed": cfg.seed,
        },
    )
    return curve, cert
