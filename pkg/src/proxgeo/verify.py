"""Independent checkers for the quantitative inequalities, plus a brute-force
geodesic oracle on epsilon-nets."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .curves import SampledCurve
from .errors import (
    DegenerateChord,
    GraphDisconnected,
    LipschitzViolated,
    PreconditionFailed,
    UnsupportedVariant,
)
from .euclid import Partition, as_point
from .sets import AffineFlat, BallComplement, ParallelPlanes, ProxSetSpec, Sphere, project


@dataclass
class CheckReport:
    name: str
    passed: bool
    lhs: float
    rhs: float
    margin: float
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _report(name, lhs, rhs, margin, tol, witness_fn, **details) -> CheckReport:
    passed = bool(margin >= -tol)
    return CheckReport(
        name, passed, float(lhs), float(rhs), float(margin),
        None if passed else witness_fn(), details,
    )


def discrete_wirtinger_check(g, T: Partition, L_g: float, tol: float = 1e-12) -> CheckReport:
    """(V_{2,T}(g)/pi)^2 >= sum |g(t_k)|^2 dt_k - n (L_g mesh T)^2 for loops g."""
    G = np.asarray(g, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    if G.shape[0] != T.knots.size:
        raise PreconditionFailed("one sample per knot required")
    scale = max(1.0, float(np.abs(G).max()))
    if np.linalg.norm(G[0]) > 1e-12 * scale or np.linalg.norm(G[-1]) > 1e-12 * scale:
        raise PreconditionFailed("g must vanish at both endpoints")
    dt = T.steps
    inc = np.linalg.norm(np.diff(G, axis=0), axis=1)
    slope = float((inc / dt).max())
    if slope > L_g * (1 + 1e-12):
        raise LipschitzViolated(f"samples need Lipschitz constant {slope} > {L_g}")
    lhs = float(np.sum(inc**2 / dt)) / math.pi**2
    sq = np.einsum("ij,ij->i", G[1:], G[1:])
    rhs = float(np.sum(sq * dt)) - T.n * (L_g * T.mesh) ** 2
    margin = lhs - rhs
    return _report(
        "discrete_wirtinger", lhs, rhs, margin, tol * max(1.0, abs(lhs), abs(rhs)),
        lambda: {"g": G.tolist(), "knots": T.knots.tolist(), "L_g": L_g},
    )


def quantitative_triangle_check(x, y, z, eps: float, tol: float = 1e-12) -> CheckReport:
    """|x-z| + |z-y| >= |x-y| + min(eps^2 / (2|x-y|), eps/2) when z is eps away from line xy."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    if not 0.0 < eps <= 1.0:
        raise PreconditionFailed("eps must lie in (0, 1]")
    e = y - x
    dxy = float(np.linalg.norm(e))
    if dxy == 0.0:
        raise PreconditionFailed("x and y must differ")
    w = z - x
    height = float(np.linalg.norm(w - (w @ e) / dxy**2 * e))
    if height < eps * (1 - 1e-12):
        raise PreconditionFailed(f"z is only {height} from line xy, need {eps}")
    lhs = float(np.linalg.norm(x - z) + np.linalg.norm(z - y))
    rhs = dxy + min(eps**2 / (2 * dxy), eps / 2)
    return _report(
        "quantitative_triangle", lhs, rhs, lhs - rhs, tol * max(1.0, lhs),
        lambda: {"x": x.tolist(), "y": y.tolist(), "z": z.tolist(), "eps": eps},
    )


def projection_lipschitz_check(s: ProxSetSpec, x1, x2, tol: float = 1e-9) -> CheckReport:
    """|p1 - p2| <= 2R / (2R - d1 - d2) |x1 - x2| for the projections p_i."""
    r1, r2 = project(s, x1), project(s, x2)
    x1, x2 = np.asarray(x1, float), np.asarray(x2, float)
    R = s.R
    lhs = float(np.linalg.norm(r1.point - r2.point))
    rhs = 2 * R / (2 * R - r1.distance - r2.distance) * float(np.linalg.norm(x1 - x2))
    return _report(
        "projection_lipschitz", lhs, rhs, rhs - lhs, tol,
        lambda: {"x1": x1.tolist(), "x2": x2.tolist(), "set": s.to_json()},
        d1=r1.distance, d2=r2.distance,
    )


def _tangents(c: SampledCurve):
    inc = np.diff(c.points, axis=0)
    chords = np.linalg.norm(inc, axis=1)
    if np.any(chords == 0.0):
        raise DegenerateChord("curve has a repeated vertex; tangents undefined")
    return inc / chords[:, None], chords


def discretization_slack(c: SampledCurve, R: float) -> float:
    """C_disc * mesh with C_disc = 2 L mesh / R."""
    mesh = c.partition.mesh
    return 2.0 * c.length / R * mesh * mesh


def tangent_lipschitz_check(c: SampledCurve, R: float) -> CheckReport:
    """Discrete unit tangents vary by at most (arc between chord midpoints)/R plus slack."""
    if c.points.shape[0] < 3:
        raise PreconditionFailed("need at least three knots")
    tau, chords = _tangents(c)
    dtau = np.linalg.norm(np.diff(tau, axis=0), axis=1)
    ds = (chords[:-1] + chords[1:]) / 2
    excess = dtau - ds / R
    slack = discretization_slack(c, R)
    worst = float(excess.max())
    k = int(excess.argmax())
    return _report(
        "tangent_lipschitz", worst, slack, slack - worst, 0.0,
        lambda: {"index": k, "points": c.points[k : k + 3].tolist(), "R": R},
        max_ratio=float((dtau / ds).max()), slack=slack,
        C_disc=2.0 * c.length / R * c.partition.mesh,
    )


def chord_bound_check(c: SampledCurve, R: float) -> CheckReport:
    """|c(0) - c(tau)| >= 2R sin(tau / 2R) at every knot, tau the arc length."""
    L = c.length
    if L > math.pi * R * (1 + 1e-9):
        raise PreconditionFailed(f"length {L} exceeds pi R")
    tl = tangent_lipschitz_check(c, R)
    if not tl.passed:
        raise PreconditionFailed("tangent is not 1/R-Lipschitz")
    _, chords = _tangents(c)
    tau = np.concatenate([[0.0], np.cumsum(chords)])
    lhs = np.linalg.norm(c.points - c.points[0], axis=1)
    rhs = 2 * R * np.sin(np.minimum(tau, math.pi * R) / (2 * R))
    slack = discretization_slack(c, R)
    margins = lhs - rhs + slack
    # knot 0 is trivially tight
    k = 1 + int(margins[1:].argmin())
    return _report(
        "chord_bound", lhs[k], rhs[k] - slack, float(margins[k]), 0.0,
        lambda: {"index": k, "tau": float(tau[k]), "R": R},
        slack=slack, end_margin=float(lhs[-1] - rhs[-1]),
    )


# epsilon-net oracle


def _hex_lattice(lo: np.ndarray, hi: np.ndarray, h: float) -> np.ndarray:
    ys = np.arange(lo[1], hi[1] + h, h * math.sqrt(3) / 2)
    xs = np.arange(lo[0], hi[0] + h, h)
    pts = [np.column_stack([xs + (0.5 * h if j % 2 else 0.0), np.full(xs.size, y)])
           for j, y in enumerate(ys)]
    return np.vstack(pts)


def _grid(lo: np.ndarray, hi: np.ndarray, h: float) -> np.ndarray:
    if lo.size == 1:
        return np.arange(lo[0], hi[0] + h, h)[:, None]
    if lo.size == 2:
        return _hex_lattice(lo, hi, h)
    axes = [np.arange(l, u + h, h) for l, u in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)


def _sphere_points(center: np.ndarray, r: float, h: float) -> np.ndarray:
    if center.size == 2:
        k = max(8, math.ceil(2 * math.pi * r / h))
        ang = 2 * math.pi * np.arange(k) / k
        return center + r * np.column_stack([np.cos(ang), np.sin(ang)])
    if center.size == 3:
        k = max(16, math.ceil(4 * math.pi * r * r / (h * h * math.sqrt(3) / 2)))
        i = np.arange(k) + 0.5
        z = 1 - 2 * i / k
        phi = math.pi * (1 + math.sqrt(5)) * i
        rho = np.sqrt(1 - z * z)
        return center + r * np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    raise UnsupportedVariant("epsilon-net oracle supports dimensions 2 and 3")


def _tangent_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the complement of a unit normal."""
    q, _ = np.linalg.qr(np.column_stack([normal, np.eye(normal.size)]))
    return q[:, 1:].T


def _flat_net(base, basis, pts, h):
    coords = (pts - base) @ basis.T
    span = float(np.linalg.norm(coords[0] - coords[1]))
    margin = 0.25 * span + 3 * h
    lo, hi = coords.min(axis=0) - margin, coords.max(axis=0) + margin
    if basis.shape[0] > 2:
        raise UnsupportedVariant("flat oracle supports flats of dimension <= 2")
    return base + _grid(lo, hi, h) @ basis


def _build_net(s: ProxSetSpec, a, b, h):
    """Net points and an edge filter (i, j arrays over the combined point list)."""
    if s.dim not in (2, 3):
        raise UnsupportedVariant("epsilon-net oracle supports dimensions 2 and 3")
    ends = np.vstack([a, b])
    if isinstance(s, Sphere):
        return _sphere_points(s.center, s.radius, h), None
    if isinstance(s, AffineFlat):
        return _flat_net(s.base, s.basis, ends, h), None
    if isinstance(s, ParallelPlanes):
        basis = _tangent_basis(s.normal_vec)
        nets = [_flat_net(off * s.normal_vec, basis, ends - (ends @ s.normal_vec)[:, None] * s.normal_vec, h)
                for off in s.offsets]
        pts = np.vstack(nets)

        def same_plane(P, i, j):
            side = np.array([s.plane_index(p) for p in P])
            return side[i] == side[j]

        return pts, same_plane
    if isinstance(s, BallComplement):
        r, c = s.radius, s.center
        lo = np.minimum(ends.min(axis=0), c - r) - 3 * h
        hi = np.maximum(ends.max(axis=0), c + r) + 3 * h
        grid = _grid(lo, hi, h)
        grid = grid[np.linalg.norm(grid - c, axis=1) > r + 0.25 * h]
        pts = np.vstack([grid, _sphere_points(c, r, h)])
        allowed = r - (3 * h) ** 2 / (8 * r) - 1e-12 * r

        def outside_ball(P, i, j):
            p, q = P[i], P[j]
            e = q - p
            ee = np.einsum("ij,ij->i", e, e)
            u = np.clip(np.einsum("ij,ij->i", c - p, e) / np.where(ee > 0, ee, 1), 0, 1)
            closest = p + u[:, None] * e
            return np.linalg.norm(closest - c, axis=1) >= allowed

        return pts, outside_ball
    raise UnsupportedVariant(f"no epsilon-net for variant '{s.variant}'")


def epsilon_net_geodesic_oracle(s: ProxSetSpec, a, b, net_spacing: float) -> float:
    """Graph shortest-path length between a and b over an epsilon-net of A."""
    a = as_point(a, dim=s.dim)
    b = as_point(b, dim=s.dim)
    h = float(net_spacing)
    if not h > 0:
        raise PreconditionFailed("net_spacing must be positive")
    for p in (a, b):
        if not s.contains(p, 1e-7 * s.R):
            raise PreconditionFailed(f"{p} is not in the set")
    net, keep = _build_net(s, a, b, h)
    P = np.vstack([a, b, net])
    pairs = cKDTree(P).query_pairs(3 * h, output_type="ndarray")
    i, j = pairs[:, 0], pairs[:, 1]
    if keep is not None:
        mask = keep(P, i, j)
        i, j = i[mask], j[mask]
    w = np.linalg.norm(P[i] - P[j], axis=1)
    G = coo_matrix((w, (i, j)), shape=(len(P), len(P))).tocsr()
    dist = dijkstra(G, directed=False, indices=0)
    if not np.isfinite(dist[1]):
        raise GraphDisconnected("a and b lie in different components of the net")
    return float(dist[1])
