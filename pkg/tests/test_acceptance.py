"""End-to-end acceptance criteria, one test per criterion."""
import json
import math
import time

import numpy as np

from proxgeo.cli import main
from proxgeo.curves import SampledCurve, curve_dist, r_arclength, standard_parametrization
from proxgeo.errors import NotReachable, RootNotBracketed
from proxgeo.euclid import Partition
from proxgeo.folding import FoldFrame, fold_many
from proxgeo.sets import (
    AffineFlat,
    BallComplement,
    ImplicitLevelSet,
    ParallelPlanes,
    Sphere,
    ellipsoid,
    project,
    set_distance,
    torus,
)
from proxgeo.shortest_path import (
    ShortestCurveConfig,
    average_and_project,
    bisection_levels,
    default_lambda,
    discrete_energy,
    energy_bound_kT,
    shortest_curve,
    slice_bisection,
    slice_project,
)
from proxgeo.spindle import Spindle, random_perp, spindle_contains
from proxgeo.verify import discrete_wirtinger_check, projection_lipschitz_check, tangent_lipschitz_check

A = np.array([1.0, 0.0, 0.0])
B = np.array([0.0, 1.0, 0.0])
SPHERE = Sphere([0.0, 0.0, 0.0], 1.0, 1.0)


def test_01_sphere_geodesic(acceptance):
    t0 = time.perf_counter()
    curve, cert = shortest_curve(SPHERE, A, B)
    elapsed = time.perf_counter() - t0
    err = abs(curve.length - math.pi / 2)
    bound = 2 * math.asin(math.sqrt(2) / 2)
    ok = err <= 1e-3 and curve.length <= bound + 1e-3 and elapsed < 2.0 and cert.bound_satisfied
    acceptance(1, "sphere geodesic", ok, f"|L - pi/2| = {err:.2e}, runtime {elapsed:.2f}s")


def test_02_mesh_decay(acceptance):
    cases = [
        (SPHERE, A, np.array([0.0, 0.6, 0.8])),
        (ImplicitLevelSet(ellipsoid([1.5, 1.0, 0.8]), 0.4), np.array([1.5, 0.0, 0.0]), None),
    ]
    worst = 0.0
    for s, a, b in cases:
        if b is None:
            b = s.nearest(np.array([1.2, 0.4, 0.3])).point
        meshes = [pl.mesh for pl in bisection_levels(s, a, b, 8)]
        worst = max(worst, max(y / x for x, y in zip(meshes, meshes[1:])))
    ok = worst <= 1 / math.sqrt(2) + 1e-9
    acceptance(2, "mesh decay", ok, f"max ratio {worst:.6f} (limit {1 / math.sqrt(2):.6f})")


def _pairs(s, rng, count, same_plane=False):
    out = []
    while len(out) < count:
        a, b = s.sample(rng, 2)
        if same_plane:
            b = b - ((b - a) @ s.normal_vec) * s.normal_vec
        if 1e-3 < np.linalg.norm(a - b) < 2 * s.R * 0.999:
            out.append((a, b))
    return out


def test_03_length_bound(acceptance):
    sets = {
        "sphere": SPHERE,
        "flat": AffineFlat([0.0, 0.0, 0.5], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 1.0),
        "parallel_planes": ParallelPlanes([0.0, 0.0, 1.0], (0.0, 2.0), 1.0),
        "ball_complement": BallComplement([0.0, 0.0, 0.0], 1.0, 1.0),
    }
    cfg = ShortestCurveConfig(bisection_depth=4, partition_size=16, energy_sweeps=200, init_jitter=0.0)
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst, count = -np.inf, 0
    for name, s in sets.items():
        for a, b in _pairs(s, rng, 200, same_plane=name == "parallel_planes"):
            curve, _ = shortest_curve(s, a, b, cfg)
            worst = max(worst, curve.length - r_arclength(a, b, s.R))
            count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 60
    acceptance(3, "length bound", ok, f"{count} pairs, max excess {worst:.2e}, runtime {elapsed:.1f}s")


def test_04_energy_sandwich(acceptance):
    curve, cert = shortest_curve(SPHERE, A, B, ShortestCurveConfig(partition_size=64))
    T = Partition.uniform(64)
    rho = cert.length
    E = discrete_energy(T, curve.points)
    kT = energy_bound_kT(T)
    upper, lower = rho**2 + 1e-6 - E, E - (rho**2 / kT**2 - 1e-6)
    ok = upper >= 0 and lower >= 0
    acceptance(4, "energy sandwich", ok, f"rho^2 - E = {rho**2 - E:.2e}, E - rho^2/kT^2 = {E - rho**2 / kT**2:.2e}")


def test_05_discrete_wirtinger(acceptance):
    rng = np.random.default_rng(5)
    failures = 0
    for _ in range(1000):
        n = int(rng.integers(2, 60))
        knots = np.sort(np.concatenate([[0.0, 1.0], rng.uniform(size=n - 1)]))
        if np.min(np.diff(knots)) < 1e-9:
            knots = np.linspace(0, 1, n + 1)
        T = Partition(knots)
        g = rng.standard_normal((n + 1, int(rng.integers(1, 4))))
        g[0] = g[-1] = 0.0
        L = float((np.linalg.norm(np.diff(g, axis=0), axis=1) / T.steps).max())
        failures += not discrete_wirtinger_check(g, T, L).passed
    acceptance(5, "discrete Wirtinger", failures == 0, f"{failures} failures in 1000 loops")


def test_06_spindle_depth(acceptance):
    rng = np.random.default_rng(6)
    fixtures = [
        Sphere([0.0, 0.0, 0.0], 1.0, 1.0),
        Sphere([1.0, -2.0, 0.5], 2.5, 2.0),
        Sphere([0.0, 0.0], 0.7, 0.7),
        Sphere([0.0, 0.0, 0.0, 0.0], 1.3, 1.3),
    ]
    worst, bad = np.inf, 0
    for k in range(500):
        s = fixtures[k % len(fixtures)]
        (a, b), = _pairs(s, rng, 1)
        lam = rng.uniform()
        x = lam * a + (1 - lam) * b
        bound = s.R - math.sqrt(s.R**2 - lam * (1 - lam) * float(np.sum((a - b) ** 2)))
        margin = bound + 1e-9 - set_distance(s, x)
        worst = min(worst, margin)
        inside = spindle_contains(Spindle(a, b, s.R), project(s, x).point)
        bad += margin < 0 or not inside
    acceptance(6, "spindle depth", bad == 0, f"{bad} violations, min margin {worst:.2e}")


def test_07_projection_lipschitz(acceptance):
    rng = np.random.default_rng(7)
    variants = {
        "sphere": SPHERE,
        "flat": AffineFlat([0.0, 0.0, 0.0], [[1.0, 0.0, 0.0]], 1.0),
        "parallel_planes": ParallelPlanes([0.0, 0.0, 1.0], (0.0, 2.0), 1.0),
        "ball_complement": BallComplement([0.0, 0.0, 0.0], 1.0, 1.0),
        "ellipsoid": ImplicitLevelSet(ellipsoid([1.5, 1.0, 0.8]), 0.4),
        "torus": ImplicitLevelSet(torus(2.0, 0.5), 0.5),
    }
    failures, tested = [], 0
    for name, s in variants.items():
        done = 0
        while done < 500:
            x1, x2 = s.sample_near(rng, 2, 0.75 * s.R)
            if set_distance(s, x1) + set_distance(s, x2) > 1.5 * s.R:
                continue
            done += 1
            if not projection_lipschitz_check(s, x1, x2, tol=1e-9).passed:
                failures.append(name)
        tested += done
    acceptance(7, "projection Lipschitz", not failures, f"{tested} pairs, failures {sorted(set(failures))}")


def test_08_unreachability(acceptance, tmp_path):
    planes = {"variant": "parallel_planes", "normal": [0, 0, 1], "offsets": [0, 2.0], "R": 1.0}
    cfg = tmp_path / "gap.json"
    cfg.write_text(json.dumps({"set": planes, "a": [0, 0, 0], "b": [0, 0, 2.0]}))
    cert = tmp_path / "gap_cert.json"
    code = main(["shortest", "--config", str(cfg), "--out-cert", str(cert)])
    reason = json.loads(cert.read_text()).get("reason")

    near = {"variant": "parallel_planes", "normal": [0, 0, 1], "offsets": [0, 1.9], "R": 1.0, "unchecked_radius": True}
    b = [math.sqrt(1.95**2 - 1.9**2), 0.0, 1.9]
    s = ParallelPlanes([0.0, 0.0, 1.0], (0.0, 1.9), 1.0, unchecked_radius=True)
    try:
        slice_project(s, [0.0, 0.0, 0.0], b, 0.5)
        raised = False
    except (RootNotBracketed, NotReachable):
        raised = True
    cfg2 = tmp_path / "near.json"
    cfg2.write_text(json.dumps({"set": near, "a": [0, 0, 0], "b": b}))
    code2 = main(["shortest", "--config", str(cfg2)])
    ok = code == 2 and reason == "points_too_far" and raised and code2 == 2
    acceptance(8, "unreachability", ok, f"exit {code} ({reason}); 1.95R across gap: raised={raised}, exit {code2}")


def test_09_tangent_lipschitz(acceptance):
    curve, _ = shortest_curve(SPHERE, A, B)
    rep = tangent_lipschitz_check(curve, 1.0)
    th = np.linspace(0.0, 2.0, 401)
    control = SampledCurve.uniform(0.5 * np.column_stack([np.cos(th), np.sin(th)]))
    neg = tangent_lipschitz_check(control, 1.0)
    ok = rep.passed and control.partition.mesh <= 1e-2 and not neg.passed
    acceptance(
        9, "tangent Lipschitz", ok,
        f"solution margin {rep.margin:.2e}; R/2 circle max ratio {neg.details['max_ratio']:.3f} -> "
        f"{'fails' if not neg.passed else 'passes'}",
    )


def test_10_uniqueness_proxy(acceptance):
    c1, _ = shortest_curve(SPHERE, A, B, ShortestCurveConfig(seed=1))
    c2, _ = shortest_curve(SPHERE, A, B, ShortestCurveConfig(seed=2))
    d = curve_dist(c1, c2)
    acceptance(10, "uniqueness proxy", d <= 1e-3, f"curve_dist = {d:.2e}")


def test_11_averaging_inequality(acceptance):
    rng = np.random.default_rng(11)
    n = 32
    T = Partition.uniform(n)
    worst, positive = np.inf, 0
    for _ in range(50):
        (a, b), = _pairs(SPHERE, rng, 1)
        if np.linalg.norm(a - b) > 1.6:
            b = SPHERE.nearest(a + 0.5 * (b - a)).point
        sp = Spindle(a, b, 1.0)
        base = standard_parametrization(slice_bisection(SPHERE, a, b, 5), n).points
        polys = []
        for _ in range(2):
            bump = np.sin(np.pi * T.knots * rng.integers(1, 4))
            P = base + rng.uniform(0.01, 0.2) * np.outer(bump, random_perp(sp, rng))
            P = np.array([SPHERE.nearest(p).point for p in P])
            P[0], P[-1] = a, b
            polys.append(P)
        lam = default_lambda(1.0, r_arclength(a, b, 1.0)) if rng.uniform() < 0.5 else rng.uniform(1e-3, 1 / 16)
        res = average_and_project(SPHERE, T, polys[0], polys[1], lam)
        worst = min(worst, res.margin)
        positive += res.gap > 0
    ok = worst >= -1e-9
    acceptance(11, "averaging inequality", ok, f"min margin {worst:.2e} over 50 instances")


def test_12_folding(acceptance):
    rng = np.random.default_rng(12)
    worst = -np.inf
    for _ in range(1000):
        dim = int(rng.integers(2, 6))
        fr = FoldFrame(rng.standard_normal(dim), rng.standard_normal(dim))
        x, y = rng.standard_normal((2, dim)) * rng.uniform(0.1, 10)
        F = fold_many(fr, [x, y])
        worst = max(worst, np.linalg.norm(F[0] - F[1]) - np.linalg.norm(x - y))
    acceptance(12, "folding non-expansive", worst <= 1e-12, f"max(folded - ambient) = {worst:.2e}")
