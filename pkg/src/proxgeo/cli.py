"""Command-line entry point: ``proxgeo shortest | validate | export-svg``.

Exit codes: 0 success, 1 solver or check failure, 2 unreachable endpoints or
failed precondition, 64 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .curves import SampledCurve, curve_from_csv, curve_to_csv
from .errors import (
    AmbiguousProjection,
    BadIndices,
    ConfigInvalid,
    DegenerateEndpoints,
    DomainError,
    EndpointsNotInSet,
    InvalidSet,
    NotReachable,
    PointsTooFar,
    ProxGeoError,
    RootNotBracketed,
    SizeMismatch,
    UnsupportedVariant,
)
from .euclid import as_point
from .sets import (
    ProxSetSpec,
    check_weak_convexity_support,
    project,
    set_distance,
    set_from_json,
    verify_prox_smoothness_sampled,
)
from .shortest_path import ShortestCurveConfig, shortest_curve
from .spindle import Spindle, spindle_contains
from .verify import chord_bound_check, projection_lipschitz_check

EXIT_OK, EXIT_FAIL, EXIT_UNREACHABLE, EXIT_CONFIG = 0, 1, 2, 64

UNREACHABLE_REASONS = {
    PointsTooFar: "points_too_far",
    NotReachable: "not_reachable",
    RootNotBracketed: "not_reachable",
    DegenerateEndpoints: "degenerate_endpoints",
    EndpointsNotInSet: "endpoints_not_in_set",
}

log = logging.getLogger("proxgeo")


@dataclass
class RunConfig:
    set_spec: ProxSetSpec
    a: np.ndarray | None
    b: np.ndarray | None
    cfg: ShortestCurveConfig
    seed: int
    checks: list[str]
    samples: int


def _seed_override(seed: int) -> int:
    env = os.environ.get("PROXGEO_SEED")
    if env is None or env == "":
        return seed
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigInvalid(f"PROXGEO_SEED must be an integer, got {env!r}") from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict) or "set" not in raw:
        raise ConfigInvalid("config must be a JSON object with a 'set' entry")
    try:
        s = set_from_json(raw["set"])
        a = as_point(raw["a"], dim=s.dim) if "a" in raw else None
        b = as_point(raw["b"], dim=s.dim) if "b" in raw else None
        seed = _seed_override(int(raw.get("seed", 0)))
        opts = dict(raw.get("config", {}))
        known = {f.name for f in fields(ShortestCurveConfig)}
        unknown = set(opts) - known
        if unknown:
            raise ConfigInvalid(f"unknown solver options: {sorted(unknown)}")
        opts["seed"] = seed
        cfg = ShortestCurveConfig(**opts)
        checks = list(raw.get("checks", list(CHECKS)))
        bad = [c for c in checks if c not in CHECKS]
        if bad:
            raise ConfigInvalid(f"unknown checks: {bad}")
        samples = int(raw.get("samples", 50))
    except ConfigInvalid:
        raise
    except (InvalidSet, UnsupportedVariant, SizeMismatch, DomainError, TypeError, ValueError) as exc:
        raise ConfigInvalid(str(exc)) from exc
    if (a is None) != (b is None):
        raise ConfigInvalid("give both endpoints 'a' and 'b' or neither")
    return RunConfig(s, a, b, cfg, seed, checks, samples)


def _dump(obj) -> str:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        raise TypeError(type(o).__name__)

    return json.dumps(obj, indent=2, default=default)


def _unreachable(exc: Exception) -> dict:
    reason = next(r for cls, r in UNREACHABLE_REASONS.items() if isinstance(exc, cls))
    return {"status": "unreachable", "reason": reason, "detail": str(exc)}


# commands


def cmd_shortest(config: str, out_curve: str | None, out_cert: str | None) -> int:
    rc = load_config(config)
    if rc.a is None:
        raise ConfigInvalid("'shortest' needs endpoints 'a' and 'b'")
    try:
        curve, cert = shortest_curve(rc.set_spec, rc.a, rc.b, rc.cfg)
    except tuple(UNREACHABLE_REASONS) as exc:
        out = _unreachable(exc)
        print(_dump(out))
        if out_cert:
            Path(out_cert).write_text(_dump(out))
        return EXIT_UNREACHABLE
    if out_curve:
        Path(out_curve).write_text(curve_to_csv(curve))
    doc = {"status": "ok" if cert.all_ok else "failed", **cert.to_json()}
    if out_cert:
        Path(out_cert).write_text(_dump(doc))
    print(_dump({k: doc[k] for k in ("status", "length", "arc_bound", "all_ok")}))
    return EXIT_OK if cert.all_ok else EXIT_FAIL


def _pairs(s: ProxSetSpec, rng, count: int, max_chord: float):
    pts = s.sample(rng, 4 * count)
    out = []
    for i in range(0, len(pts) - 1, 2):
        if 0 < np.linalg.norm(pts[i] - pts[i + 1]) < max_chord:
            out.append((pts[i], pts[i + 1]))
        if len(out) == count:
            break
    return out


def _check_support(rc: RunConfig, rng) -> dict:
    s = rc.set_spec
    worst, witness, tested = math.inf, None, 0
    for x in s.sample_near(rng, rc.samples, 0.5 * s.R):
        try:
            res = check_weak_convexity_support(s, x)
        except (DomainError, AmbiguousProjection):
            continue
        tested += 1
        if res.margin < worst:
            worst = res.margin
        if not res.passed and witness is None:
            witness = {"x": x, "projection": res.projection, "support_center": res.support_center, "margin": res.margin}
    return {"passed": witness is None, "tested": tested, "worst_margin": worst, "witness": witness}


def _check_prox_smoothness(rc: RunConfig, rng) -> dict:
    s = rc.set_spec
    rep = verify_prox_smoothness_sampled(s, _pairs(s, rng, rc.samples, 2 * s.R))
    fail = rep.failures[0] if rep.failures else None
    return {
        "passed": rep.passed,
        "found": rep.found,
        "skipped": rep.skipped,
        "witness": None if fail is None else {"a": fail.a, "b": fail.b, "status": fail.status, "detail": fail.detail},
    }


def _check_projection_lipschitz(rc: RunConfig, rng) -> dict:
    s = rc.set_spec
    xs = s.sample_near(rng, 2 * rc.samples, 0.75 * s.R)
    witness, worst = None, math.inf
    for x1, x2 in zip(xs[::2], xs[1::2]):
        try:
            rep = projection_lipschitz_check(s, x1, x2)
        except ProxGeoError:
            continue
        worst = min(worst, rep.margin)
        if not rep.passed and witness is None:
            witness = rep.witness
    return {"passed": witness is None, "worst_margin": worst, "witness": witness}


def _check_spindle_depth(rc: RunConfig, rng) -> dict:
    s = rc.set_spec
    R = s.R
    witness, worst = None, math.inf
    for a, b in _pairs(s, rng, rc.samples, 2 * R):
        lam = rng.uniform()
        x = lam * a + (1 - lam) * b
        d2 = float(np.sum((a - b) ** 2))
        bound = R - math.sqrt(max(R * R - lam * (1 - lam) * d2, 0.0))
        try:
            dist = set_distance(s, x)
            p = project(s, x).point
        except ProxGeoError as exc:
            witness = witness or {"a": a, "b": b, "lam": lam, "error": str(exc)}
            continue
        margin = bound + 1e-9 - dist
        worst = min(worst, margin)
        inside = spindle_contains(Spindle(a, b, R), p, 1e-7 * R)
        if (margin < 0 or not inside) and witness is None:
            witness = {"a": a, "b": b, "lam": lam, "distance": dist, "bound": bound}
    return {"passed": witness is None, "worst_margin": worst, "witness": witness}


def _check_shortest(rc: RunConfig, rng) -> dict:
    if rc.a is None:
        return {"passed": True, "skipped": "no endpoints configured"}
    try:
        curve, cert = shortest_curve(rc.set_spec, rc.a, rc.b, rc.cfg)
    except tuple(UNREACHABLE_REASONS) as exc:
        return {"passed": False, **_unreachable(exc)}
    out = {"passed": cert.all_ok, "certificate": cert.to_json()}
    if curve.length <= math.pi * rc.set_spec.R and cert.tangent_lipschitz_ok:
        cb = chord_bound_check(curve, rc.set_spec.R)
        out["chord_bound"] = cb.to_json()
        out["passed"] = out["passed"] and cb.passed
    return out


CHECKS = {
    "support": _check_support,
    "prox_smoothness": _check_prox_smoothness,
    "projection_lipschitz": _check_projection_lipschitz,
    "spindle_depth": _check_spindle_depth,
    "shortest": _check_shortest,
}


def cmd_validate(config: str, out: str | None = None) -> int:
    rc = load_config(config)
    rng = np.random.default_rng(rc.seed)
    report = {}
    for name in rc.checks:
        report[name] = CHECKS[name](rc, rng)
    ok = all(r["passed"] for r in report.values())
    text = _dump({"passed": ok, "checks": report})
    print(text)
    if out:
        Path(out).write_text(text)
    return EXIT_OK if ok else EXIT_FAIL


def _parse_plane(text: str) -> tuple[int, int]:
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise BadIndices(f"--plane expects two comma-separated indices, got {text!r}") from exc
    return i, j


def _lens_2d(a: np.ndarray, b: np.ndarray, R: float, k: int = 64) -> list[np.ndarray]:
    """Both main R-arcs of the planar spindle on the chord a-b."""
    sp = Spindle(a, b, R)
    if sp.degenerate:
        return []
    u = sp.axis
    w = np.array([-u[1], u[0]])
    theta = math.asin(min(sp.c / R, 1.0))
    phis = np.linspace(-theta, theta, k + 1)
    arcs = []
    for side in (w, -w):
        o = sp.m - sp.h * side
        arcs.append(o + R * (np.outer(np.cos(phis), side) + np.outer(np.sin(phis), u)))
    return arcs


def render_svg(curve: SampledCurve, plane: tuple[int, int], R: float | None = None, size: int = 512) -> str:
    i, j = plane
    dim = curve.dim
    if dim < 2 or i == j or not (0 <= i < dim and 0 <= j < dim):
        raise BadIndices(f"plane {plane} invalid for a curve in R^{dim}")
    P = curve.points[:, [i, j]]
    paths = [P]
    if R is not None:
        paths += _lens_2d(P[0], P[-1], R)
    allp = np.vstack(paths)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 0.05 * span
    scale = (size - 2) / (span + 2 * pad)

    def to_px(Q):
        X = (Q[:, 0] - lo[0] + pad) * scale + 1
        Y = size - ((Q[:, 1] - lo[1] + pad) * scale + 1)
        return " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(X, Y))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for arc in paths[1:]:
        lines.append(f'<polyline points="{to_px(arc)}" fill="none" stroke="#999" stroke-dasharray="4 3"/>')
    lines.append(f'<polyline points="{to_px(P)}" fill="none" stroke="#c0392b" stroke-width="2"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_export_svg(curve_path: str, plane: str, out: str, R: float | None = None) -> int:
    try:
        curve = curve_from_csv(Path(curve_path).read_text())
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigInvalid(f"cannot read curve {curve_path}: {exc}") from exc
    Path(out).write_text(render_svg(curve, _parse_plane(plane), R))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="proxgeo", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sh = sub.add_parser("shortest", help="compute and certify a shortest curve")
    sh.add_argument("--config", required=True)
    sh.add_argument("--out-curve")
    sh.add_argument("--out-cert")

    va = sub.add_parser("validate", help="run the sampled property checks for a set")
    va.add_argument("--config", required=True)
    va.add_argument("--out")

    sv = sub.add_parser("export-svg", help="draw a curve CSV in a coordinate plane")
    sv.add_argument("--curve", required=True)
    sv.add_argument("--plane", default="0,1")
    sv.add_argument("--out", required=True)
    sv.add_argument("--R", type=float, help="also draw the spindle lens of the endpoints")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "shortest":
            return cmd_shortest(args.config, args.out_curve, args.out_cert)
        if args.command == "validate":
            return cmd_validate(args.config, args.out)
        return cmd_export_svg(args.curve, args.plane, args.out, args.R)
    except (ConfigInvalid, BadIndices) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProxGeoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
