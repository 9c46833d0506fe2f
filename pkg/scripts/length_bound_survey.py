"""Length of computed shortest curves against the R-arclength bound on random pairs."""
import argparse
import time

import numpy as np

from proxgeo.curves import r_arclength
from proxgeo.sets import AffineFlat, BallComplement, ImplicitLevelSet, ParallelPlanes, Sphere, ellipsoid, torus
from proxgeo.shortest_path import ShortestCurveConfig, shortest_curve

SETS = {
    "sphere": lambda: Sphere([0, 0, 0], 1.0, 1.0),
    "flat": lambda: AffineFlat([0, 0, 0], [[1.0, 0, 0], [0, 1.0, 0]], 1.0),
    "planes": lambda: ParallelPlanes([0, 0, 1.0], (0.0, 2.0), 1.0),
    "ball_complement": lambda: BallComplement([0, 0, 0], 1.0, 1.0),
    "ellipsoid": lambda: ImplicitLevelSet(ellipsoid([1.5, 1.0, 0.8]), 0.4),
    "torus": lambda: ImplicitLevelSet(torus(2.0, 0.5), 0.5),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--pairs", type=int, default=50)
    # implicit sets cost a few seconds per pair; request them explicitly
    p.add_argument("--sets", nargs="*", default=["sphere", "flat", "planes", "ball_complement"])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    cfg = ShortestCurveConfig(bisection_depth=4, partition_size=16, energy_sweeps=300, init_jitter=0.0)
    print(f"{'set':16s} {'pairs':>5s} {'max excess':>12s} {'mean ratio':>11s} {'seconds':>8s}")
    for name in args.sets:
        s = SETS[name]()
        ratios, excess, t0, done = [], -np.inf, time.perf_counter(), 0
        while done < args.pairs:
            a, b = s.sample(rng, 2)
            if name == "planes":
                b = b - ((b - a) @ s.normal_vec) * s.normal_vec
            if not 1e-3 < np.linalg.norm(a - b) < 1.9 * s.R:
                continue
            curve, _ = shortest_curve(s, a, b, cfg)
            bound = r_arclength(a, b, s.R)
            excess = max(excess, curve.length - bound)
            ratios.append(curve.length / bound)
            done += 1
        print(f"{name:16s} {done:5d} {excess:12.3e} {np.mean(ratios):11.6f} {time.perf_counter() - t0:8.2f}")


if __name__ == "__main__":
    main()
