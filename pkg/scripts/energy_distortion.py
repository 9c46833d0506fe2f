"""Empirical energy/length distortion of discrete minimizers versus the proven k_T factor."""
import argparse
import math

import numpy as np

from proxgeo.sets import Sphere
from proxgeo.shortest_path import ShortestCurveConfig, discrete_energy, energy_bound_kT, shortest_curve


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="*", default=[4, 8, 16, 32, 64, 128])
    args = p.parse_args()

    s = Sphere([0, 0, 0], 1.0, 1.0)
    a, b = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    rho = math.pi / 2
    print(f"{'n':>5s} {'rho^2/E':>12s} {'kT^2':>12s} {'(1 - rho^2/E)/mesh^2':>22s}")
    for n in args.sizes:
        curve, _ = shortest_curve(s, a, b, ShortestCurveConfig(partition_size=n))
        E = discrete_energy(curve.partition, curve.points)
        mesh = curve.partition.mesh
        kT = energy_bound_kT(curve.partition)
        print(f"{n:5d} {rho**2 / E:12.9f} {kT**2:12.9f} {(1 - rho**2 / E) / mesh**2:22.6f}")


if __name__ == "__main__":
    main()
