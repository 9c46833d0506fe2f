"""Mesh and length of slice-bisection levels on curved sets."""
import argparse

import numpy as np

from proxgeo.curves import r_arclength
from proxgeo.sets import ImplicitLevelSet, Sphere, ellipsoid, torus
from proxgeo.shortest_path import bisection_levels


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--depth", type=int, default=8)
    args = p.parse_args()

    cases = {
        "sphere": (Sphere([0, 0, 0], 1.0, 1.0), [1.0, 0, 0], [0, 0.6, 0.8]),
        "ellipsoid": (ImplicitLevelSet(ellipsoid([1.5, 1.0, 0.8]), 0.4), [1.5, 0, 0], [1.2, 0.4, 0.3]),
        "torus": (ImplicitLevelSet(torus(2.0, 0.5), 0.5), [2.5, 0, 0], [2.0, 0.3, 0.4]),
    }
    for name, (s, a, b) in cases.items():
        a = s.nearest(np.asarray(a, float)).point
        b = s.nearest(np.asarray(b, float)).point
        bound = r_arclength(a, b, s.R)
        print(f"{name}: |a-b| = {np.linalg.norm(a - b):.4f}, R-arclength bound {bound:.6f}")
        prev = None
        for i, pl in enumerate(bisection_levels(s, a, b, args.depth)):
            ratio = "" if prev is None else f"{pl.mesh / prev:.4f}"
            print(f"  level {i:2d}  mesh {pl.mesh:.6e}  ratio {ratio:>6s}  length {pl.chords.sum():.9f}")
            prev = pl.mesh


if __name__ == "__main__":
    main()
