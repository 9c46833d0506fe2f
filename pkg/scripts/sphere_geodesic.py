"""Shortest curve between two points of a sphere, with certificate and SVG."""
import argparse
import json
import math
from pathlib import Path

import numpy as np

from proxgeo.cli import render_svg
from proxgeo.curves import curve_to_csv
from proxgeo.sets import Sphere
from proxgeo.shortest_path import ShortestCurveConfig, shortest_curve


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--angle", type=float, default=90.0, help="angle between endpoints, degrees")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out/sphere")
    args = p.parse_args()

    r = args.radius
    th = math.radians(args.angle)
    s = Sphere([0.0, 0.0, 0.0], r, r)
    a = np.array([r, 0.0, 0.0])
    b = r * np.array([math.cos(th), math.sin(th), 0.0])
    curve, cert = shortest_curve(s, a, b, ShortestCurveConfig(partition_size=args.n, seed=args.seed))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "curve.csv").write_text(curve_to_csv(curve))
    (out / "cert.json").write_text(json.dumps(cert.to_json(), indent=2))
    (out / "curve.svg").write_text(render_svg(curve, (0, 1), r))
    print(f"length      {cert.length:.12f}")
    print(f"great arc   {r * th:.12f}")
    print(f"error       {abs(cert.length - r * th):.3e}")
    print(f"certified   {cert.all_ok}")


if __name__ == "__main__":
    main()
