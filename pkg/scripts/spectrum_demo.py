"""Tapered spectral mass outside a small frequency band: lattice sequence versus polynomials."""

import argparse

import numpy as np

from levyliouville import counterexample_discrete as cd
from levyliouville import wiener_inversion as wi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=float, default=300.0)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--csv", default=None, help="write the rendered sequence as a grid CSV")
    args = ap.parse_args()

    R, w = args.radius, wi.taper(args.radius)
    h = wi.render_atoms(cd.build_discrete(12).atoms, -R, R)
    rows = [("lattice sequence", h)]
    for deg in range(5):
        rows.append((f"x^{deg}", wi.GridFunction.sample(lambda x, d=deg: x**d, -R, R, 0.01)))
    print(f"{'input':<18} {'outside / total':>16}")
    for name, g in rows:
        i, o = wi.spectrum_mass(g, w, args.delta)
        print(f"{name:<18} {o / (i + o):>16.3e}")
    print(f"leakage threshold {wi.LEAKAGE_THRESHOLD:.0e}")
    if args.csv:
        wi.write_grid_csv(h, args.csv)


if __name__ == "__main__":
    main()
