"""Residual of the truncated Neumann inverse versus the number of terms."""

import argparse
import math

import numpy as np

from levyliouville import wiener_inversion as wi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--spacing", type=float, default=0.01)
    ap.add_argument("--K", type=float, nargs=2, default=[-1.0, 1.0])
    ap.add_argument("--max-terms", type=int, default=30)
    args = ap.parse_args()

    f = wi.GridFunction.sample(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi), -20, 20, args.spacing)
    print(f"{'N':>3} {'residual':>10} {'rho^(N+1)':>10} {'analytic':>10} {'grid':>10}")
    for N in range(0, args.max_terms + 1, 5):
        c = wi.neumann_invert(f, [tuple(args.K)], N).certificate
        print(f"{N:>3} {c.residual:>10.2e} {c.sharp_bound:>10.2e} {c.analytic_bound:>10.2e} {c.grid_bound:>10.2e}")
    print(f"r = {c.r}, rho = {c.rho:.4f}, ||f - g||_1 = {c.epsilon:.3e}")


if __name__ == "__main__":
    main()
