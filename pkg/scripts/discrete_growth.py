"""Build the lattice sequence and tabulate its level coefficients and growth ratios."""

import argparse

from levyliouville import counterexample_discrete as cd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", type=int, default=12)
    ap.add_argument("--eps", type=float, default=0.25)
    ap.add_argument("--csv", default="growth.csv")
    args = ap.parse_args()

    h = cd.build_discrete(args.level)
    cert = cd.verify_harmonic_window(args.level, args.level, seq=h)
    rep = cd.growth_report(h, args.eps)
    cd.write_growth_csv(rep, args.csv)
    print(f"window |n| <= {args.level}: {'all zero' if cert.passed else 'NONZERO'}")
    print(f"{'m':>3} {'a_m':>14} {'p_m |a_m| / (1+m)^eps':>24}")
    for m, a, v in rep.level_values:
        print(f"{m:>3} {str(a):>14} {v:>24.6g}")
    print(f"max |h(n)| / (1+|n|)^eps = {rep.max_atom_ratio:.6g}; bounded: {rep.bounded}")
    print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
