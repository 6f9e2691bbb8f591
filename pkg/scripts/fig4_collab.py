"""Coverage vs collaboration radius for the aerial and the ground user."""

import argparse
import csv
import sys

from cachecomp import load_config
from cachecomp.sir_mc import Scheme, coverage_from_sir, simulate_sir


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="tableI")
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    base = load_config(args.config)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["r_cluster", "aerial", "aerial_ci_low", "aerial_ci_high", "ground", "ground_ci_low", "ground_ci_high"])
    for rc in range(50, 401, 50):
        p = base.replace(r_cluster=float(rc))
        sir = simulate_sir(p, [Scheme.COMP_EXACT, Scheme.GROUND_USER], args.trials, args.seed, workers=args.workers)
        a = coverage_from_sir(sir[Scheme.COMP_EXACT], p.sir_threshold)
        g = coverage_from_sir(sir[Scheme.GROUND_USER], p.sir_threshold)
        w.writerow([rc, a.p_hat, a.ci_low, a.ci_high, g.p_hat, g.ci_low, g.ci_high])
        out.flush()


if __name__ == "__main__":
    main()
