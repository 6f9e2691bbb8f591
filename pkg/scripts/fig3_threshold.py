"""Coverage vs SIR threshold: exact CoMP, Cauchy bound, nearest SBS and the analytic bound."""

import argparse
import csv
import sys

import numpy as np

from cachecomp import db_to_linear, load_config
from cachecomp.analytic import coverage_probability
from cachecomp.sir_mc import Scheme, coverage_from_sir, simulate_sir


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="tableI")
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--n-geom", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    p = load_config(args.config)
    schemes = [Scheme.COMP_EXACT, Scheme.COMP_CAUCHY, Scheme.NEAREST_SBS]
    sir = simulate_sir(p, schemes, args.trials, args.seed, workers=args.workers)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["sir_threshold_db"] + [s.value for s in schemes] + ["analytic", "analytic_stderr"])
    for db in np.arange(-10, 10.1, 2):
        th = db_to_linear(db)
        sims = [coverage_from_sir(sir[s], th).p_hat for s in schemes]
        b = coverage_probability(p, th, n_geom=args.n_geom, seed=args.seed)
        w.writerow([db, *sims, b.value, b.stderr])
        out.flush()


if __name__ == "__main__":
    main()
