"""Coverage vs caching probability, simulated and analytic, at a few thresholds."""

import argparse
import csv
import sys

from cachecomp import db_to_linear, load_config
from cachecomp.analytic import coverage_probability
from cachecomp.sir_mc import Scheme, coverage_from_sir, simulate_sir


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="tableI")
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--n-geom", type=int, default=1000)
    ap.add_argument("--thresholds-db", default="-10,-5,0")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    base = load_config(args.config)
    thresholds = [float(t) for t in args.thresholds_db.split(",")]
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["c_f", "sir_threshold_db", "simulated", "ci_low", "ci_high", "analytic"])
    for cf in (0.2, 0.4, 0.6, 0.8, 1.0):
        p = base.replace(c_f=cf)
        sir = simulate_sir(p, [Scheme.COMP_EXACT], args.trials, args.seed)[Scheme.COMP_EXACT]
        for db in thresholds:
            e = coverage_from_sir(sir, db_to_linear(db))
            b = coverage_probability(p, db_to_linear(db), n_geom=args.n_geom, seed=args.seed)
            w.writerow([cf, db, e.p_hat, e.ci_low, e.ci_high, b.value])
        out.flush()


if __name__ == "__main__":
    main()
