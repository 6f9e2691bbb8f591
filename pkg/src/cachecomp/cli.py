"""Command-line front end.

    cachecomp coverage --config tableI --method simulated --scheme comp-exact \
        --sweep sir_threshold_db:-10:10:2 --trials 10000 --seed 7
    cachecomp gain-pdf --config tableI --bins 60 --realizations 100000

Both write CSV to stdout. Exit codes: 0 ok, 2 usage, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from cachecomp.analytic import AccuracyError, coverage_probability
from cachecomp.channel import los_probability, path_gain
from cachecomp.params import ConfigError, db_to_linear, linear_to_db, load_config
from cachecomp.rng import substream
from cachecomp.sir_mc import Scheme, coverage_from_sir, empirical_gain_pdf, simulate_sir

HEADER = ["swept_name", "swept_value", "scheme", "method", "value", "ci_low", "ci_high", "n_trials", "seed"]
SWEEPABLE = ("sir_threshold_db", "r_cluster", "c_f", "lambda_b", "h_ue")


class UsageError(Exception):
    pass


def parse_sweep(text):
    try:
        name, start, stop, step = text.split(":")
        start, stop, step = float(start), float(stop), float(step)
    except ValueError:
        raise UsageError(f"--sweep expects NAME:START:STOP:STEP, got {text!r}") from None
    if name not in SWEEPABLE:
        raise UsageError(f"cannot sweep {name!r}; choose from {', '.join(SWEEPABLE)}")
    if not (math.isfinite(start) and math.isfinite(stop)) or step <= 0 or stop < start:
        raise UsageError("sweep needs finite START <= STOP and STEP > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return name, [round(start + i * step, 12) for i in range(n)]


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def _params_at(base, name, value):
    if name == "sir_threshold_db":
        return base.replace(sir_threshold=db_to_linear(value))
    if name is None:
        return base
    return base.replace(**{name: value})


def _build_params(args):
    p = load_config(args.config)
    overrides = {}
    if args.v_max is not None:
        overrides["v_max"] = args.v_max
    if args.kappa_max is not None:
        overrides["kappa_max"] = args.kappa_max
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if getattr(args, "n_geom", None) is not None:
        overrides["n_geom"] = args.n_geom
    return p.replace(**overrides) if overrides else p


def coverage_rows(p, method, schemes, sweep=None, workers=1):
    name, values = sweep if sweep else ("sir_threshold_db", [round(linear_to_db(p.sir_threshold), 12)])
    seed = p.numerics.rng_seed
    rows = []
    if method == "simulated":
        if name == "sir_threshold_db":
            sirs = simulate_sir(p, schemes, seed=seed, workers=workers)
            for s in schemes:
                for v in values:
                    est = coverage_from_sir(sirs[s], db_to_linear(v))
                    rows.append((name, v, s.value, method, est.p_hat, est.ci_low, est.ci_high, est.n_trials, seed))
        else:
            for v in values:
                q = _params_at(p, name, v)
                sirs = simulate_sir(q, schemes, seed=seed, workers=workers)
                for s in schemes:
                    est = coverage_from_sir(sirs[s], q.sir_threshold)
                    rows.append((name, v, s.value, method, est.p_hat, est.ci_low, est.ci_high, est.n_trials, seed))
    else:
        if Scheme.NEAREST_SBS in schemes:
            raise UsageError("the analytic bound covers CoMP schemes and the ground user, not nearest-sbs")
        for s in schemes:
            for v in values:
                q = _params_at(p, name, v)
                if s == Scheme.GROUND_USER:
                    q = q.for_ground_user()
                b = coverage_probability(q)
                half = 1.96 * b.stderr
                rows.append((
                    name, v, s.value, method, b.value,
                    max(0.0, b.value - half), min(1.0, b.value + half), q.numerics.n_geom, seed,
                ))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def write_csv(rows, out, header=HEADER):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])


def cmd_coverage(args, out):
    p = _build_params(args)
    schemes = [Scheme(s) for s in (args.scheme or ["comp-exact"])]
    schemes = list(dict.fromkeys(schemes))
    sweep = parse_sweep(args.sweep) if args.sweep else None
    rows = coverage_rows(p, args.method, schemes, sweep, workers=args.workers)
    write_csv(rows, out)


def cmd_gain_pdf(args, out):
    if args.realizations < 1 or args.bins < 1:
        raise UsageError("--realizations and --bins must be positive")
    p = _build_params(args)
    seed = p.numerics.rng_seed
    zetas = None
    if args.servers:
        try:
            r = np.array([float(x) for x in args.servers.split(",")])
        except ValueError:
            raise UsageError("--servers expects comma-separated distances in m") from None
        if np.any(r < 0) or np.any(r > p.r_cluster):
            raise UsageError("--servers distances must lie in [0, r_cluster]")
        los = substream(seed, 4).random(r.size) < los_probability(r, p)
        zetas = np.atleast_1d(path_gain(r, los, p))
    g = empirical_gain_pdf(p, args.realizations, args.bins, seed=seed, zetas=zetas)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["bin_center", "empirical_density", "matched_gamma_density"])
    for c, e, m in zip(g.bin_centers, g.empirical_density, g.matched_density):
        w.writerow([_fmt(float(c)), _fmt(float(e)), _fmt(float(m))])
    out.write(f"# ks_distance={_fmt(g.ks_distance)} ks_pvalue={_fmt(g.ks_pvalue)} "
              f"k_eq={_fmt(g.approx.k_eq)} k_int={g.approx.k_int} theta={_fmt(g.approx.theta)}\n")


def _common(sp):
    sp.add_argument("--config", default="tableI", help="config file, or tableI for the reference defaults")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--v-max", type=float, dest="v_max", help="quadrature cut-off radius (m)")
    sp.add_argument("--kappa-max", type=int, dest="kappa_max")


def build_parser():
    ap = argparse.ArgumentParser(prog="cachecomp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    cov = sub.add_parser("coverage", help="coverage probability, single point or sweep")
    _common(cov)
    cov.add_argument("--method", choices=("simulated", "analytic"), default="simulated")
    cov.add_argument("--scheme", action="append", choices=[s.value for s in Scheme])
    cov.add_argument("--sweep", help="NAME:START:STOP:STEP with NAME in " + ", ".join(SWEEPABLE))
    cov.add_argument("--n-geom", type=int, dest="n_geom", help="serving-geometry draws per kappa (analytic)")
    cov.add_argument("--workers", type=int, default=1)
    cov.set_defaults(func=cmd_coverage)
    pdf = sub.add_parser("gain-pdf", help="histogram of the summed server gain vs matched Gamma")
    _common(pdf)
    pdf.add_argument("--bins", type=int, default=60)
    pdf.add_argument("--realizations", type=int, default=100_000)
    pdf.add_argument("--servers", help="fix server distances (m), comma-separated")
    pdf.set_defaults(func=cmd_gain_pdf)
    return ap


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.func(args, out)
    except (UsageError, ConfigError, FileNotFoundError) as e:
        print(f"cachecomp: error: {e}", file=sys.stderr)
        return 2
    except (AccuracyError, FloatingPointError, ArithmeticError) as e:
        print(f"cachecomp: numeric failure: {e}", file=sys.stderr)
        return 3
    return 0


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
