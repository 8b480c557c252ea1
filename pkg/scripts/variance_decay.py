"""Empirical variance of the f1 estimators against n, with the Hilbert bounds.

Writes one CSV per dimension and prints the fitted log-log slopes.

    python scripts/variance_decay.py --dims 2 8 --m-max 14 --reps 500 --out results/
"""

import argparse
import os

from hsfcqmc.cli import ExperimentSpec, VARIANCE_COLUMNS, variance_decay_rows, write_csv
from hsfcqmc.stats import VarianceCurve, loglog_slope


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[2, 8])
    p.add_argument("--methods", nargs="+", default=["hsfc", "mc", "dnet"])
    p.add_argument("--m-min", type=int, default=0)
    p.add_argument("--m-max", type=int, default=14)
    p.add_argument("--fit-from", type=int, default=6)
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results")
    args = p.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for d in args.dims:
        spec = ExperimentSpec("variance-decay", ["f1"], [d], args.methods, args.m_min, args.m_max,
                              args.reps, args.seed, jobs=args.jobs)
        rows = variance_decay_rows(spec)
        path = os.path.join(args.out, f"variance_decay_f1_d{d}.csv")
        with open(path, "w", newline="") as fh:
            write_csv(rows, VARIANCE_COLUMNS, "variance-decay", fh)
        for method in args.methods:
            sel = [r for r in rows if r["method"] == method and r["m"] >= args.fit_from]
            curve = VarianceCurve([r["n"] for r in sel], [r["empirical_variance"] for r in sel],
                                  args.reps, method, "f1")
            print(f"d={d} {method:5s} slope over m={args.fit_from}..{args.m_max}: "
                  f"{loglog_slope(curve):+.3f}")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
