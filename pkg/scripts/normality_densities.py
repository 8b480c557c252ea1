"""Standardized-error densities for the Hilbert, Monte Carlo and linearly
scrambled Sobol' estimators at n = 2**14, R = 1000.

    python scripts/normality_densities.py --out results/normality
"""

import argparse
import json
import os

from hsfcqmc.cli import (ExperimentSpec, KDE_COLUMNS, Z_COLUMNS, normality_results, write_csv)


def main():
    p = argparse.ArgumentParser(description="standardized-error densities")
    p.add_argument("--dims", type=int, nargs="+", default=[2, 8])
    p.add_argument("--methods", nargs="+", default=["hsfc", "mc", "dnet:linear"])
    p.add_argument("--integrands", nargs="+", default=["f1", "f2", "f3"])
    p.add_argument("--m", type=int, default=14)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results/normality")
    args = p.parse_args()

    spec = ExperimentSpec("normality", args.integrands, args.dims, args.methods,
                          reps=args.reps, seed=args.seed, jobs=args.jobs)
    z_rows, kde_rows, summary = normality_results(spec, args.m)
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out + "_z.csv", "w", newline="") as fh:
        write_csv(z_rows, Z_COLUMNS, "normality-z", fh)
    with open(args.out + "_kde.csv", "w", newline="") as fh:
        write_csv(kde_rows, KDE_COLUMNS, "normality-kde", fh)
    with open(args.out + "_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    for s in summary:
        print(f"{s['method']:5s} {s['scramble']:7s} {s['integrand']} d={s['d']}: "
              f"KS={s['ks']:.3f} skew={s['skewness']:+.2f} ex.kurt={s['excess_kurtosis']:+.2f}")


if __name__ == "__main__":
    main()
