"""Exact variance of the Hilbert-stratified f1 estimate, by cell enumeration.

Every stratum is a union of level-K cells; f1 is a product of centred
linear factors, so its mean and second moment over each cube are closed
form.  Prints n * Var and the local log2 slope for each m.

    python scripts/exact_f1_curve.py --dim 8 --m-max 16
"""

import argparse
import math

import numpy as np

from hsfcqmc.hilbert import all_cells, geometry_level


def exact_variance(d, m):
    K = geometry_level(m, d)
    n, side = 2**m, 2.0**-K
    c = all_cells(d, K) * side + side / 2 - 0.5
    mean = np.prod(math.sqrt(12.0) * c, axis=1)
    second = np.prod(12.0 * (c**2 + side**2 / 12.0), axis=1)
    per = len(c) // n
    mu = mean.reshape(n, per).mean(axis=1)
    s2 = second.reshape(n, per).mean(axis=1)
    return float(np.sum(s2 - mu**2)) / n**2


def main():
    p = argparse.ArgumentParser(description="exact f1 variance curve")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--m-max", type=int, default=16)
    args = p.parse_args()
    prev = None
    for m in range(args.m_min, args.m_max + 1):
        v = exact_variance(args.dim, m)
        local = "" if prev is None else f"  local slope {math.log2(v / prev):+.3f}"
        print(f"m={m:2d}  n*Var={v * 2**m:.4g}{local}")
        prev = v


if __name__ == "__main__":
    main()
