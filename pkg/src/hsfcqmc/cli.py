"""Batch front end for the variance, normality and geometry experiments.

Every command is a deterministic function of its flags and master seed.
CSV files open with one ``#`` schema line naming the table and its version.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import integrands as ig
from .estimators import METHODS, EstimatorConfig, derive_seed, replicate
from .hilbert import diameter_bound, geometry_level, strata_geometry
from .scramble import KINDS
from .stats import (REGIONS, ZeroVarianceError, boundary_census, empirical_variance, get_region,
                    kde, normality_report, standardized_errors)

SCHEMA_VERSION = 1
SEED_ENV = "HSFCQMC_SEED"


class SpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    command: str
    integrands: list = field(default_factory=lambda: ["f1"])
    dims: list = field(default_factory=lambda: [2])
    methods: list = field(default_factory=lambda: ["hsfc"])
    m_min: int = 0
    m_max: int = 10
    reps: int = 100
    seed: int = 0
    scramble: str = "nested"
    out: str | None = None
    jobs: int = 1
    dnet_table: str | None = None

    def method_kinds(self):
        """``(method, scrambler)`` pairs; a method may carry ``:kind``."""
        pairs = []
        for token in self.methods:
            method, _, kind = token.partition(":")
            pairs.append((method, kind or self.scramble))
        return pairs

    def validate(self):
        for method, kind in self.method_kinds():
            if method not in METHODS:
                raise SpecError(f"unknown method {method!r}; expected one of {METHODS}")
            if kind not in KINDS:
                raise SpecError(f"unknown scrambler {kind!r}; expected one of {KINDS}")
        for name in self.integrands:
            if name not in ig.REGISTRY:
                raise SpecError(f"unknown integrand {name!r}; known: {sorted(ig.REGISTRY)}")
        for d in self.dims:
            if d < 1:
                raise SpecError("dimension must be >= 1")
            if "f2" in self.integrands and d < 2:
                raise SpecError("f2 needs d >= 2")
        if self.m_min < 0 or self.m_max < self.m_min:
            raise SpecError(f"bad m range {self.m_min}..{self.m_max}")
        if self.reps < 2:
            raise SpecError("need at least 2 replications")
        return self


def _config(spec, method, kind, name, d, m):
    return EstimatorConfig(method, name, d, m, kind, derive_seed(spec.seed, method, kind, name, d, m),
                           spec.dnet_table)


def _n_for(method, d, m):
    return m**d if method == "grid" else 2**m


# ---------------------------------------------------------------------------
# commands


VARIANCE_COLUMNS = ["method", "scramble", "integrand", "d", "m", "n", "R", "empirical_variance",
                    "lower_bound", "upper_bound", "mc_reference"]


def variance_decay_rows(spec: ExperimentSpec):
    """One row per (method, integrand, d, m).

    For ``grid`` the size parameter m is the per-axis count (``n = m**d``,
    m >= 1); every other method uses ``n = 2**m``.
    """
    spec.validate()
    rows = []
    for method, kind in spec.method_kinds():
        for name in spec.integrands:
            for d in spec.dims:
                f = ig.get_integrand(name, d)
                for m in range(spec.m_min, spec.m_max + 1):
                    if method == "grid" and m < 1:
                        continue
                    cfg = _config(spec, method, kind, name, d, 2**m if method == "mc" else m)
                    rs = replicate(cfg, spec.reps, spec.jobs)
                    n = _n_for(method, d, m)
                    lo = hi = None
                    if f.grad_sq_integral is not None and f.lipschitz is not None:
                        lo = ig.hsfc_variance_lower_bound(f.grad_sq_integral, d, n)
                        hi = ig.hsfc_variance_upper_bound(f.lipschitz, d, n)
                    rows.append({
                        "method": method, "scramble": kind if method in ("hsfc", "dnet") else "",
                        "integrand": name, "d": d, "m": m, "n": n, "R": spec.reps,
                        "empirical_variance": empirical_variance(rs),
                        "lower_bound": lo, "upper_bound": hi,
                        "mc_reference": ig.mc_variance(f, n),
                    })
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows, columns, table, stream):
    stream.write(f"# hsfcqmc {table} schema={SCHEMA_VERSION} columns={','.join(columns)}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])


Z_COLUMNS = ["method", "scramble", "integrand", "d", "replication", "z"]
KDE_COLUMNS = ["method", "scramble", "integrand", "d", "x", "density", "bandwidth"]


def normality_results(spec: ExperimentSpec, m: int):
    """Standardized errors, density curves and reports per (method, integrand, d)."""
    spec.validate()
    if spec.reps < 100:
        raise SpecError("normality diagnostics need at least 100 replications")
    z_rows, kde_rows, summary = [], [], []
    for method, kind in spec.method_kinds():
        for name in spec.integrands:
            for d in spec.dims:
                f = ig.get_integrand(name, d)
                size = m
                if method == "mc":
                    size = 2**m
                elif method == "grid":
                    size = round(2 ** (m / d))
                cfg = _config(spec, method, kind, name, d, size)
                rs = replicate(cfg, spec.reps, spec.jobs)
                tag = {"method": method, "scramble": kind if method in ("hsfc", "dnet") else "",
                       "integrand": name, "d": d}
                try:
                    z = standardized_errors(rs, f.exact_mean)
                except ZeroVarianceError as exc:
                    raise ZeroVarianceError(f"{method} ({kind}) on {name}, d={d}: {exc}") from None
                for r, zr in enumerate(z):
                    z_rows.append({**tag, "replication": r, "z": float(zr)})
                curve = kde(z)
                for x, y in zip(curve.x, curve.density):
                    kde_rows.append({**tag, "x": float(x), "density": float(y),
                                     "bandwidth": curve.bandwidth})
                rep = normality_report(z)
                summary.append({**tag, "n": cfg.n, "R": spec.reps,
                                "empirical_variance": empirical_variance(rs),
                                "bandwidth": curve.bandwidth, **rep.as_dict()})
    return z_rows, kde_rows, summary


def strata_audit(d, m, K=None, base=2):
    if base != 2:
        raise SpecError(f"Hilbert strata need base 2, got {base}")
    if K is None:
        K = geometry_level(m, d)
    counts, measures, diam = strata_geometry(d, m, K)
    n = 2**m
    bound = diameter_bound(d, n)
    return {
        "d": d, "m": m, "n": n, "K": K,
        "strata": [{"index": i + 1, "cells": int(c), "measure": float(mu), "diameter": float(r)}
                   for i, (c, mu, r) in enumerate(zip(counts, measures, diam))],
        "all_measures_equal": bool(np.all(measures == 1.0 / n)),
        "max_diameter": float(diam.max()),
        "diameter_bound": bound,
        "within_bound": bool(diam.max() <= bound),
    }


CENSUS_COLUMNS = ["region", "d", "m", "n", "boundary", "interior", "min_boundary_variance",
                  "max_boundary_variance"]


def census_rows(region, d, m_min, m_max):
    omega = get_region(region, d)
    rows = []
    for m in range(m_min, m_max + 1):
        c = boundary_census(omega, d, m)
        rows.append({"region": region, "d": d, "m": m, "n": c.n, "boundary": c.boundary,
                     "interior": c.interior,
                     "min_boundary_variance": _frac(c.min_variance),
                     "max_boundary_variance": _frac(c.max_variance)})
    return rows


def _frac(x):
    return None if x is None else str(x)


# ---------------------------------------------------------------------------
# argument handling


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    return open(path, "w", newline=""), True


def _default_seed():
    env = os.environ.get(SEED_ENV)
    return int(env) if env is not None else 0


def _common(p, m_defaults=(0, 10)):
    p.add_argument("--integrand", action="append", help=f"one of {sorted(ig.REGISTRY)}; repeatable")
    p.add_argument("--dim", action="append", type=int, help="dimension; repeatable")
    p.add_argument("--method", action="append",
                   help="mc, grid, hsfc or dnet, optionally with :nested or :linear; repeatable")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--scramble", choices=KINDS, default="nested")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dnet-table", default=None, help="direction-number file for the dnet method")


def build_parser():
    parser = argparse.ArgumentParser(prog="hsfcqmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variance-decay", help="empirical variance against n, with bounds")
    _common(p)
    p.add_argument("--m-min", type=int, default=0)
    p.add_argument("--m-max", type=int, default=10)

    p = sub.add_parser("normality", help="standardized errors, densities and normality statistics")
    _common(p)
    p.add_argument("--m", type=int, default=14, help="log2 of the sample size")

    p = sub.add_parser("strata-audit", help="cell counts, measures and diameters of Hilbert strata")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--level", type=int, default=None, help="cell level K")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--out", default=None)

    p = sub.add_parser("boundary-census", help="exact boundary-stratum census for a half-space")
    p.add_argument("--region", choices=sorted(REGIONS), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=12)
    p.add_argument("--out", default=None)
    return parser


def _spec(args):
    seed = args.seed if args.seed is not None else _default_seed()
    return ExperimentSpec(
        command=args.command,
        integrands=args.integrand or ["f1"],
        dims=args.dim or [2],
        methods=args.method or ["hsfc"],
        m_min=getattr(args, "m_min", 0),
        m_max=getattr(args, "m_max", 0),
        reps=args.reps,
        seed=seed,
        scramble=args.scramble,
        out=args.out,
        jobs=args.jobs,
        dnet_table=args.dnet_table,
    )


def run(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "variance-decay":
        rows = variance_decay_rows(_spec(args))
        stream, close = _open_out(args.out)
        try:
            write_csv(rows, VARIANCE_COLUMNS, "variance-decay", stream)
        finally:
            if close:
                stream.close()
    elif args.command == "normality":
        spec = _spec(args)
        z_rows, kde_rows, summary = normality_results(spec, args.m)
        if args.out in (None, "-"):
            json.dump(summary, sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            prefix = args.out
            for suffix, rows, cols, table in (("_z.csv", z_rows, Z_COLUMNS, "normality-z"),
                                              ("_kde.csv", kde_rows, KDE_COLUMNS, "normality-kde")):
                stream, _ = _open_out(prefix + suffix)
                with stream:
                    write_csv(rows, cols, table, stream)
            with open(prefix + "_summary.json", "w") as fh:
                json.dump(summary, fh, indent=2)
                fh.write("\n")
    elif args.command == "strata-audit":
        report = strata_audit(args.dim, args.m, args.level, args.base)
        stream, close = _open_out(args.out)
        try:
            json.dump(report, stream, indent=2)
            stream.write("\n")
        finally:
            if close:
                stream.close()
    elif args.command == "boundary-census":
        rows = census_rows(args.region, args.dim, args.m_min, args.m_max)
        stream, close = _open_out(args.out)
        try:
            write_csv(rows, CENSUS_COLUMNS, "boundary-census", stream)
        finally:
            if close:
                stream.close()
    return 0


def main(argv=None):
    try:
        return run(argv)
    except (SpecError, ZeroVarianceError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hsfcqmc: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
