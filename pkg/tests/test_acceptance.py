"""End-to-end acceptance checks, one test per criterion.

Each test prints and records a single ``criterion N: PASS|FAIL`` line with the
measured quantities and wall time; the lines are repeated in the terminal
summary.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hsfcqmc.digitalnet import generator_matrices, scrambled_sobol_batch
from hsfcqmc.estimators import EstimatorConfig, derive_seed, replicate
from hsfcqmc.hilbert import decode, diameter_bound, strata_geometry
from hsfcqmc.integrands import get_integrand
from hsfcqmc.scramble import scrambled_vdc_batch
from hsfcqmc.stats import (VarianceCurve, boundary_census, empirical_variance, get_region,
                           loglog_slope, normality_report, standardized_errors)

pytestmark = pytest.mark.acceptance

MASTER = 20240601


def seed(*labels):
    return derive_seed(MASTER, *labels)


class Criterion:
    def __init__(self, number, budget_s):
        self.number = number
        self.budget = budget_s
        self.failures = []
        self.details = []
        self.t0 = time.perf_counter()

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.details.append(text)

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        self.check(elapsed < self.budget, f"runtime {elapsed:.1f}s over {self.budget}s budget")
        status = "PASS" if not self.failures else "FAIL"
        line = f"criterion {self.number}: {status} ({elapsed:.1f}s) " + "; ".join(self.details)
        if self.failures:
            line += " | failed: " + "; ".join(self.failures[:5])
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert not self.failures, line


def variance_of(method, name, d, size, R, kind="nested", tag=()):
    cfg = EstimatorConfig(method, name, d, size, kind, seed(method, kind, name, d, size, *tag))
    return replicate(cfg, R)


def test_criterion_01_stratification():
    c = Criterion(1, 10)
    trials = 0
    for kind in ("nested", "linear"):
        for m in range(1, 13):
            n = 2**m
            for s in range(64):
                x = scrambled_vdc_batch(2, m, kind, seed(1, kind, m, s))
                k = np.floor(x * n).astype(np.int64)
                c.check(np.array_equal(np.sort(k), np.arange(n)), f"{kind} m={m} seed#{s}")
                trials += 1
    c.note(f"{trials} scrambled sets checked")
    c.finish()


def test_criterion_02_hilbert_codec():
    c = Criterion(2, 1)
    for d in (2, 3):
        prev = np.zeros((1, d), dtype=np.int64)
        for K in range(1, 5):
            C = decode(np.arange(1 << (d * K), dtype=np.uint64), d, K)
            c.check(len({tuple(r) for r in C.tolist()}) == 2 ** (d * K), f"bijection d={d} K={K}")
            c.check(bool(np.all(np.abs(np.diff(C, axis=0)).sum(axis=1) == 1)),
                    f"adjacency d={d} K={K}")
            blocks = C.reshape(-1, 2**d, d) >> 1
            c.check(np.array_equal(blocks, np.repeat(prev[:, None, :], 2**d, axis=1)),
                    f"nesting d={d} K={K}")
            prev = C
    c.note("d in {2,3}, K=1..4 exhaustive")
    c.finish()


def test_criterion_03_strata_geometry():
    c = Criterion(3, 30)
    worst = 0.0
    for d in (2, 3):
        for m in range(0, 11):
            n = 2**m
            _, measures, diam = strata_geometry(d, m)
            c.check(bool(np.all(measures == 1.0 / n)), f"measure d={d} m={m}")
            bound = diameter_bound(d, n)
            c.check(bool(diam.max() <= bound), f"diameter d={d} m={m}")
            worst = max(worst, diam.max() / bound)
    c.note(f"max diameter / bound = {worst:.3f}")
    c.finish()


def test_criterion_04_grid_limit():
    c = Criterion(4, 30)
    rs = variance_of("grid", "f1", 2, 32, 2000)
    n = 32**2
    scaled = n**2 * empirical_variance(rs)
    c.note(f"n^2 * var = {scaled:.3f}")
    c.check(1.7 <= scaled <= 2.3, "outside [1.7, 2.3]")
    c.finish()


def test_criterion_05_bound_sandwich():
    c = Criterion(5, 120)
    ratios = []
    for m in range(4, 13):
        n = 2**m
        v = empirical_variance(variance_of("hsfc", "f1", 2, m, 500))
        lo, hi = n**-2 / 32, 2880 * n**-2
        c.check(lo <= v <= hi, f"m={m}: {v:.3e} not in [{lo:.3e}, {hi:.3e}]")
        ratios.append(v * n**2)
    c.note(f"n^2 * var ranges {min(ratios):.3f}..{max(ratios):.3f}")
    c.finish()


def test_criterion_06_rate_slopes():
    c = Criterion(6, 900)
    targets = {2: (-2.0, 0.15), 8: (-1.25, 0.12)}
    for d, (target, tol) in targets.items():
        ms = range(6, 15)
        v = [empirical_variance(variance_of("hsfc", "f1", d, m, 500)) for m in ms]
        slope = loglog_slope(VarianceCurve([2.0**m for m in ms], v, 500))
        c.note(f"d={d} slope {slope:.3f} (target {target} +- {tol})")
        c.check(abs(slope - target) <= tol, f"d={d} slope {slope:.3f}")
    c.finish()


def test_criterion_07_boundary_census():
    c = Criterion(7, 30)
    omega = get_region("diagonal", 2)
    for m in range(2, 15):
        n = 2**m
        cen = boundary_census(omega, 2, m)
        even = m % 2 == 0
        want = math.isqrt(n) if even else math.isqrt(2 * n)
        var = Fraction(1, 4) if even else Fraction(3, 16)
        c.check(cen.boundary == want, f"m={m}: {cen.boundary} boundary strata, want {want}")
        c.check(set(cen.boundary_variances) == {var}, f"m={m}: variances not all {var}")
    c.note("m=2..14 exact")
    c.finish()


def test_criterion_08_normality():
    c = Criterion(8, 1200)
    m, R = 14, 1000
    for method in ("hsfc", "mc"):
        for d in (2, 8):
            for name in ("f1", "f2", "f3"):
                size = m if method == "hsfc" else 2**m
                rs = variance_of(method, name, d, size, R)
                rep = normality_report(standardized_errors(rs, get_integrand(name, d).exact_mean))
                ok = rep.ks < 0.06 and abs(rep.skewness) < 0.3
                c.check(ok, f"{method} {name} d={d} ks={rep.ks:.3f} skew={rep.skewness:.2f}")
                c.note(f"{method}/{name}/d{d} ks={rep.ks:.3f} skew={rep.skewness:+.2f}")
    for name in ("f1", "f2", "f3"):
        rs = variance_of("dnet", name, 2, m, R, kind="linear")
        rep = normality_report(standardized_errors(rs, get_integrand(name, 2).exact_mean))
        c.note(f"dnet-linear/{name}/d2 ks={rep.ks:.3f} (reported)")
    c.finish()


def test_criterion_09_unbiasedness():
    c = Criterion(9, 60)
    R, m = 2000, 8
    methods = [("mc", 2**m, "nested"), ("grid", 16, "nested"), ("hsfc", m, "nested"),
               ("hsfc", m, "linear"), ("dnet", m, "nested"), ("dnet", m, "linear")]
    worst = 0.0
    for method, size, kind in methods:
        for name in ("f1", "f2", "f3"):
            est = variance_of(method, name, 2, size, R, kind=kind, tag=("unbiased",)).estimates
            mu = get_integrand(name, 2).exact_mean
            sd = est.std(ddof=1)
            z = abs(est.mean() - mu) / (sd / math.sqrt(R))
            worst = max(worst, z)
            c.check(z < 4, f"{method}:{kind} {name} |z|={z:.2f}")
    c.note(f"largest |mean - mu| / (sd/sqrt(R)) = {worst:.2f}")
    c.finish()


def test_criterion_10_digital_net():
    c = Criterion(10, 60)
    G = generator_matrices(d=2)
    for kind in ("nested", "linear"):
        for s in range(32):
            for m in range(0, 11):
                P = scrambled_sobol_batch(G, m, kind, seed(10, kind, s, m))
                for k in range(m + 1):
                    a = np.floor(P[:, 0] * 2**k).astype(np.int64)
                    b = np.floor(P[:, 1] * 2 ** (m - k)).astype(np.int64)
                    ok = np.array_equal(np.sort(a * 2 ** (m - k) + b), np.arange(2**m))
                    c.check(ok, f"{kind} seed#{s} m={m} k={k}")
    c.note("m=0..10, both scramblers, 32 seeds")
    c.finish()
