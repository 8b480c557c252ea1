"""Replication statistics and exact boundary censuses for Hilbert strata."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy import stats as sps

from .hilbert import all_cells, geometry_level


class InsufficientDataError(ValueError):
    pass


class ZeroVarianceError(ValueError):
    pass


def _values(x):
    return np.asarray(getattr(x, "estimates", x), dtype=np.float64)


def empirical_variance(estimates) -> float:
    """Unbiased sample variance of a ReplicationSet (or plain array)."""
    x = _values(estimates)
    if x.size < 2:
        raise InsufficientDataError("need at least 2 replications")
    return float(np.var(x, ddof=1))


def standardized_errors(estimates, mu) -> np.ndarray:
    """``(estimate - mu) / sd`` with the replication standard deviation."""
    x = _values(estimates)
    s2 = empirical_variance(x)
    if s2 <= 0.0:
        raise ZeroVarianceError("replications have zero spread; the estimator is degenerate here")
    return (x - mu) / math.sqrt(s2)


# ---------------------------------------------------------------------------
# curves


@dataclass
class VarianceCurve:
    n: np.ndarray
    variance: np.ndarray
    R: np.ndarray
    method: str = ""
    integrand: str = ""

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=np.float64)
        self.variance = np.asarray(self.variance, dtype=np.float64)
        self.R = np.broadcast_to(np.asarray(self.R), self.n.shape).copy()
        if np.any(np.diff(self.n) <= 0):
            raise ValueError("n must be strictly increasing")
        if np.any(self.variance < 0):
            raise ValueError("variances must be non-negative")


def loglog_slope(curve: VarianceCurve, m_range=None, base=2) -> float:
    """Least-squares slope of log(variance) against log(n).

    `m_range` restricts the fit to ``n = base**m`` for m in the range.
    """
    n, v = curve.n, curve.variance
    if m_range is not None:
        keep = np.isin(n, [float(base) ** m for m in m_range])
        n, v = n[keep], v[keep]
    if n.size < 3:
        raise InsufficientDataError("need at least 3 points to fit a slope")
    if np.any(v <= 0):
        raise ValueError("cannot take the log of a zero variance")
    slope, _ = np.polyfit(np.log(n), np.log(v), 1)
    return float(slope)


@dataclass
class DensityCurve:
    x: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self):
        return float(np.trapezoid(self.density, self.x))


def silverman_bandwidth(values) -> float:
    x = np.asarray(values, dtype=np.float64)
    sd = np.std(x, ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * x.size ** (-0.2)


def kde(values, bandwidth=None, points=512) -> DensityCurve:
    """Gaussian kernel density on an even grid over ``[min - 3h, max + 3h]``.

    The curve is rescaled so its trapezoid integral is exactly one; the
    kernel mass beyond the grid ends is otherwise lost.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size < 10:
        raise InsufficientDataError("need at least 10 values for a density estimate")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ZeroVarianceError("bandwidth is zero; all values coincide")
    grid = np.linspace(x.min() - 3 * h, x.max() + 3 * h, points)
    dens = np.zeros(points)
    for chunk in np.array_split(x, max(1, x.size // 4096)):
        z = (grid[:, None] - chunk[None, :]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=1)
    dens /= x.size * h * math.sqrt(2 * math.pi)
    dens /= np.trapezoid(dens, grid)
    return DensityCurve(grid, dens, h)


@dataclass(frozen=True)
class NormalityReport:
    ks: float
    skewness: float
    excess_kurtosis: float
    count: int

    def as_dict(self):
        return {"ks": self.ks, "skewness": self.skewness,
                "excess_kurtosis": self.excess_kurtosis, "count": self.count}


def normality_report(z) -> NormalityReport:
    z = np.asarray(z, dtype=np.float64)
    if z.size < 100:
        raise InsufficientDataError("need at least 100 values")
    ks = sps.kstest(z, "norm").statistic
    return NormalityReport(float(ks), float(sps.skew(z)), float(sps.kurtosis(z)), int(z.size))


# ---------------------------------------------------------------------------
# exact boundary census for half-spaces


class UnsupportedRegionError(ValueError):
    pass


@dataclass(frozen=True)
class HalfSpace:
    """``{X : sum_t w_t X_t >= c}`` with non-negative integer weights."""

    weights: tuple[int, ...]
    threshold: Fraction
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "threshold", Fraction(self.threshold))
        if any(w < 0 for w in self.weights):
            raise UnsupportedRegionError("weights must be non-negative")

    @property
    def dim(self):
        return len(self.weights)

    def contains(self, X):
        X = np.atleast_2d(X)
        return X @ np.asarray(self.weights, dtype=np.float64) >= float(self.threshold)

    __call__ = contains

    def volume(self):
        """Lebesgue measure of the region inside the unit cube."""
        return _slab_fraction(self.weights, self.threshold)

    def cell_fractions(self, coords, K):
        """Exact fraction of each level-K cell lying in the region.

        `coords` are integer lower corners, ``(ncells, d)``.  Returns Fractions.
        """
        coords = np.asarray(coords, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.int64)
        # in cell units: sum w y >= c * 2**K - sum w lo, y in [0, 1]^d
        offset = coords @ w
        thr = self.threshold * (1 << K)
        keys, inverse = np.unique(offset, return_inverse=True)
        frac = [_slab_fraction(self.weights, thr - int(k)) for k in keys]
        return [frac[i] for i in inverse.ravel()]


def _slab_fraction(weights, c):
    """Volume of ``{y in [0,1]^d : sum w y >= c}`` for integer weights, exactly.

    Uses the inclusion-exclusion formula for the simplex clipped by the cube.
    """
    c = Fraction(c)
    w = [x for x in weights if x > 0]
    total = sum(w)
    if c <= 0:
        return Fraction(1)
    if c >= total:
        return Fraction(0)
    # volume below: {sum w y < c}
    k = len(w)
    below = Fraction(0)
    for r in range(k + 1):
        for S in combinations(w, r):
            t = c - sum(S)
            if t > 0:
                below += (-1) ** r * t**k
    below /= math.factorial(k) * math.prod(w)
    return 1 - below


REGIONS = {
    "cube": lambda d: HalfSpace((0,) * d, 0, "cube"),
    "diagonal": lambda d: HalfSpace((1, 1) + (0,) * (d - 2), 1, "diagonal"),
    "halfsum": lambda d: HalfSpace((1,) * d, Fraction(d, 2), "halfsum"),
}


def get_region(name, d) -> HalfSpace:
    try:
        factory = REGIONS[name]
    except KeyError:
        raise UnsupportedRegionError(f"unknown region {name!r}; known: {sorted(REGIONS)}") from None
    if name == "diagonal" and d < 2:
        raise UnsupportedRegionError("diagonal region needs d >= 2")
    return factory(d)


@dataclass
class BoundaryCensus:
    m: int
    n: int
    interior: int
    boundary: int
    boundary_variances: list = field(default_factory=list)
    measure_inside: Fraction = Fraction(0)

    def __post_init__(self):
        if self.interior + self.boundary > self.n:
            raise ValueError("more classified strata than strata")

    @property
    def min_variance(self):
        return min(self.boundary_variances) if self.boundary_variances else None

    @property
    def max_variance(self):
        return max(self.boundary_variances) if self.boundary_variances else None


def boundary_census(region: HalfSpace, d, m, K=None) -> BoundaryCensus:
    """Classify the ``2**m`` Hilbert strata against `region`, exactly.

    A stratum is interior when it lies in the region up to a null set and on
    the boundary when both it and its complement meet the region in positive
    measure.  Boundary strata carry the indicator variance ``p(1 - p)`` with
    ``p = n * vol(E_i & region)``.
    """
    if not isinstance(region, HalfSpace):
        raise UnsupportedRegionError("exact volumes are only available for half-spaces")
    if region.dim != d:
        raise UnsupportedRegionError(f"region is {region.dim}-dimensional, asked for d={d}")
    if K is None:
        K = geometry_level(m, d)
    n = 1 << m
    cells = all_cells(d, K)
    per = cells.shape[0] // n
    fracs = region.cell_fractions(cells, K)
    interior = boundary = 0
    variances = []
    inside = Fraction(0)
    for i in range(n):
        p = sum(fracs[i * per:(i + 1) * per], Fraction(0)) / per
        inside += p / n
        if p == 1:
            interior += 1
        elif p > 0:
            boundary += 1
            variances.append(p * (1 - p))
    return BoundaryCensus(m, n, interior, boundary, variances, inside)


def census_rate_check(censuses) -> float:
    """Slope of log|boundary strata| against log n across census levels."""
    censuses = list(censuses)
    if len(censuses) < 3:
        raise InsufficientDataError("need at least 3 census levels")
    counts = np.array([c.boundary for c in censuses], dtype=np.float64)
    if np.all(counts == 0):
        return 0.0
    if np.any(counts == 0):
        raise ValueError("some levels have no boundary strata; the slope is undefined")
    n = np.array([c.n for c in censuses], dtype=np.float64)
    slope, _ = np.polyfit(np.log(n), np.log(counts), 1)
    return float(slope)
