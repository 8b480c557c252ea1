"""Test integrands on [0, 1]^d and closed-form variance bounds.

All evaluators take an ``(n, d)`` array and return ``(n,)`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Integrand:
    """An integrand plus whatever exact constants are known for it.

    ``grad_sq_integral`` is the integral of the squared gradient norm over
    the cube (over ``region`` only, for piecewise integrands).
    ``region`` is a membership test ``X -> bool array`` when the integrand
    is ``g(X) * 1{X in region}``.
    """

    name: str
    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    exact_mean: Optional[float] = None
    grad_sq_integral: Optional[float] = None
    lipschitz: Optional[float] = None
    variance: Optional[float] = None
    region: Optional[Callable[[np.ndarray], np.ndarray]] = None
    smooth_part: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def piecewise(self):
        return self.region is not None

    def __call__(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :] if self.dim > 1 or X.size == 1 else X[:, None]
        if X.shape[-1] != self.dim:
            raise DimensionError(f"{self.name} expects d={self.dim}, got points of width {X.shape[-1]}")
        return self.func(X)


def f1(X, d=None):
    """``12**(d/2) * prod(X_t - 1/2)``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d = X.shape[1] if d is None else d
    return 12.0 ** (d / 2) * np.prod(X - 0.5, axis=1)


def _halfsum(X):
    return X.sum(axis=1) >= X.shape[1] / 2


def f2(X, d=None):
    """``(X_1 - X_2) * 1{sum X_t >= d/2}``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] < 2:
        raise DimensionError("f2 needs d >= 2")
    return np.where(_halfsum(X), X[:, 0] - X[:, 1], 0.0)


def f3(X, d=None):
    """``1{sum X_t >= d/2}``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return _halfsum(X).astype(np.float64)


def f1_lipschitz(d):
    # sum over coordinates of sup |df1/dX_t|
    return 12.0 ** (d / 2) * 2.0 ** (1 - d) * d


def make_f1(d):
    return Integrand("f1", d, f1, exact_mean=0.0, grad_sq_integral=12.0 * d,
                     lipschitz=f1_lipschitz(d), variance=1.0)


def make_f2(d):
    if d < 2:
        raise DimensionError("f2 needs d >= 2")
    return Integrand("f2", d, f2, exact_mean=0.0, region=_halfsum,
                     smooth_part=lambda X: X[:, 0] - X[:, 1])


def make_f3(d):
    return Integrand("f3", d, f3, exact_mean=0.5, variance=0.25, region=_halfsum,
                     smooth_part=lambda X: np.ones(len(X)))


def make_constant(d, c=1.0):
    return Integrand("constant", d, lambda X: np.full(len(X), c), exact_mean=c,
                     grad_sq_integral=0.0, lipschitz=0.0, variance=0.0)


def make_linear(d, slope=1.0):
    """``slope * X_1``; handy for checking the one-dimensional stratified variance."""
    return Integrand("linear", d, lambda X: slope * X[:, 0], exact_mean=slope / 2,
                     grad_sq_integral=slope**2, lipschitz=abs(slope),
                     variance=slope**2 / 12)


REGISTRY = {
    "f1": make_f1,
    "f2": make_f2,
    "f3": make_f3,
    "constant": make_constant,
    "linear": make_linear,
}


def get_integrand(name, d) -> Integrand:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown integrand {name!r}; known: {sorted(REGISTRY)}") from None
    return factory(d)


def register(name, factory):
    """Add ``factory(d) -> Integrand`` under `name`."""
    REGISTRY[name] = factory


# ---------------------------------------------------------------------------
# variance bounds for the Hilbert-curve estimator


@dataclass(frozen=True)
class BoundsReport:
    n: int
    lower: float
    upper: float
    lower_formula: str = "sigma2/96 * 2**(-2/d-d) * n**(-1-2/d)"
    upper_formula: str = "4*M**2*(d+3) * n**(-1-2/d)"


def hsfc_variance_lower_bound(sigma2, d, n):
    """Asymptotic lower bound on Var for C^1 integrands, ``sigma2 = int |grad f|^2``."""
    return sigma2 / 96.0 * 2.0 ** (-2.0 / d - d) * n ** (-1.0 - 2.0 / d)


def hsfc_variance_upper_bound(M, d, n):
    """Upper bound on Var for Lipschitz integrands with modulus `M`."""
    return 4.0 * M**2 * (d + 3) * n ** (-1.0 - 2.0 / d)


def f1_upper_bound(d, n):
    return 16.0 * (d + 3) * 3.0**d * d**2 * n ** (-1.0 - 2.0 / d)


def f1_lower_bound(d, n):
    return 2.0 ** (-3 - d - 2.0 / d) * d * n ** (-1.0 - 2.0 / d)


def grid_variance_limit(sigma2, d=None):
    """Limit of ``n**(1+2/d) * Var`` for grid stratification: ``sigma2 / 12``."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    return sigma2 / 12.0


def bounds_report(f: Integrand, n) -> BoundsReport:
    if f.grad_sq_integral is None or f.lipschitz is None:
        raise ValueError(f"{f.name}: bounds need grad_sq_integral and lipschitz")
    d = f.dim
    lo = hsfc_variance_lower_bound(f.grad_sq_integral, d, n)
    hi = hsfc_variance_upper_bound(f.lipschitz, d, n)
    return BoundsReport(n, lo, hi)


def mc_variance(f: Integrand, n):
    """``Var(f) / n`` when Var(f) is known, else None."""
    if f.variance is None:
        return None
    return f.variance / n

