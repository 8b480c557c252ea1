"""Estimators of the integral over [0, 1]^d and the replication driver.

Methods
-------
mc
    plain Monte Carlo with n i.i.d. uniform points
grid
    one uniform point in each of the ``m_axis**d`` congruent subcubes
hsfc
    ``f(H(x_i))`` averaged over ``n = 2**m`` scrambled van der Corput inputs
dnet
    scrambled Sobol' points, ``n = 2**m``
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import digitalnet
from .hilbert import map_bits, sampling_level
from .integrands import Integrand, get_integrand
from .scramble import KINDS, make_rng, scrambled_vdc_digits

METHODS = ("mc", "grid", "hsfc", "dnet")


def mc_estimate(f: Integrand, n, seed=None):
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    return float(np.mean(f(rng.random((n, f.dim)))))


def grid_points(d, m_axis, seed=None):
    """One uniform point per subcube of side ``1/m_axis``, row-major order."""
    if m_axis < 1:
        raise ValueError("m_axis must be >= 1")
    rng = make_rng(seed)
    axes = [np.arange(m_axis)] * d
    corners = np.array(np.meshgrid(*axes, indexing="ij")).reshape(d, -1).T
    return (corners + rng.random(corners.shape)) / m_axis


def grid_estimate(f: Integrand, m_axis, seed=None):
    return float(np.mean(f(grid_points(f.dim, m_axis, seed))))


def hsfc_points(d, m, kind="nested", seed=None, K=None):
    """The ``2**m`` points ``H(x_i)``, one in each Hilbert stratum."""
    if m < 0:
        raise ValueError("m must be >= 0")
    rng = make_rng(seed)
    if K is None:
        K = sampling_level(m, d)
    bits = scrambled_vdc_digits(2, m, d * K, kind, rng)
    return map_bits(bits, d, K, rng)


def hsfc_estimate(f: Integrand, m, kind="nested", seed=None, K=None):
    return float(np.mean(f(hsfc_points(f.dim, m, kind, seed, K))))


@functools.lru_cache(maxsize=None)
def _generator(path=None):
    table = None if path is None else digitalnet.load_direction_numbers(path)
    return digitalnet.generator_matrices(table)


def dnet_estimate(f: Integrand, m, kind="nested", seed=None, generator=None):
    G = generator if generator is not None else _generator()
    X = digitalnet.scrambled_sobol_batch(G, m, kind, seed, d=f.dim)
    return float(np.mean(f(X)))


# ---------------------------------------------------------------------------
# replication


@dataclass(frozen=True)
class EstimatorConfig:
    """What to estimate and how.

    `size` is n for ``mc``, the per-axis count for ``grid`` (``n = size**d``)
    and the exponent m for ``hsfc``/``dnet`` (``n = 2**m``).
    """

    method: str
    integrand: str
    dim: int
    size: int
    scramble: str = "nested"
    seed: int = 0
    table: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.scramble not in KINDS:
            raise ValueError(f"unknown scrambler {self.scramble!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        lo = 0 if self.method in ("hsfc", "dnet") else 1
        if self.size < lo:
            raise ValueError(f"{self.method} size must be >= {lo}")
        if self.method == "dnet" and self.size > digitalnet.WIDTH:
            raise ValueError(f"dnet supports m <= {digitalnet.WIDTH}")

    @property
    def n(self):
        if self.method == "mc":
            return self.size
        if self.method == "grid":
            return self.size**self.dim
        return 2**self.size

    def make_integrand(self) -> Integrand:
        return get_integrand(self.integrand, self.dim)


def derive_seed(master, *labels):
    """64-bit child seed hashed (BLAKE2b) from a master seed and labels."""
    text = "|".join([str(int(master)), *map(str, labels)])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def replication_seed(master, index):
    return derive_seed(master, "rep", int(index))


def run_one(config: EstimatorConfig, seed, f: Integrand | None = None):
    if f is None:
        f = config.make_integrand()
    if config.method == "mc":
        return mc_estimate(f, config.size, seed)
    if config.method == "grid":
        return grid_estimate(f, config.size, seed)
    if config.method == "hsfc":
        return hsfc_estimate(f, config.size, config.scramble, seed)
    return dnet_estimate(f, config.size, config.scramble, seed, _generator(config.table))


@dataclass
class ReplicationSet:
    estimates: np.ndarray
    config: EstimatorConfig
    seeds: tuple[int, ...] = field(default=())

    def __len__(self):
        return len(self.estimates)

    @property
    def R(self):
        return len(self.estimates)

    def to_dict(self):
        return {"config": asdict(self.config), "seeds": list(self.seeds),
                "estimates": self.estimates.tolist()}


def _run_chunk(args):
    config, seeds = args
    f = config.make_integrand()
    return [run_one(config, s, f) for s in seeds]


def replicate(config: EstimatorConfig, R, jobs=1) -> ReplicationSet:
    """`R` independent estimates, deterministic given ``config.seed``.

    With ``jobs > 1`` replications are spread over worker processes; results
    are always reassembled in replication-index order.
    """
    if R < 2:
        raise ValueError("need R >= 2 replications")
    seeds = tuple(replication_seed(config.seed, r) for r in range(R))
    if jobs <= 1:
        f = config.make_integrand()
        est = [run_one(config, s, f) for s in seeds]
    else:
        size = math.ceil(R / jobs)
        chunks = [seeds[i:i + size] for i in range(0, R, size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            est = list(itertools.chain.from_iterable(
                pool.map(_run_chunk, [(config, c) for c in chunks])))
    return ReplicationSet(np.asarray(est, dtype=np.float64), config, seeds)
