"""Exact d-dimensional Hilbert curve at a finite recursion level.

The codec is Skilling's transpose algorithm ("Programming the Hilbert
curve", AIP Conf. Proc. 707, 2004), vectorised over points.  Its curve
starts at the all-zero corner, and in two dimensions the level-1 cells are
visited in the order (0,0), (0,1), (1,1), (1,0).  The same top-level order
holds at every level, so the level-(K-1) curve is the coarsening of the
level-K curve.

A Hilbert index ``h`` at level ``K`` has ``d*K`` bits.  They are consumed
``d`` at a time from the top; chunk ``k`` carries bit ``K-k`` of every
coordinate in the "transposed" layout, coordinate 0 in the high bit.
Indices never need to exist as machine integers: the sampler passes the
bits of ``x`` straight through as a bit matrix.

For d = 1 the curve is the identity, ``H(x) = x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scramble import make_rng


class UnsupportedBaseError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeCell:
    level: int
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        side = 1 << self.level
        if self.level < 0 or any(not 0 <= c < side for c in self.coords):
            raise ValueError(f"coords {self.coords} outside level-{self.level} lattice")

    @property
    def dim(self):
        return len(self.coords)

    @property
    def lower(self):
        return tuple(c / (1 << self.level) for c in self.coords)


@dataclass(frozen=True)
class HilbertIndex:
    level: int
    dim: int
    h: int

    def __post_init__(self):
        if not 0 <= self.h < 1 << (self.dim * self.level):
            raise ValueError(f"index {self.h} outside [0, 2**{self.dim * self.level})")


# ---------------------------------------------------------------------------
# transpose <-> axes, vectorised.  X is an (n, d) unsigned array, K bits per column.


def _uint(K):
    return np.uint32 if K <= 32 else np.uint64


def _swap_or_invert(X, i, Q):
    # if bit Q of X[i] is set, invert the low bits of X[0]; otherwise swap
    # the low bits of X[0] and X[i]
    dt = X.dtype.type
    P = dt(Q - 1)
    hitP = ((X[:, i] >> dt(Q.bit_length() - 1)) & dt(1)) * P
    if i == 0:
        X[:, 0] ^= hitP
        return
    t = (X[:, 0] ^ X[:, i]) & (P - hitP)
    X[:, 0] ^= hitP ^ t
    X[:, i] ^= t


def _transpose_to_axes(X, K):
    X = np.array(X, dtype=_uint(K), copy=True)
    n, d = X.shape
    if K == 0 or d == 1:
        return X
    # Gray decode
    t = X[:, d - 1] >> 1
    for i in range(d - 1, 0, -1):
        X[:, i] ^= X[:, i - 1]
    X[:, 0] ^= t
    # undo excess work
    Q = 2
    while Q != (2 << (K - 1)):
        for i in range(d - 1, -1, -1):
            _swap_or_invert(X, i, Q)
        Q <<= 1
    return X


def _axes_to_transpose(X, K):
    X = np.array(X, dtype=_uint(K), copy=True)
    n, d = X.shape
    if K == 0 or d == 1:
        return X
    M = 1 << (K - 1)
    # inverse undo
    Q = M
    while Q > 1:
        for i in range(d):
            _swap_or_invert(X, i, Q)
        Q >>= 1
    # Gray encode
    for i in range(1, d):
        X[:, i] ^= X[:, i - 1]
    dt = X.dtype.type
    t = np.zeros(n, dtype=X.dtype)
    Q = M
    while Q > 1:
        t ^= ((X[:, d - 1] >> dt(Q.bit_length() - 1)) & dt(1)) * dt(Q - 1)
        Q >>= 1
    X ^= t[:, None]
    return X


def _bits_to_transpose(bits, d, K):
    """(n, d*K) bit matrix, most significant first -> (n, d) transposed form."""
    dt = _uint(K)
    bits = np.asarray(bits).reshape(-1, K, d)
    X = np.zeros((bits.shape[0], d), dtype=dt)
    for k in range(K):
        X = (X << dt(1)) | bits[:, k, :].astype(dt)
    return X


def _transpose_to_bits(X, K):
    X = np.asarray(X, dtype=np.uint64)
    n, d = X.shape
    shifts = np.arange(K - 1, -1, -1, dtype=np.uint64)
    bits = (X[:, None, :] >> shifts[None, :, None]) & np.uint64(1)
    return bits.reshape(n, K * d).astype(np.int64)


def _index_to_transpose(h, d, K):
    h = np.asarray(h, dtype=np.uint64)
    X = np.zeros((h.size, d), dtype=np.uint64)
    mask = np.uint64((1 << d) - 1)
    for k in range(K):
        chunk = (h >> np.uint64(d * (K - 1 - k))) & mask
        for t in range(d):
            X[:, t] |= ((chunk >> np.uint64(d - 1 - t)) & np.uint64(1)) << np.uint64(K - 1 - k)
    return X


def _transpose_to_index(X, K):
    X = np.asarray(X, dtype=np.uint64)
    n, d = X.shape
    h = np.zeros(n, dtype=np.uint64)
    for k in range(K):
        for t in range(d):
            h = (h << np.uint64(1)) | ((X[:, t] >> np.uint64(K - 1 - k)) & np.uint64(1))
    return h


def decode(h, d, K):
    """Cell coordinates ``(n, d)`` of level-K Hilbert indices (requires ``d*K <= 64``)."""
    if d * K > 64:
        raise ValueError("d*K > 64: pass index bits to decode_bits instead")
    h = np.atleast_1d(h)
    return _transpose_to_axes(_index_to_transpose(h, d, K), K).astype(np.int64)


def encode(coords, K):
    """Level-K Hilbert indices of integer cell coordinates ``(n, d)``."""
    coords = np.atleast_2d(np.asarray(coords))
    if coords.shape[1] * K > 64:
        raise ValueError("d*K > 64 does not fit a machine index")
    return _transpose_to_index(_axes_to_transpose(coords, K), K).astype(np.int64)


def decode_bits(bits, d, K):
    """Cell coordinates from an ``(n, d*K)`` matrix of index bits (any ``K`` < 64)."""
    return _transpose_to_axes(_bits_to_transpose(bits, d, K), K).astype(np.int64)


def encode_bits(coords, K):
    coords = np.atleast_2d(np.asarray(coords))
    return _transpose_to_bits(_axes_to_transpose(coords, K), K)


def index_to_cell(h: HilbertIndex) -> LatticeCell:
    bits = [(h.h >> (h.dim * h.level - 1 - j)) & 1 for j in range(h.dim * h.level)]
    if h.level == 0:
        return LatticeCell(0, (0,) * h.dim)
    coords = decode_bits(np.array([bits]), h.dim, h.level)[0]
    return LatticeCell(h.level, tuple(coords.tolist()))


def cell_to_index(c: LatticeCell) -> HilbertIndex:
    if c.level == 0:
        return HilbertIndex(0, c.dim, 0)
    bits = encode_bits(np.array([c.coords]), c.level)[0]
    h = 0
    for bit in bits.tolist():
        h = (h << 1) | bit
    return HilbertIndex(c.level, c.dim, h)


# ---------------------------------------------------------------------------
# point mapping


def _float_bits(x, nbits):
    """Leading binary digits of floats in [0, 1) as an ``(n, nbits)`` matrix."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any((x < 0) | (x >= 1)):
        raise ValueError("x must lie in [0, 1)")
    take = min(nbits, 53)
    # x * 2**53 is an exact integer for every double in [0, 1) that needs it
    ints = np.floor(np.ldexp(x, take)).astype(np.uint64)
    shifts = np.arange(take - 1, -1, -1, dtype=np.uint64)
    bits = ((ints[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.int64)
    if nbits > take:
        bits = np.hstack([bits, np.zeros((len(x), nbits - take), dtype=np.int64)])
    return bits


def map_bits(bits, d, K, residual=None):
    """Map index bits to points: level-K cell corner plus ``2**-K * u``.

    Parameters
    ----------
    bits : (n, d*K) int array
        Leading binary digits of the curve parameter.
    residual : Generator, seed, or array broadcastable to (n, d)
        Source of the within-cell offsets ``u`` in [0, 1)^d.
    """
    bits = np.atleast_2d(bits)
    n = bits.shape[0]
    coords = decode_bits(bits, d, K) if K > 0 else np.zeros((n, d), dtype=np.int64)
    if isinstance(residual, np.ndarray) or np.isscalar(residual):
        u = np.broadcast_to(np.asarray(residual, dtype=np.float64), (n, d))
    else:
        u = make_rng(residual).random((n, d))
    return np.ldexp(coords + u, -K)


def map_point(x, d, K, residual=None):
    """Image of ``x`` under the Hilbert map, resolved to level `K`.

    The first ``d*K`` binary digits of `x` pick the level-K cell; the point
    is uniform inside that cell.  If `x` is uniform on a level-K dyadic
    interval ``J`` the result is uniform on ``H(J)``.  Floats carry 53 bits,
    so for ``d*K > 53`` the missing digits are read as zeros; the sampler
    avoids this by passing digits directly to :func:`map_bits`.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if d == 1:
        if isinstance(residual, np.ndarray) or np.isscalar(residual):
            u = np.broadcast_to(np.asarray(residual, dtype=np.float64), x.shape)
        else:
            u = make_rng(residual).random(x.shape)
        out = (np.floor(np.ldexp(x, K)) + u)[:, None]
        out = np.ldexp(out, -K)
    else:
        out = map_bits(_float_bits(x, d * K), d, K, residual)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# strata


def geometry_level(m, d):
    """Smallest level at which every base-2 stratum of ``2**m`` is whole cells."""
    return max(math.ceil(m / d), 1)


def sampling_level(m, d):
    return math.ceil(m / d) + 8


@dataclass(frozen=True)
class Stratum:
    index: int
    base: int
    m: int
    _cells: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.index <= self.n:
            raise ValueError(f"stratum index {self.index} outside 1..{self.n}")

    @property
    def n(self):
        return self.base**self.m

    @property
    def interval(self):
        return ((self.index - 1) / self.n, self.index / self.n)

    @property
    def measure(self):
        return 1.0 / self.n


def _check_base(base):
    if base != 2:
        raise UnsupportedBaseError(
            f"Hilbert strata need dyadic intervals (base 2), got base {base}")


def stratum_cells(s: Stratum, d: int, K: int | None = None) -> list[LatticeCell]:
    """Level-K cells whose union is ``H(I_i)``; there are ``2**(d*K - m)`` of them."""
    _check_base(s.base)
    if K is None:
        K = geometry_level(s.m, d)
    if d * K < s.m:
        raise ValueError(f"level {K} too coarse for 2**{s.m} strata in d={d}")
    key = (d, K)
    if key not in s._cells:
        per = 1 << (d * K - s.m)
        h0 = (s.index - 1) * per
        coords = all_cells(d, K)[h0:h0 + per]
        s._cells[key] = [LatticeCell(K, tuple(c)) for c in coords.tolist()]
    return s._cells[key]


_ALL_CELLS: dict = {}


def all_cells(d, K):
    """Coordinates of all level-K cells in curve order, ``(2**(d*K), d)``."""
    key = (d, K)
    if key not in _ALL_CELLS:
        coords = decode(np.arange(1 << (d * K), dtype=np.uint64), d, K)
        coords.setflags(write=False)
        _ALL_CELLS[key] = coords
    return _ALL_CELLS[key]


def _union_diameter(lower, side):
    """Diameter of a union of axis-aligned cubes with integer lower corners."""
    diff = np.abs(lower[:, None, :] - lower[None, :, :]) + side
    return math.sqrt(float((diff.astype(np.float64) ** 2).sum(axis=-1).max()))


def strata_geometry(d, m, K=None):
    """Cell counts, measures and diameters for all ``2**m`` base-2 strata.

    Returns
    -------
    counts : (n,) int array
    measures : (n,) float array
    diameters : (n,) float array
    """
    if K is None:
        K = geometry_level(m, d)
    if d * K < m:
        raise ValueError(f"level {K} too coarse for 2**{m} strata in d={d}")
    n = 1 << m
    per = 1 << (d * K - m)
    coords = all_cells(d, K).reshape(n, per, d)
    counts = np.full(n, per)
    measures = np.ldexp(counts.astype(np.float64), -d * K)
    scale = 2.0**-K
    diam = np.array([_union_diameter(block, 1) for block in coords]) * scale
    return counts, measures, diam


def stratum_diameter(s: Stratum, d: int, K: int | None = None) -> float:
    _check_base(s.base)
    cells = stratum_cells(s, d, K)
    lower = np.array([c.coords for c in cells])
    return _union_diameter(lower, 1) * 2.0 ** -cells[0].level


def diameter_bound(d, n):
    """Upper bound on the diameter of the image of an interval of length 1/n."""
    return 2.0 * math.sqrt(d + 3) * n ** (-1.0 / d)
