"""Binary Sobol' points with nested or linear scrambling.

Direction numbers are read from the usual Joe--Kuo text layout::

    d  s  a  m_1 .. m_s

one record per dimension starting at 2; dimension 1 is the van der Corput
sequence (identity generator matrix).  A table for dimensions up to 16
ships with the package.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .scramble import make_rng, scramble_digits

WIDTH = 32


class DirectionNumbersError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class DirectionRecord:
    dim: int
    degree: int
    coeff: int
    m: tuple[int, ...]


@dataclass(frozen=True)
class DirectionNumbersTable:
    records: tuple[DirectionRecord, ...] = ()

    @property
    def max_dim(self):
        return 1 + len(self.records)


def load_direction_numbers(source) -> DirectionNumbersTable:
    """Parse direction numbers from a text stream, a string, or a path."""
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()

    records = []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        fields = line.split()
        if not fields or line.lstrip().startswith("#"):
            continue
        try:
            values = [int(f) for f in fields]
        except ValueError:
            if not records and lineno == 1:
                continue  # header
            raise DirectionNumbersError(f"non-integer field in {line.strip()!r}", lineno)
        if len(values) < 4:
            raise DirectionNumbersError(f"record too short: {line.strip()!r}", lineno)
        dim, s, a, *m = values
        expected = len(records) + 2
        if dim != expected:
            raise DirectionNumbersError(f"expected dimension {expected}, got {dim}", lineno)
        if s < 1 or len(m) != s:
            raise DirectionNumbersError(f"degree {s} needs {s} initial values, got {len(m)}", lineno)
        if not 0 <= a < 1 << (s - 1):
            raise DirectionNumbersError(f"coefficient {a} out of range for degree {s}", lineno)
        for j, mj in enumerate(m, start=1):
            if mj % 2 == 0 or not 0 < mj < 1 << j:
                raise DirectionNumbersError(f"m_{j} = {mj} must be odd and below 2**{j}", lineno)
        records.append(DirectionRecord(dim, s, a, tuple(m)))
    return DirectionNumbersTable(tuple(records))


def default_table() -> DirectionNumbersTable:
    text = resources.files("hsfcqmc").joinpath("data/new-joe-kuo-16.txt").read_text()
    return load_direction_numbers(text)


@dataclass(frozen=True)
class GeneratorMatrices:
    """Columns of the binary generator matrices as W-bit integers.

    ``columns[t, k]`` is column ``k`` of the matrix for coordinate ``t``; its
    most significant bit is row 1.
    """

    columns: np.ndarray
    width: int = WIDTH

    @property
    def dim(self):
        return self.columns.shape[0]

    def matrix(self, t):
        """Coordinate `t`'s matrix as a ``(W, W)`` 0/1 array."""
        W = self.width
        shifts = np.arange(W - 1, -1, -1, dtype=np.uint64)
        return ((self.columns[t][None, :] >> shifts[:, None]) & np.uint64(1)).astype(np.int64)


def generator_matrices(table: DirectionNumbersTable | None = None, d=None, width=WIDTH):
    if table is None:
        table = default_table()
    if d is None:
        d = table.max_dim
    if d > table.max_dim:
        raise ValueError(f"table only covers {table.max_dim} dimensions, asked for {d}")
    if width > 52:
        raise ValueError("width must fit in a double's mantissa")
    cols = np.zeros((d, width), dtype=np.uint64)
    for k in range(width):
        cols[0, k] = 1 << (width - 1 - k)
    for t in range(1, d):
        rec = table.records[t - 1]
        s, a = rec.degree, rec.coeff
        m = list(rec.m)
        for k in range(s, width):
            new = m[k - s] ^ (m[k - s] << s)
            for j in range(1, s):
                if (a >> (s - 1 - j)) & 1:
                    new ^= m[k - j] << j
            m.append(new)
        for k in range(width):
            cols[t, k] = m[k] << (width - 1 - k)
    return GeneratorMatrices(cols, width)


def sobol_integers(G: GeneratorMatrices, m: int) -> np.ndarray:
    """Unscrambled first ``2**m`` points as W-bit integers, ``(n, d)``."""
    if m > G.width:
        raise OverflowError(f"2**{m} points exceed the {G.width}-bit generator")
    k = np.arange(1 << m, dtype=np.uint64)
    out = np.zeros((k.size, G.dim), dtype=np.uint64)
    for bit in range(m):
        on = ((k >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        out[on] ^= G.columns[:, bit]
    return out


def sobol_point(i: int, G: GeneratorMatrices) -> np.ndarray:
    if i < 1:
        raise ValueError("i must be >= 1")
    k = i - 1
    if k >= 1 << G.width:
        raise OverflowError(f"index {i} exceeds 2**{G.width}")
    acc = np.zeros(G.dim, dtype=np.uint64)
    bit = 0
    while k:
        if k & 1:
            acc ^= G.columns[:, bit]
        k >>= 1
        bit += 1
    return np.ldexp(acc.astype(np.float64), -G.width)


def sobol_points(G: GeneratorMatrices, m: int) -> np.ndarray:
    return np.ldexp(sobol_integers(G, m).astype(np.float64), -G.width)


def _int_to_bits(v, width):
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((v[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


def scrambled_sobol_batch(G: GeneratorMatrices, m: int, kind="nested", seed=None, d=None):
    """First ``2**m`` Sobol' points, each coordinate scrambled independently.

    Every coordinate gets its own scrambler over all W digits, then a uniform
    draw fills in below ``2**-W``.
    """
    if d is None:
        d = G.dim
    if d > G.dim:
        raise ValueError(f"generator has {G.dim} dimensions, asked for {d}")
    rng = make_rng(seed)
    W = G.width
    ints = sobol_integers(G, m)
    weights = np.ldexp(1.0, -np.arange(1, W + 1))
    out = np.empty((ints.shape[0], d))
    for t in range(d):
        bits = scramble_digits(_int_to_bits(ints[:, t], W), 2, kind, rng)
        out[:, t] = bits @ weights
    out += rng.random(out.shape) * 2.0**-W
    return out
