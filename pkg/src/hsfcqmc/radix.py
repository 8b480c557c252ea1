"""Base-b digit arithmetic and the van der Corput sequence.

Digits are stored most significant first: digit ``j`` (1-based) carries
weight ``b**-j`` when the expansion is read as a point in [0, 1).  Read as
an integer ``i - 1`` the same vector holds the base-b digits least
significant first, which is exactly the radical-inverse reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DigitOverflowError(ValueError):
    """Raised when an index does not fit in the requested number of digits."""


@dataclass(frozen=True)
class DigitExpansion:
    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if len(self.digits) < 1:
            raise ValueError("a digit expansion needs at least one digit")
        object.__setattr__(self, "digits", tuple(int(a) for a in self.digits))
        for a in self.digits:
            if not 0 <= a < self.base:
                raise ValueError(f"digit {a} out of range for base {self.base}")

    def __len__(self):
        return len(self.digits)

    def __getitem__(self, j):
        return self.digits[j]


def float_digits(base: int) -> int:
    """Number of base-`base` digits that still matter in a float64."""
    return math.ceil(53 / math.log2(base))


def index_digits(i: int, b: int, L: int) -> DigitExpansion:
    """Digits ``a_1..a_L`` with ``i - 1 = sum_j a_j b**(j-1)``."""
    if i < 1:
        raise ValueError(f"index must be >= 1, got {i}")
    k = i - 1
    if k >= b**L:
        raise DigitOverflowError(f"i - 1 = {k} needs more than {L} base-{b} digits")
    out = []
    for _ in range(L):
        k, a = divmod(k, b)
        out.append(a)
    return DigitExpansion(b, tuple(out))


def _ceil_div(p: int, N: int) -> float:
    """Smallest double >= p / N (p / N in [0, 1))."""
    x = p / N  # correctly rounded for Python ints
    num, den = x.as_integer_ratio()
    if num * N < p * den:
        x = math.nextafter(x, 1.0)
    return x


def radical_inverse(digits: DigitExpansion) -> float:
    """``sum_j a_j b**-j``, rounded up to the next double when inexact.

    Rounding up keeps ``floor(b**m * x)`` equal to the digit-defined stratum
    even for bases whose fractions are not dyadic.
    """
    b = digits.base
    a = digits.digits[:float_digits(b) + 1]
    p = 0
    for d in a:
        p = p * b + d
    return _ceil_div(p, b ** len(a))


def vdc_point(i: int, b: int) -> float:
    """The i-th (1-based) van der Corput point in base `b`."""
    if i < 1:
        raise ValueError(f"index must be >= 1, got {i}")
    return radical_inverse(index_digits(i, b, _ndigits(i - 1, b)))


def _ndigits(k: int, b: int) -> int:
    n = 1
    while k >= b:
        k //= b
        n += 1
    return n


def digit_dtype(b):
    return np.uint8 if b <= 256 else np.int64


def vdc_digit_matrix(b: int, m: int, L: int | None = None) -> np.ndarray:
    """Digits of the first ``b**m`` van der Corput points as an ``(n, L)`` array.

    Row ``i - 1`` holds ``a_{i1}..a_{iL}``; columns past ``m`` are zero.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if L is None:
        L = max(m, 1)
    if L < m:
        raise DigitOverflowError(f"{b}**{m} indices need at least {m} digits, got L={L}")
    n = b**m
    k = np.arange(n, dtype=np.int64)
    out = np.zeros((n, L), dtype=digit_dtype(b))
    for j in range(m):
        k, out[:, j] = np.divmod(k, b)
    return out


def digits_to_float(digits: np.ndarray, b: int) -> np.ndarray:
    """Read each row of a digit matrix as ``sum_j d_j b**-j``.

    Only the leading ``float_digits(b) + 1`` columns can affect the result.
    Like :func:`radical_inverse`, inexact values are rounded up.
    """
    digits = np.asarray(digits)
    L = min(digits.shape[-1], float_digits(b) + 1)
    if b & (b - 1) == 0:
        # power-of-two base: Horner from the least significant end is exact
        acc = np.zeros(digits.shape[:-1], dtype=np.float64)
        for j in range(L - 1, -1, -1):
            acc = (acc + digits[..., j]) / b
        return acc
    flat = digits.reshape(-1, digits.shape[-1])[:, :L]
    N = b**L
    out = np.empty(flat.shape[0])
    for r, row in enumerate(flat.tolist()):
        p = 0
        for d in row:
            p = p * b + d
        out[r] = _ceil_div(p, N)
    return out.reshape(digits.shape[:-1])


def vdc_points(b: int, m: int) -> np.ndarray:
    """The first ``b**m`` van der Corput points in base `b`."""
    return digits_to_float(vdc_digit_matrix(b, m), b)
