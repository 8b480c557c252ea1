"""Nested uniform and linear scrambling of base-b digit expansions.

Two entry points per scrambler kind:

* ``NestedScrambler`` / ``LinearScrambler`` act on a single
  :class:`~hsfcqmc.radix.DigitExpansion` and keep their random state for
  their whole lifetime, so the same prefix always meets the same permutation.
* :func:`scramble_digits` acts on a whole ``(n, L)`` digit matrix in one shot.
  It draws the permutation tree level by level for the prefixes actually
  present, which is what the estimators use.

Permutations are keyed by the *original* digit prefix.  Below the scrambled
depth every digit is replaced by an independent uniform draw.  That is
exactly the law of the infinite tree: an unvisited node's permutation sends
any fixed digit to a uniform digit, independently of everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .radix import DigitExpansion, digits_to_float, float_digits, vdc_digit_matrix

KINDS = ("nested", "linear")


class BaseMismatchError(ValueError):
    pass


def make_rng(seed=None) -> np.random.Generator:
    """Counter-based generator (Philox) from an int, SeedSequence or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


class NestedScrambler:
    """Nested uniform scrambling with a lazily grown permutation tree.

    Parameters
    ----------
    base : int
    depth : int
        Number of digit levels scrambled through the tree.
    seed : optional
        Anything :func:`make_rng` accepts.
    uniform_tail : bool
        If True, digits deeper than `depth` are replaced by uniform draws.
        If False they are passed through unchanged.
    """

    def __init__(self, base, depth, seed=None, uniform_tail=True):
        if base < 2:
            raise ValueError("base must be >= 2")
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.base = base
        self.depth = depth
        self.seed = seed
        self.uniform_tail = uniform_tail
        self._rng = make_rng(seed)
        self.permutations: dict[tuple[int, ...], np.ndarray] = {}

    def permutation(self, prefix):
        prefix = tuple(int(a) for a in prefix)
        perm = self.permutations.get(prefix)
        if perm is None:
            perm = self._rng.permutation(self.base)
            self.permutations[prefix] = perm
        return perm

    def set_permutation(self, prefix, perm):
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.base)):
            raise ValueError(f"{perm.tolist()} is not a permutation of 0..{self.base - 1}")
        self.permutations[tuple(int(a) for a in prefix)] = perm

    def scramble(self, digits: DigitExpansion) -> DigitExpansion:
        if digits.base != self.base:
            raise BaseMismatchError(f"scrambler base {self.base} != digits base {digits.base}")
        if len(digits) < self.depth:
            raise ValueError(f"need at least {self.depth} digits, got {len(digits)}")
        a = digits.digits
        out = [int(self.permutation(a[:j])[a[j]]) for j in range(self.depth)]
        tail = a[self.depth:]
        if self.uniform_tail and tail:
            tail = tuple(self._rng.integers(0, self.base, len(tail)).tolist())
        return DigitExpansion(self.base, tuple(out) + tuple(tail))

    __call__ = scramble


def nested_scramble(s: NestedScrambler, digits: DigitExpansion) -> DigitExpansion:
    return s.scramble(digits)


@dataclass
class LinearScrambler:
    """Random linear scrambling: ``(C a + e) mod b`` on the leading digits.

    `matrix` is lower triangular with diagonal entries in ``1..b-1``.
    """

    base: int
    matrix: np.ndarray
    shift: np.ndarray
    seed: object = None
    uniform_tail: bool = True
    _rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        C = np.asarray(self.matrix, dtype=np.int64)
        e = np.asarray(self.shift, dtype=np.int64)
        L = C.shape[0]
        if C.shape != (L, L) or e.shape != (L,):
            raise ValueError("matrix must be square and match the shift length")
        if np.any(np.triu(C, 1)):
            raise ValueError("matrix must be lower triangular")
        diag = np.diag(C)
        if np.any((diag < 1) | (diag >= self.base)):
            raise ValueError("diagonal entries must lie in 1..base-1")
        if np.any((C < 0) | (C >= self.base)) or np.any((e < 0) | (e >= self.base)):
            raise ValueError("entries must be digits of the base")
        self.matrix, self.shift = C, e
        if self._rng is None:
            self._rng = make_rng(self.seed)

    @property
    def depth(self):
        return self.matrix.shape[0]

    @classmethod
    def random(cls, base, depth, seed=None, uniform_tail=True):
        rng = make_rng(seed)
        C = np.tril(rng.integers(0, base, (depth, depth)), -1)
        C[np.diag_indices(depth)] = rng.integers(1, base, depth)
        e = rng.integers(0, base, depth)
        return cls(base, C, e, seed=seed, uniform_tail=uniform_tail, _rng=rng)

    @classmethod
    def identity(cls, base, depth, shift=None):
        if shift is None:
            shift = np.zeros(depth, dtype=np.int64)
        return cls(base, np.eye(depth, dtype=np.int64), shift, uniform_tail=False)

    def scramble_array(self, A):
        """Scramble every row of an ``(n, L)`` digit matrix with ``L >= depth``."""
        A = np.asarray(A)
        n, L = A.shape
        Ls = self.depth
        if L < Ls:
            raise ValueError(f"need at least {Ls} digits, got {L}")
        lead = A[:, :Ls]
        # Skip all-zero input columns; van der Corput digits past m vanish.
        used = np.flatnonzero(lead.any(axis=0))
        out = np.empty_like(A)
        lead = lead[:, used].astype(np.int64)
        out[:, :Ls] = (lead @ self.matrix[:, used].T + self.shift) % self.base
        if L > Ls:
            if self.uniform_tail:
                out[:, Ls:] = self._rng.integers(0, self.base, (n, L - Ls), dtype=A.dtype)
            else:
                out[:, Ls:] = A[:, Ls:]
        return out

    def scramble(self, digits: DigitExpansion) -> DigitExpansion:
        if digits.base != self.base:
            raise BaseMismatchError(f"scrambler base {self.base} != digits base {digits.base}")
        row = self.scramble_array(np.asarray(digits.digits)[None, :])[0]
        return DigitExpansion(self.base, tuple(row.tolist()))

    __call__ = scramble


def linear_scramble(s: LinearScrambler, digits: DigitExpansion) -> DigitExpansion:
    return s.scramble(digits)


def nested_scramble_array(A, base, depth, rng, uniform_tail=True):
    """Nested uniform scrambling of all rows of `A` with one fresh tree.

    Equivalent in law to ``NestedScrambler(base, depth)`` applied row by row,
    but only the tree nodes reached by some row are drawn, level by level.
    """
    A = np.asarray(A)
    dt = A.dtype
    n, L = A.shape
    depth = min(depth, L)
    out = A.copy()
    group = np.zeros(n, dtype=np.int64)
    ngroups = 1
    for j in range(depth):
        if ngroups == n:
            # every prefix is distinct, so each remaining node is fresh
            out[:, j:depth] = rng.integers(0, base, (n, depth - j), dtype=dt)
            break
        col = A[:, j]
        if base == 2:
            out[:, j] = col ^ rng.integers(0, 2, ngroups, dtype=dt)[group]
        else:
            perms = rng.permuted(np.tile(np.arange(base, dtype=dt), (ngroups, 1)), axis=1)
            out[:, j] = perms[group, col]
        _, group = np.unique(group * base + col, return_inverse=True)
        group = group.ravel()
        ngroups = int(group.max()) + 1
    if uniform_tail and L > depth:
        out[:, depth:] = rng.integers(0, base, (n, L - depth), dtype=dt)
    return out


def scramble_digits(A, base, kind, seed=None, depth=None):
    """Scramble a digit matrix with a freshly drawn scrambler of `kind`."""
    A = np.asarray(A)
    if depth is None:
        depth = A.shape[1]
    rng = make_rng(seed)
    if kind == "nested":
        return nested_scramble_array(A, base, depth, rng)
    if kind == "linear":
        return LinearScrambler.random(base, depth, rng).scramble_array(A)
    raise ValueError(f"unknown scrambler kind {kind!r}; expected one of {KINDS}")


def scrambled_vdc_digits(b, m, depth, kind="nested", seed=None):
    """Scrambled digits of the first ``b**m`` van der Corput points, ``(n, depth)``."""
    depth = max(depth, m)
    return scramble_digits(vdc_digit_matrix(b, m, depth), b, kind, seed)


def scrambled_vdc_batch(b, m, kind="nested", seed=None):
    """The first ``n = b**m`` scrambled van der Corput points as floats.

    Points come out in generation order; exactly one falls in each
    ``[(k-1)/n, k/n)``.
    """
    rng = make_rng(seed)
    depth = max(m, float_digits(b))
    digits = scrambled_vdc_digits(b, m, depth, kind, rng)
    x = digits_to_float(digits, b)
    # uniform-tail completion below the last kept digit
    x += rng.random(len(x)) * float(b) ** -depth
    return np.minimum(x, np.nextafter(1.0, 0.0))
