import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hsfcqmc.radix import (DigitExpansion, DigitOverflowError, digits_to_float, float_digits,
                           index_digits, radical_inverse, vdc_digit_matrix, vdc_point, vdc_points)


def division_oracle(k, b, L):
    out = []
    for _ in range(L):
        out.append(k % b)
        k //= b
    return out


def reversal_oracle(i, b):
    """Radical inverse by writing i-1 as a base-b string, reversing it, reading a fraction."""
    k, digits = i - 1, []
    while True:
        digits.insert(0, k % b)
        k //= b
        if k == 0:
            break
    return sum(Fraction(a, b**j) for j, a in enumerate(reversed(digits), start=1))


@pytest.mark.parametrize("i,b,L,expected", [
    (1, 2, 4, [0, 0, 0, 0]),
    (4, 2, 4, [1, 1, 0, 0]),
    (3, 3, 2, [2, 0]),
])
def test_index_digits_examples(i, b, L, expected):
    assert list(index_digits(i, b, L).digits) == expected


def test_index_digits_overflow():
    with pytest.raises(DigitOverflowError):
        index_digits(17, 2, 4)
    assert list(index_digits(16, 2, 4).digits) == [1, 1, 1, 1]


def test_bad_index_rejected():
    with pytest.raises(ValueError):
        index_digits(0, 2, 3)
    with pytest.raises(ValueError):
        vdc_point(0, 2)


def test_expansion_validates_digits():
    with pytest.raises(ValueError):
        DigitExpansion(2, (0, 2))
    with pytest.raises(ValueError):
        DigitExpansion(1, (0,))
    with pytest.raises(ValueError):
        DigitExpansion(3, ())


@pytest.mark.parametrize("digits,b,expected", [
    ([0, 0, 0, 0], 2, 0.0),
    ([1, 1, 0, 0], 2, 0.75),
    ([2, 0], 3, 2 / 3),
])
def test_radical_inverse_examples(digits, b, expected):
    assert radical_inverse(DigitExpansion(b, tuple(digits))) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("i,expected", [(1, 0.0), (2, 0.5), (6, 0.625)])
def test_vdc_examples(i, expected):
    assert vdc_point(i, 2) == expected


@given(st.integers(1, 10**6), st.integers(2, 11))
def test_vdc_matches_string_reversal(i, b):
    assert vdc_point(i, b) == pytest.approx(float(reversal_oracle(i, b)), abs=1e-15)


@given(st.integers(0, 10**6), st.integers(2, 9), st.integers(0, 4))
def test_index_digits_matches_division(k, b, extra):
    L = max(1, math.ceil(math.log(k + 1, b) + 1e-12)) + extra
    if k >= b**L:
        L += 1
    assert list(index_digits(k + 1, b, L).digits) == division_oracle(k, b, L)


@given(st.integers(2, 7), st.integers(1, 6))
def test_round_trip_injective(b, L):
    values = {radical_inverse(index_digits(i, b, L)) for i in range(1, b**L + 1)}
    assert len(values) == b**L


@given(st.integers(2, 7), st.integers(1, 5), st.data())
def test_monotone_refinement(b, L, data):
    i = data.draw(st.integers(1, b**L))
    assert radical_inverse(index_digits(i, b, L)) == radical_inverse(index_digits(i, b, L + 1))


@pytest.mark.parametrize("b,mmax", [(2, 12), (3, 12), (5, 8)])
def test_net_property(b, mmax):
    # 5**12 points is out of reach for a unit test; the scalar check below covers it
    for m in range(mmax + 1):
        x = vdc_points(b, m)
        cells = np.floor(x * b**m).astype(np.int64)
        assert np.array_equal(np.sort(cells), np.arange(b**m))


@pytest.mark.parametrize("b", [3, 5])
def test_net_property_m12_scalar_path(b):
    # spot check with exact scalar arithmetic at the top of the range
    m = 12
    n = b**m
    rng = np.random.default_rng(0)
    idx = rng.choice(n, 2000, replace=False) + 1
    for i in idx.tolist():
        assert math.floor(vdc_point(i, b) * n) == math.floor(reversal_oracle(i, b) * n)


def test_digit_matrix_agrees_with_scalar():
    for b, m in [(2, 6), (3, 4), (7, 2)]:
        A = vdc_digit_matrix(b, m, m + 3)
        assert A.shape == (b**m, m + 3)
        assert not A[:, m:].any()
        for i in range(1, b**m + 1):
            assert list(A[i - 1]) == list(index_digits(i, b, m + 3).digits)
        assert np.allclose(digits_to_float(A, b), [vdc_point(i, b) for i in range(1, b**m + 1)])


def test_digit_matrix_too_short():
    with pytest.raises(DigitOverflowError):
        vdc_digit_matrix(2, 5, 3)


def test_float_digits():
    assert float_digits(2) == 53
    assert float_digits(3) == 34
    assert float_digits(256) == 7
