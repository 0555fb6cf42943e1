import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from curlspec.exact import ExactReal, squarefree_decomposition


@pytest.mark.parametrize("n,expected", [(1, (1, 1)), (8, (2, 2)), (12, (2, 3)), (50, (5, 2)), (7, (1, 7)), (360, (6, 10))])
def test_squarefree_decomposition(n, expected):
    assert squarefree_decomposition(n) == expected


@given(st.integers(1, 10**6))
def test_squarefree_roundtrip(n):
    s, t = squarefree_decomposition(n)
    assert s * s * t == n
    assert all(t % (p * p) for p in range(2, math.isqrt(t) + 1))


def test_sqrt_and_float():
    r = ExactReal.sqrt(Fraction(1, 2))
    assert str(r) == "1/2*sqrt(2)"
    assert math.isclose(float(r), math.sqrt(0.5))
    assert ExactReal.sqrt(4) == 2


def test_string_forms_roundtrip():
    values = [ExactReal(-2, 1, 2), ExactReal(Fraction(1, 6), -2), ExactReal(3), ExactReal(0), ExactReal(Fraction(5, 7), 3, 11)]
    for v in values:
        assert ExactReal.parse(str(v)) == v
    assert str(ExactReal(-2, 1, 2)) == "-2*pi*sqrt(2)"
    assert str(ExactReal(Fraction(1, 6), -2)) == "1/6*pi^-2"


@given(
    st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10**4),
    st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10**4),
)
def test_order_matches_floats(a, b):
    x, y = ExactReal.sqrt(a), ExactReal.sqrt(b)
    if a != b:
        assert (x < y) == (math.sqrt(a) < math.sqrt(b))
    else:
        assert x == y


def test_arithmetic():
    two_pi = ExactReal(2, 1)
    lam = two_pi * ExactReal.sqrt(2)
    assert lam / Fraction(2) == ExactReal(1, 1, 2)
    assert -lam < 0 < lam
    assert abs(-lam) == lam
    assert ExactReal.sqrt(2) * ExactReal.sqrt(2) == 2
    assert hash(ExactReal(2)) == hash(ExactReal.parse("2"))
