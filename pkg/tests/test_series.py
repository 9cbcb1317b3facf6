from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import tau as tau_oracle
from qinvert.arith import LaurentRing, QLaurent, ScalarRing
from qinvert.errors import DomainError
from qinvert.inversion import right_inverse
from qinvert.phi import PhiSpec
from qinvert.series import (TruncatedSeries, apply_U, project_Pk, q_dilate, reciprocal_one_minus,
                            series_derivative, series_divide, series_mul)

R = ScalarRing(None)
LR = LaurentRing()


def S(values, order=None, ring=R):
    return TruncatedSeries.from_list(values, ring, order)


fracs = st.fractions(min_value=-9, max_value=9, max_denominator=6)
series_lists = st.lists(fracs, min_size=1, max_size=9)


def test_multiplication_examples():
    assert series_mul(S([1, 1], 2), S([1, -1], 2)).equals(S([1, 0, -1]))
    assert series_mul(S([0, 1], 1), S([0, 1], 1)).equals(S([0, 0], 1))
    assert series_mul(S([1, 1, 1]), S([1, 1], 2)).equals(S([1, 2, 2]))


def test_dilation_examples():
    a = S([0, 1, 1], ring=LR)
    d = q_dilate(a, 1)
    assert d.coeffs[1] == QLaurent({-1: 1}) and d.coeffs[2] == QLaurent({-2: 1})
    assert q_dilate(a, 0) is a
    assert q_dilate(q_dilate(a, 1), -1).equals(a)


def test_renewal_examples():
    ones = reciprocal_one_minus(S([0, 1], 6))
    assert all(c == 1 for c in ones.coeffs)
    half = reciprocal_one_minus(S([0, Fraction(1, 2), Fraction(1, 2)], 3))
    assert list(half.coeffs) == [1, Fraction(1, 2), Fraction(3, 4), Fraction(5, 8)]
    assert list(reciprocal_one_minus(S([0], 3)).coeffs) == [1, 0, 0, 0]
    with pytest.raises(DomainError):
        reciprocal_one_minus(S([1, 1]))


def test_projection_examples():
    assert project_Pk(S([1, 1, 1]), 2).equals(S([1, 1, 0]))
    assert project_Pk(S([5, 1, 1]), 0).equals(S([0, 0, 0]))
    p = QLaurent({-1: 2, 0: 1, 3: 4})
    assert project_Pk(p, 3) == QLaurent({0: 1})


def test_division_examples():
    assert series_divide(S([1], 3), S([1, -1], 3)).equals(S([1, 1, 1, 1]))
    assert series_divide(S([0, 1, 1], 3), S([1, 1], 3)).equals(S([0, 1, 0, 0]))
    with pytest.raises(DomainError):
        series_divide(S([1]), S([0, 1]))


def test_derivative_examples():
    assert series_derivative(S([0, 0, 1])).equals(S([0, 2]))
    assert series_derivative(S([7])).equals(S([0]))
    assert series_derivative(S([1, 1, 1, 1])).equals(S([1, 2, 3]))


def test_apply_U_examples():
    ring = ScalarRing(Fraction(1, 3))
    N = 6
    f = S([0, 1], N, ring)
    assert apply_U(f, 1, S([1], N, ring)).equals(TruncatedSeries.monomial(0, ring, N))
    for k in range(N + 1):
        out = apply_U(f, 1, TruncatedSeries.monomial(k, ring, N))
        assert out.equals(TruncatedSeries.monomial(k, ring, N, ring.q ** (k * (k - 1) // 2)))


@pytest.mark.parametrize("q", [Fraction(1, 2), Fraction(3, 1)])
def test_apply_U_round_trip(q):
    # U_{g,1/q} undoes U_{f,q} when g is the right inverse of f = z(1 - z)
    N = 6
    ring = ScalarRing(q)
    f = S([0, 1, -1], N, ring)
    g = right_inverse(PhiSpec.catalan(), N, mode="numeric", q=q).g
    for k in range(N + 1):
        zk = TruncatedSeries.monomial(k, ring, N)
        assert apply_U(g, -1, apply_U(f, 1, zk)).equals(zk)


@given(series_lists, series_lists)
def test_product_commutes_and_truncates(a, b):
    n = min(len(a), len(b)) - 1
    x, y = S(a, n), S(b, n)
    assert series_mul(x, y).equals(series_mul(y, x))
    assert series_mul(x, y).order == n


@given(series_lists, series_lists, st.integers(-3, 3))
def test_dilation_is_multiplicative(a, b, k):
    n = min(len(a), len(b)) - 1
    ring = ScalarRing(Fraction(2, 5))
    x, y = S(a, n, ring), S(b, n, ring)
    assert q_dilate(series_mul(x, y), k).equals(series_mul(q_dilate(x, k), q_dilate(y, k)))


@given(series_lists, series_lists)
def test_division_multiplies_back(a, b):
    n = min(len(a), len(b)) - 1
    b = [Fraction(1) + abs(b[0])] + b[1:]
    x, y = S(a, n), S(b, n)
    assert series_mul(series_divide(x, y), y).equals(x)


@given(st.lists(st.fractions(min_value=0, max_value=3, max_denominator=5), min_size=1, max_size=6))
def test_renewal_matches_oracle(phis):
    n = 10
    got = reciprocal_one_minus(S([0] + phis, n)).coeffs
    assert list(got) == tau_oracle(phis, n)


@given(series_lists, st.integers(0, 10))
def test_projection_is_idempotent(a, k):
    x = S(a)
    assert project_Pk(project_Pk(x, k), k).equals(project_Pk(x, k))


@given(series_lists, series_lists)
def test_derivative_product_rule(a, b):
    n = min(len(a), len(b)) - 1
    x, y = S(a, n), S(b, n)
    lhs = series_derivative(series_mul(x, y))
    rhs = series_mul(series_derivative(x), y.truncate(max(n - 1, 0))) + \
        series_mul(x.truncate(max(n - 1, 0)), series_derivative(y))
    assert lhs.equals(rhs)
