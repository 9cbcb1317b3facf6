import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qinvert.arith import LaurentRing, QLaurent, ScalarRing
from qinvert.errors import ConfigError, DomainError, FormalSolutionError, InvalidQ, IrrationalRootWarning
from qinvert.formal import (borel_1_over_q, borel_1_over_q_inverse, borel_q, divergent_h_recursion,
                            format_polynomial, g_kappa, parse_polynomial, q_extremal_zeros,
                            verify_formal_solution)
from qinvert.inversion import right_inverse
from qinvert.phi import PhiSpec
from qinvert.series import TruncatedSeries

HALF_Q = Fraction(1, 2)
F = [0, 1, -1]  # z - z^2


def test_polynomial_text():
    assert parse_polynomial("z-z^2") == [0, 1, -1]
    assert parse_polynomial("z - 1/2*z^3 + 2") == [2, 1, 0, Fraction(-1, 2)]
    assert format_polynomial([0, 1, -1]) == "z-z^2"
    assert format_polynomial([Fraction(1, 3), 0, 2]) == "1/3+2*z^2"
    for bad in ("", "z^", "z+", "3q"):
        with pytest.raises(ConfigError):
            parse_polynomial(bad)


def test_extremal_zero_examples():
    (root,) = q_extremal_zeros(F, HALF_Q)
    assert root.kappa == 1 and root.extremal and root.exact
    assert q_extremal_zeros([0, 1], HALF_Q) == []
    f = [0, 1, Fraction(-3, 2), Fraction(1, 2)]  # z(1 - z)(1 - z/2)
    verdict = {r.kappa: r.extremal for r in q_extremal_zeros(f, HALF_Q)}
    assert verdict == {1: False, 2: True}


def test_extremal_zero_guards():
    with pytest.raises(InvalidQ):
        q_extremal_zeros(F, 2)
    with pytest.raises(DomainError):
        q_extremal_zeros([0, 2, 1], HALF_Q)


def test_irrational_roots_warn():
    # z(1 - z - z^2): roots (-1 +- sqrt 5)/2
    with pytest.warns(IrrationalRootWarning):
        roots = q_extremal_zeros([0, 1, -1, -1], HALF_Q)
    ks = sorted(float(r.kappa) for r in roots)
    assert ks == pytest.approx([(-1 - math.sqrt(5)) / 2, (-1 + math.sqrt(5)) / 2], rel=1e-14)
    assert not any(r.exact for r in roots)


def test_g_kappa_solves_the_equation_exactly():
    g = g_kappa(F, 1, HALF_Q, 8)
    assert g.coeffs[0] == 1
    assert verify_formal_solution(g, F).exactly_zero


def test_g_kappa_first_denominator_coefficient():
    # h_1 = 1/f(kappa/q); g_1 = kappa (h_1/q - h_1)
    g = g_kappa(F, 1, HALF_Q, 3)
    h1 = 1 / Fraction(2 - 4)
    assert g.coeffs[1] == h1 / HALF_Q - h1


def test_negative_control():
    ring = ScalarRing(HALF_Q)
    g = TruncatedSeries.from_list([0, 1, 1], ring, 8)
    assert not verify_formal_solution(g, F).exactly_zero


def test_non_extremal_kappa_is_refused():
    f = [0, 1, Fraction(-3, 2), Fraction(1, 2)]
    with pytest.raises(FormalSolutionError):
        g_kappa(f, 1, HALF_Q, 4)


def test_right_inverse_passes_the_verifier():
    for cs in (["1/2", "1/2"], ["1/3", 0, "2/3"], [1]):
        spec = PhiSpec.explicit(cs)
        g = right_inverse(spec, 10, mode="numeric", q=Fraction(1, 3)).g
        assert verify_formal_solution(g, spec).exactly_zero


def test_infinite_f_with_nonzero_constant_is_refused():
    g = g_kappa(F, 1, HALF_Q, 4)
    with pytest.raises(FormalSolutionError):
        verify_formal_solution(g, PhiSpec.exponential(1))


@given(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4),
       st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)]))
def test_g_kappa_for_random_rational_roots(r, q):
    # f = z (1 - z/r)(1 + z) has roots r and -1
    f = [0, 1, 1 - 1 / r, -1 / r]
    for root in q_extremal_zeros(f, q):
        if root.extremal:
            g = g_kappa(f, root.kappa, q, 6)
            assert g.coeffs[0] == root.kappa
            assert verify_formal_solution(g, f).exactly_zero


def test_divergent_h_growth():
    h = divergent_h_recursion(PhiSpec.catalan(), HALF_Q, 60)
    assert h.all_positive
    assert abs(h.growth_ratio - 1) < 0.1
    hf = divergent_h_recursion(PhiSpec.catalan(), 0.5, 60)
    assert hf.growth_ratio == pytest.approx(h.growth_ratio, rel=1e-12)


def test_divergent_h_trivial_and_bounded_cases():
    zero = divergent_h_recursion(PhiSpec.explicit([]), HALF_Q, 10)
    assert zero.coeffs[0] == 1 and all(c == 0 for c in zero.coeffs[1:])
    assert divergent_h_recursion(PhiSpec.catalan(), Fraction(2), 60).root_sup <= 2
    with pytest.raises(InvalidQ):
        divergent_h_recursion(PhiSpec.catalan(), 1, 5)


def test_borel_examples():
    lr = LaurentRing()
    z = TruncatedSeries.from_list([0, 1], lr, 4)
    assert borel_1_over_q(z).equals(z)
    roofed = TruncatedSeries(tuple(QLaurent.monomial(-(n * (n - 1) // 2)) for n in range(6)), lr)
    assert all(c == 1 for c in borel_1_over_q(roofed).coeffs)
    g = right_inverse(PhiSpec.catalan(), 6).g
    assert borel_1_over_q_inverse(borel_1_over_q(g)).equals(g)


def test_unroofing_the_right_inverse_gives_t():
    spec = PhiSpec.explicit(["1/2", "1/2"])
    res = right_inverse(spec, 8)
    b = borel_1_over_q(res.g)
    for n in range(7):
        assert b.coeffs[n + 1] == res.t[n]


def test_borel_q_examples():
    out = borel_q([0, 1], 2.0)
    assert out.coeffs[0] == 0 and out.coeffs[1] == pytest.approx(2 ** -0.5, rel=1e-15)
    assert borel_q([3, 0], 2.0).coeffs[0] == 3
    coeffs = [1 / math.factorial(j) for j in range(1, 40)]
    damped = borel_q([0] + coeffs, 2.0).coeffs
    assert abs(damped[12]) < 1e-15
    total = math.fsum(damped)
    ref = math.fsum(2 ** (-j * j / 2) / math.factorial(j) for j in range(1, 40))
    assert total == pytest.approx(ref, rel=1e-15)
    with pytest.raises(InvalidQ):
        borel_q([0, 1], 0.5)
