from math import comb

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import L_direct, partitions_count
from qinvert.tuples import (L, L_alt, L_alt_array, L_array, L_raise_delta, L_transpose_delta,
                            L_value, composition_array, compositions, conjugate, delta_statistic,
                            partition_numbers, raise_op, transpose, verify_min_lemmas,
                            verify_transform_identities)

compositions_st = st.lists(st.integers(0, 6), min_size=1, max_size=7)


def partitions_st():
    return st.lists(st.integers(1, 7), min_size=1, max_size=7).map(lambda xs: sorted(xs, reverse=True))


def test_L_examples():
    assert L((7,)) == 0
    assert L((4, 1)) == 5
    assert L((1, 1, 1)) == 6
    assert L((0, 0, 0, 4)) == 12


def test_operator_examples():
    assert raise_op((1, 2, 3, 4, 5, 6, 7), 2, 5) == (1, 3, 3, 4, 4, 6, 7)
    assert raise_op((0, 1), 1, 2) == (1, 0)
    assert transpose((1, 2, 3, 4, 5, 6, 7), 2, 5) == (1, 5, 3, 4, 2, 6, 7)
    assert transpose((3, 8), 1, 2) == (8, 3)
    assert L_raise_delta((1, 1), 1, 2) == 2
    assert L_raise_delta((2, 1), 1, 2) == 3
    with pytest.raises(ValueError):
        raise_op((1, 0), 1, 2)


def test_conjugate_and_delta_examples():
    assert conjugate((3, 1)) == (2, 1, 1)
    assert conjugate((5,)) == (1,) * 5
    assert delta_statistic((3, 1)) == 2
    assert delta_statistic((2, 1)) == 0
    assert delta_statistic((6,)) == comb(6, 2)
    with pytest.raises(ValueError):
        delta_statistic((1, 2))


def test_lower_bounds_small_cases():
    rep = verify_min_lemmas(5, 3)
    assert rep.ok and rep.argmin == [(5, 0, 0)]
    assert (4, 1, 0) in rep.argmin_proper and rep.min_value_proper == 5
    one = verify_min_lemmas(1, 1)
    assert one.min_value == 0 and one.argmin == [(1,)]


def test_corrected_lower_bounds_exhaustive():
    for n in range(0, 15):
        for i in range(1, 9):
            assert verify_min_lemmas(n, i).ok, (n, i)


def test_literal_lower_bound_counterexamples():
    rep = verify_min_lemmas(3, 3)
    # a second minimiser of the proper minimum and a k = 1 failure of the lower bound
    assert (0, 3, 0) in rep.argmin_proper and L((0, 3, 0)) == 3
    assert (3, 0, 0) in rep.lower_bound_failures_k1
    assert not rep.literal_ok
    # the largest L is not always at (0, ..., 0, n)
    assert L((1, 2)) == 4 > L((0, 3)) == 3
    assert not verify_min_lemmas(3, 2).max_at_last_part


def test_partition_numbers_against_recursion():
    assert partition_numbers(5) == [1, 1, 2, 3, 5, 7]
    assert partition_numbers(30) == [partitions_count(j) for j in range(31)]


@pytest.mark.parametrize("n, parts", [(0, 3), (4, 1), (5, 3), (6, 4)])
def test_composition_count_and_order(n, parts):
    cs = list(compositions(n, parts))
    assert len(cs) == comb(n + parts - 1, parts - 1)
    assert len(set(cs)) == len(cs)
    assert all(sum(c) == n and len(c) == parts for c in cs)
    assert cs == sorted(cs, key=lambda c: tuple(reversed(c)))


@given(compositions_st)
def test_two_forms_agree(c):
    assert L_value(c) == L_alt(c) == L_direct(c) == L(c)


@given(compositions_st, st.data())
def test_raise_identity(c, data):
    j = data.draw(st.integers(1, len(c)))
    k = data.draw(st.integers(1, len(c)))
    assume(j < k and c[k - 1] >= 1)
    delta = L_raise_delta(c, j, k)
    assert delta == L(c) - L(raise_op(c, j, k))


@given(compositions_st, st.data())
def test_transpose_identity(c, data):
    j = data.draw(st.integers(1, len(c)))
    k = data.draw(st.integers(1, len(c)))
    assume(j < k)
    assert L_transpose_delta(c, j, k) == L(c) - L(transpose(c, j, k))


@given(partitions_st(), st.data())
def test_raising_decreases_L_on_nonincreasing(p, data):
    assume(len(p) >= 2)
    j = data.draw(st.integers(1, len(p) - 1))
    k = data.draw(st.integers(j + 1, len(p)))
    assert L(raise_op(p, j, k)) < L(p)


@given(partitions_st())
def test_conjugation(p):
    p = tuple(p)
    assert conjugate(conjugate(p)) == p
    assert sum(conjugate(p)) == sum(p)
    assert delta_statistic(conjugate(p)) == -delta_statistic(p)
    assert L(p) == comb(sum(p), 2) - delta_statistic(p)


@pytest.mark.parametrize("n, parts", [(0, 2), (5, 1), (6, 4), (9, 3)])
def test_array_forms_match_scalar_L(n, parts):
    arr = composition_array(n, parts)
    assert [tuple(r) for r in arr.tolist()] == list(compositions(n, parts))
    assert L_array(arr).tolist() == [L(c) for c in compositions(n, parts)]
    assert L_alt_array(arr).tolist() == L_array(arr).tolist()


def test_vectorised_identities_agree_with_scalar_operators():
    rep = verify_transform_identities(6, 4)
    assert rep.ok and rep.pairs == 6 and rep.count == comb(9, 3)
    for c in compositions(6, 4):
        for k in range(2, 5):
            for j in range(1, k):
                if c[k - 1]:
                    L_raise_delta(c, j, k)
                L_transpose_delta(c, j, k)
