"""Compositions, partitions and the exponent statistic L_i.

Indices in this module are 1-based, matching the usual (n_1, ..., n_i)
notation: ``raise_op(c, 2, 5)`` moves one unit from part 5 to part 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "compositions",
    "L_value",
    "L",
    "L_alt",
    "raise_op",
    "transpose",
    "L_raise_delta",
    "L_transpose_delta",
    "conjugate",
    "delta_statistic",
    "verify_min_lemmas",
    "MinLemmaReport",
    "partition_numbers",
    "composition_array",
    "L_array",
    "L_alt_array",
    "TransformReport",
    "verify_transform_identities",
]


def _c2(n: int) -> int:
    return n * (n - 1) // 2


def _check_composition(c: Sequence[int]) -> tuple:
    c = tuple(int(x) for x in c)
    if not c:
        raise ValueError("a composition has at least one part")
    if any(x < 0 for x in c):
        raise ValueError(f"parts must be nonnegative: {c}")
    return c


def compositions(n: int, parts: int) -> Iterator[tuple]:
    """All tuples of ``parts`` nonnegative integers summing to n, in colex order."""
    if parts < 1:
        raise ValueError("need at least one part")
    if n < 0:
        return
    if parts == 1:
        yield (n,)
        return
    # iterative odometer on the last parts; colex compares the last entry first
    c = [n] + [0] * (parts - 1)
    while True:
        yield tuple(c)
        # find the first position j >= 1, scanning from the left, that can take
        # one more unit from the prefix
        j = 1
        while j < parts:
            prefix = n - sum(c[j:])
            if prefix > 0:
                break
            j += 1
        else:
            return
        # increment c[j], reset c[1..j-1] to zero, give the remainder to c[0]
        c[j] += 1
        for i in range(1, j):
            c[i] = 0
        c[0] = n - sum(c[1:])


def L_value(c: Sequence[int]) -> int:
    """C(n,2) - sum C(n_j,2) + sum (j-1) n_j, without validation."""
    n = 0
    s2 = 0
    sw = 0
    for j, x in enumerate(c):
        n += x
        s2 += x * (x - 1) // 2
        sw += j * x
    return n * (n - 1) // 2 - s2 + sw


def L_alt(c: Sequence[int]) -> int:
    """n(n-2)/2 - (1/2) sum n_j^2 + sum j n_j, computed in doubled integers."""
    n = sum(c)
    twice = n * (n - 2) - sum(x * x for x in c) + 2 * sum((j + 1) * x for j, x in enumerate(c))
    assert twice % 2 == 0
    return twice // 2


def L(c: Sequence[int]) -> int:
    c = _check_composition(c)
    value = L_value(c)
    assert value == L_alt(c), f"L forms disagree on {c}"
    return value


def _check_indices(c: tuple, j: int, k: int) -> None:
    if not 1 <= j < k <= len(c):
        raise ValueError(f"need 1 <= j < k <= {len(c)}, got j={j}, k={k}")


def raise_op(c: Sequence[int], j: int, k: int) -> tuple:
    """R_{j,k}: part j gains one, part k loses one."""
    c = _check_composition(c)
    _check_indices(c, j, k)
    if c[k - 1] < 1:
        raise ValueError(f"part {k} of {c} is zero; cannot lower it")
    out = list(c)
    out[j - 1] += 1
    out[k - 1] -= 1
    return tuple(out)


def transpose(c: Sequence[int], j: int, k: int) -> tuple:
    c = _check_composition(c)
    _check_indices(c, j, k)
    out = list(c)
    out[j - 1], out[k - 1] = out[k - 1], out[j - 1]
    return tuple(out)


def L_raise_delta(c: Sequence[int], j: int, k: int) -> int:
    """L(c) - L(R_{j,k} c), checked against n_j - n_k + k - j + 1."""
    c = _check_composition(c)
    delta = L(c) - L(raise_op(c, j, k))
    assert delta == c[j - 1] - c[k - 1] + k - j + 1
    return delta


def L_transpose_delta(c: Sequence[int], j: int, k: int) -> int:
    """L(c) - L(tau_{j,k} c), checked against (k - j)(n_k - n_j)."""
    c = _check_composition(c)
    delta = L(c) - L(transpose(c, j, k))
    assert delta == (k - j) * (c[k - 1] - c[j - 1])
    return delta


def conjugate(p: Sequence[int]) -> tuple:
    """Conjugate partition n'_j = #{i : n_i >= j}; zero parts are ignored."""
    parts = sorted((int(x) for x in p if x), reverse=True)
    if any(x < 0 for x in parts):
        raise ValueError("partition parts must be positive")
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x >= j) for j in range(1, parts[0] + 1))


def delta_statistic(p: Sequence[int]) -> int:
    """sum C(n_j,2) - sum C(n'_j,2).

    On a partition of n this satisfies L(p) = Delta((n)) - Delta(p); the check
    runs on every call.
    """
    parts = tuple(int(x) for x in p)
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)) or any(x < 0 for x in parts):
        raise ValueError(f"not a partition: {parts}")
    value = sum(_c2(x) for x in parts) - sum(_c2(x) for x in conjugate(parts))
    if parts:
        n = sum(parts)
        assert L(parts) == _c2(n) - value
    return value


@dataclass
class MinLemmaReport:
    """Outcome of the exhaustive check.

    ``ok`` covers what holds for every n and i: the zero minimum is unique,
    the minimum over n_1 < n equals n and is reached at (n-1, 1, 0, ...),
    and L >= n + k - 2 whenever the last positive index k is at least 2.
    ``literal_ok`` additionally demands a unique second minimiser and the
    bound at k = 1; both fail once n >= 2 and i >= 2, because (0, n, 0, ...)
    also has L = n and (n, 0, ..., 0) has L = 0 < n - 1.
    """

    n: int
    parts: int
    count: int = 0
    min_value: int | None = None
    argmin: list = field(default_factory=list)
    min_value_proper: int | None = None
    argmin_proper: list = field(default_factory=list)
    max_value: int | None = None
    lower_bound_failures: list = field(default_factory=list)
    lower_bound_failures_k1: list = field(default_factory=list)
    table: list = field(default_factory=list)

    @property
    def _second_target(self) -> tuple:
        return (self.n - 1, 1) + (0,) * (self.parts - 2)

    @property
    def unique_zero_minimum(self) -> bool:
        top = (self.n,) + (0,) * (self.parts - 1)
        return self.min_value == 0 and self.argmin == [top]

    @property
    def second_minimum_ok(self) -> bool:
        if self.n < 1 or self.parts < 2:
            return True
        return self.min_value_proper == self.n and self._second_target in self.argmin_proper

    @property
    def second_minimum_unique(self) -> bool:
        if self.n < 1 or self.parts < 2:
            return True
        return self.argmin_proper == [self._second_target]

    @property
    def max_at_last_part(self) -> bool:
        """Whether the largest L is the value n(i-1) of (0, ..., 0, n); false in general."""
        return self.max_value == self.n * (self.parts - 1)

    @property
    def ok(self) -> bool:
        return (self.unique_zero_minimum and self.second_minimum_ok
                and not self.lower_bound_failures)

    @property
    def literal_ok(self) -> bool:
        return self.ok and self.second_minimum_unique and not self.lower_bound_failures_k1


def verify_min_lemmas(n: int, parts: int, keep_table: bool = False) -> MinLemmaReport:
    """Exhaustive check of the lower bounds on L over compositions of n."""
    rep = MinLemmaReport(n, parts)
    for c in compositions(n, parts):
        value = L(c)
        rep.count += 1
        if keep_table:
            rep.table.append((c, value))
        if rep.min_value is None or value < rep.min_value:
            rep.min_value, rep.argmin = value, [c]
        elif value == rep.min_value:
            rep.argmin.append(c)
        if rep.max_value is None or value > rep.max_value:
            rep.max_value = value
        if c[0] < n:
            if rep.min_value_proper is None or value < rep.min_value_proper:
                rep.min_value_proper, rep.argmin_proper = value, [c]
            elif value == rep.min_value_proper:
                rep.argmin_proper.append(c)
        positive = [i for i, x in enumerate(c, start=1) if x > 0]
        if positive and value < n + positive[-1] - 2:
            if positive[-1] >= 2:
                rep.lower_bound_failures.append(c)
            else:
                rep.lower_bound_failures_k1.append(c)
    return rep


def composition_array(n: int, parts: int) -> np.ndarray:
    """Every composition of n into ``parts`` parts, one per row, in colex order."""
    rows = list(compositions(n, parts))
    return np.array(rows, dtype=np.int64).reshape(len(rows), parts)


def L_array(arr: np.ndarray) -> np.ndarray:
    """Row-wise L over an integer array of compositions."""
    n = arr.sum(axis=1)
    j = np.arange(arr.shape[1])
    return n * (n - 1) // 2 - (arr * (arr - 1) // 2).sum(axis=1) + (arr * j).sum(axis=1)


def L_alt_array(arr: np.ndarray) -> np.ndarray:
    n = arr.sum(axis=1)
    j = np.arange(1, arr.shape[1] + 1)
    twice = n * (n - 2) - (arr * arr).sum(axis=1) + 2 * (arr * j).sum(axis=1)
    assert not (twice % 2).any()
    return twice // 2


@dataclass
class TransformReport:
    n: int
    parts: int
    count: int
    pairs: int
    form_failures: list = field(default_factory=list)
    raise_failures: list = field(default_factory=list)
    transpose_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.form_failures or self.raise_failures or self.transpose_failures)


def verify_transform_identities(n: int, parts: int) -> TransformReport:
    """Both forms of L agree, and for every j < k

        L(c) - L(R_{j,k} c) = n_j - n_k + k - j + 1   (when n_k >= 1)
        L(c) - L(tau_{j,k} c) = (k - j)(n_k - n_j)

    over all compositions of n into ``parts`` parts.
    """
    arr = composition_array(n, parts)
    rep = TransformReport(n, parts, len(arr), 0)
    base = L_array(arr)
    bad = np.nonzero(base != L_alt_array(arr))[0]
    rep.form_failures.extend(tuple(arr[i]) for i in bad[:5])
    for k in range(2, parts + 1):
        for j in range(1, k):
            nj, nk = arr[:, j - 1], arr[:, k - 1]
            mask = nk >= 1
            raised = arr[mask].copy()
            raised[:, j - 1] += 1
            raised[:, k - 1] -= 1
            delta = base[mask] - L_array(raised)
            bad = np.nonzero(delta != (nj - nk + k - j + 1)[mask])[0]
            rep.raise_failures.extend((tuple(arr[mask][i]), j, k) for i in bad[:5])
            swapped = arr.copy()
            swapped[:, [j - 1, k - 1]] = swapped[:, [k - 1, j - 1]]
            bad = np.nonzero(base - L_array(swapped) != (k - j) * (nk - nj))[0]
            rep.transpose_failures.extend((tuple(arr[i]), j, k) for i in bad[:5])
            rep.pairs += 1
    return rep


def partition_numbers(j_max: int) -> list[int]:
    """p(0..j_max) from the Euler product prod_k 1/(1 - q^k)."""
    p = [1] + [0] * j_max
    for k in range(1, j_max + 1):
        # multiply by 1/(1 - q^k)
        for m in range(k, j_max + 1):
            p[m] += p[m - k]
    return p
