"""Slow, independent reference computations used to freeze expected values.

Nothing here imports the package.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


def poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def q_catalan(n_max: int) -> list:
    """C_0..C_n_max from C_{n+1} = sum_m C_{n-m} C_m q^{m(n-m+1)}."""
    C = [{0: 1}]
    for n in range(n_max):
        acc: dict = {}
        for m in range(n + 1):
            acc = poly_add(acc, poly_mul(poly_mul(C[n - m], C[m]), {m * (n - m + 1): 1}))
        C.append(acc)
    return C


@lru_cache(maxsize=None)
def partitions_count(n: int, largest: int | None = None) -> int:
    """Number of partitions of n into parts <= largest, by direct recursion."""
    if largest is None:
        largest = n
    if n == 0:
        return 1
    return sum(partitions_count(n - k, k) for k in range(1, min(n, largest) + 1))


def tau(phis: list, n_max: int) -> list:
    """Renewal sequence for phi_1, phi_2, ... (list index 0 is phi_1)."""
    out = [Fraction(1)]
    for n in range(1, n_max + 1):
        out.append(sum(Fraction(phis[i - 1]) * out[n - i] for i in range(1, min(n, len(phis)) + 1)))
    return out


def fixpoint_g(phis: list, q: float, N: int) -> list:
    """g_0..g_N at a fixed float q by repeated substitution in g = z + sum phi_k prod g(z/q^i)."""
    g = [0.0, 1.0] + [0.0] * (N - 1)
    for _ in range(N):
        new = [0.0] * (N + 1)
        new[1] = 1.0
        prod = g[:]
        for k, c in enumerate(phis, start=1):
            dil = [g[m] * q ** (-k * m) for m in range(N + 1)]
            nxt = [0.0] * (N + 1)
            for i, x in enumerate(prod):
                if x:
                    for j in range(1, N + 1 - i):
                        nxt[i + j] += x * dil[j]
            prod = nxt
            for m in range(N + 1):
                new[m] += c * prod[m]
        g = new
    return g


def L_direct(c) -> int:
    n = sum(c)
    return n * (n - 1) // 2 - sum(x * (x - 1) // 2 for x in c) + sum(j * x for j, x in enumerate(c))
