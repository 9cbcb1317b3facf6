"""Right inverse g of f(z) = z(1 - phi(z)) and the checks built on it.

The solver runs the fixpoint g = z + sum_k phi_k g(z) g(z/q) ... g(z/q^k)
one z-coefficient at a time.  It keeps the partial products
P_k = g(z) g(z/q) ... g(z/q^k) in normalised form: coefficient m of every
series is multiplied by q^(s*C(m,2)), with s = 1 for exact mode and 0 < q < 1
and s = 0 for q > 1.  The normalised update

    S_k[m] = sum_{a >= k} S_{k-1}[a] * G[m-a] * q^(s*a*(m-a) - k*(m-a))

only ever shifts by nonnegative powers of q when s = 1, so exact-mode values
stay polynomials (they are the t_n) and numeric values stay bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import LaurentRing, QLaurent, ScalarRing
from .errors import DomainError, ExactModeUnavailable, InvalidQ
from .phi import PhiSpec
from .series import TruncatedSeries, q_dilate, reciprocal_one_minus, series_mul
from .tuples import L_value, compositions, partition_numbers

__all__ = [
    "InversionResult",
    "right_inverse",
    "segner_oracle",
    "h_identity_check",
    "StructuralReport",
    "structural_checks",
    "catalan_stabilization",
    "GevreyFit",
    "gevrey_diagnostic",
    "renewal_sequence",
    "epsilon_ratios",
    "EquationResidual",
    "equation_residual",
    "f_coefficients",
]


def _binom2(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class InversionResult:
    """g to order N, with t_0..t_{N-1} and eps_0..eps_{N-1}.

    In numeric mode with 0 < q < 1 the entries of ``g`` overflow to inf once
    q^(-C(n,2)) leaves the float range; ``t`` stays finite.
    """

    spec: PhiSpec
    order: int
    mode: str
    q: object
    g: TruncatedSeries
    t: tuple
    eps: tuple
    q_order: int | None = None
    ring: object = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        from .serialize import value_to_json

        return {
            "g": [value_to_json(v) for v in self.g.coeffs],
            "t": [value_to_json(v) for v in self.t],
            "eps": [value_to_json(v) for v in self.eps],
        }


def _check_q(q) -> None:
    if q is None:
        raise InvalidQ("numeric mode needs a value of q")
    if not q > 0 or q == 1:
        raise InvalidQ(f"q must be positive and different from 1, got {q}")


def renewal_sequence(spec: PhiSpec, n_max: int) -> list:
    """tau_0..tau_{n_max}, the coefficients of 1/(1 - phi)."""
    ring = ScalarRing(None)
    phi = TruncatedSeries.from_list(spec.coeffs_upto(n_max), ring, n_max)
    return list(reciprocal_one_minus(phi).coeffs)


def _solve_normalised(phis: list, N: int, ring, s: int) -> list:
    """Normalised coefficients G[0..N] of g (see module docstring)."""
    zero, one = ring.zero, ring.one
    ks = [k for k in range(1, min(len(phis) - 1, N - 1) + 1)]
    K = max((k for k in ks if phis[k] != 0), default=0)
    G = [zero] * (N + 1)
    S = [G] + [[zero] * (N + 1) for _ in range(K)]
    laurent = isinstance(ring, LaurentRing)
    cap = ring.q_cap if laurent else None
    for m in range(1, N + 1):
        for k in range(1, min(K, m - 1) + 1):
            prev = S[k - 1]
            acc = zero
            for a in range(k, m):
                sa = prev[a]
                b = m - a
                gb = G[b]
                if ring.is_zero(sa) or ring.is_zero(gb):
                    continue
                e = s * a * b - k * b
                if laurent:
                    if cap is not None and e > cap:
                        continue
                    term = sa.mul(gb, None if cap is None else cap - e).shift(e)
                else:
                    term = ring.shift(sa * gb, e)
                acc = acc + term
            S[k][m] = acc
        val = one if m == 1 else zero
        for k in range(1, min(K, m - 1) + 1):
            if phis[k] != 0 and not ring.is_zero(S[k][m]):
                val = ring.add(val, ring.scale(S[k][m], phis[k]))
        G[m] = val
    return G


def _solve_normalised_float(phis: list, N: int, q: float, s: int) -> list:
    """Vectorised float version of :func:`_solve_normalised`."""
    K = max((k for k in range(1, min(len(phis) - 1, N - 1) + 1) if phis[k] != 0), default=0)
    G = np.zeros(N + 1)
    S = np.zeros((K + 1, N + 1))
    logq = math.log(q)
    for m in range(1, N + 1):
        for k in range(1, min(K, m - 1) + 1):
            a = np.arange(k, m)
            b = m - a
            e = s * a * b - k * b
            S[k, m] = np.dot(S[k - 1, a] * G[b], np.exp(e * logq))
        val = 1.0 if m == 1 else 0.0
        for k in range(1, min(K, m - 1) + 1):
            val += float(phis[k]) * S[k, m]
        G[m] = val
        S[0, m] = val
    return [float(x) for x in G]


def right_inverse(spec: PhiSpec, N: int, mode: str = "exact", q=None,
                  q_order: int | None = None) -> InversionResult:
    """Solve sum_n f_n g(z) g(z/q) ... g(z/q^{n-1}) = z with g(0) = 0.

    ``mode="exact"`` keeps q formal (Laurent polynomials); ``q_order`` then
    drops every power of q above it in the t_n, which keeps [q^j] t_n exact
    for j <= q_order at a fraction of the cost.  ``mode="numeric"`` fixes q;
    a Fraction q gives exact rational values.
    """
    if N < 1:
        raise ValueError("order N must be at least 1")
    phis = spec.coeffs_upto(N)
    if mode == "exact":
        if not spec.is_exact:
            raise ExactModeUnavailable(f"{spec.describe()} has irrational coefficients; use numeric mode")
        ring = LaurentRing(q_order)
        G = _solve_normalised(phis, N, ring, 1)
        g = [ring.zero] + [G[n].shift(-_binom2(n)) for n in range(1, N + 1)]
        t = G[1:]
    elif mode == "numeric":
        _check_q(q)
        s = 1 if q < 1 else 0
        if isinstance(q, (int, Fraction)):
            ring = ScalarRing(Fraction(q))
            G = _solve_normalised([Fraction(x) for x in phis] if spec.is_exact else phis, N, ring, s)
        else:
            ring = ScalarRing(float(q))
            G = _solve_normalised_float(phis, N, float(q), s)
        if s == 1:
            g = [ring.zero] + [ring.shift(G[n], -_binom2(n)) for n in range(1, N + 1)]
            t = G[1:]
        else:
            g = list(G)
            t = [ring.shift(G[n + 1], _binom2(n + 1)) for n in range(N)]
    else:
        raise ValueError(f"mode must be 'exact' or 'numeric', got {mode!r}")
    eps = []
    for n in range(N):
        acc = t[n]
        for i in range(1, n + 1):
            if phis[i] != 0:
                acc = ring.sub(acc, ring.scale(t[n - i], phis[i]))
        eps.append(acc)
    return InversionResult(
        spec=spec, order=N, mode=mode, q=q, g=TruncatedSeries(tuple(g), ring),
        t=tuple(t), eps=tuple(eps), q_order=q_order if mode == "exact" else None, ring=ring,
    )


def epsilon_ratios(result: InversionResult, j_max: int) -> list:
    """Rows (j, n, [q^j] eps_n / phi_{n-j}) wherever phi_{n-j} is nonzero.

    Reported as data: the ratios need not settle to a nonzero value.
    """
    if result.mode != "exact":
        raise DomainError("epsilon ratios need an exact result")
    phis = result.spec.coeffs_upto(result.order)
    rows = []
    for n in range(1, len(result.eps)):
        for j in range(1, min(j_max, n) + 1):
            if phis[n - j] != 0:
                rows.append((j, n, result.eps[n].coeff(j) / phis[n - j]))
    return rows


# -- brute-force oracle ----------------------------------------------------


def segner_oracle(spec: PhiSpec, n: int, bound: int = 12) -> QLaurent:
    """t_n by explicit enumeration of compositions (exponential cost)."""
    if not spec.is_exact:
        raise ExactModeUnavailable("the composition oracle needs rational phi")
    if n > bound:
        raise DomainError(f"n={n} exceeds the oracle bound {bound}")
    return _segner_table(spec, n)[n]


@lru_cache(maxsize=64)
def _segner_table(spec: PhiSpec, n: int) -> tuple:
    phis = spec.coeffs_upto(max(n, 1))
    t = [QLaurent.constant(1)]
    for m in range(1, n + 1):
        acc = QLaurent()
        for i in range(1, m + 1):
            if phis[i] == 0:
                continue
            inner = QLaurent()
            for comp in compositions(m - i, i + 1):
                term = QLaurent.monomial(L_value(comp))
                for part in comp:
                    term = term * t[part]
                inner = inner + term
            acc = acc + inner * phis[i]
        t.append(acc)
    return tuple(t)


# -- identities ------------------------------------------------------------


def _phi_series(spec: PhiSpec, ring, order: int) -> TruncatedSeries:
    return TruncatedSeries.from_list(spec.coeffs_upto(order), ring, order)


def h_identity_check(result: InversionResult, spec: PhiSpec, N: int) -> bool:
    """(1 - phi(z)) H(z) = 1 to order N, H(z) = sum t_n z^n prod_{j<=n} (1 - phi(q^j z))."""
    if result.mode != "exact" or result.q_order is not None:
        raise DomainError("the H identity is checked on uncapped exact results")
    if len(result.t) < N + 1:
        raise DomainError(f"need t_0..t_{N}, result has {len(result.t)} terms")
    ring = LaurentRing()
    phi = _phi_series(spec, ring, N)
    one = TruncatedSeries.monomial(0, ring, N)
    prod = one
    H = TruncatedSeries.zero(ring, N)
    for n in range(N + 1):
        if n >= 1:
            prod = series_mul(prod, one - q_dilate(phi, -n))
        term = prod.scale(result.t[n]).shift_z(n)
        H = H + term
    lhs = series_mul(one - phi, H)
    return lhs.equals(one)


@dataclass
class StructuralReport:
    checked_up_to: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def structural_checks(result: InversionResult, spec: PhiSpec) -> StructuralReport:
    """Degree range, leading coefficient, sign pattern and [q^0] t_n = tau_n."""
    if result.mode != "exact":
        raise DomainError("structural checks need an exact result")
    N = result.order
    tau = renewal_sequence(spec, N)
    report = StructuralReport(checked_up_to=N)
    for n in range(1, N + 1):
        gn = result.g.coeffs[n]
        lo, hi = gn.min_exponent, gn.max_exponent
        if gn.is_zero():
            if tau[n - 1] != 0:
                report.violations.append(("degree", n, "g_n vanishes"))
            continue
        if lo < -_binom2(n) or hi > 0:
            report.violations.append(("degree", n, f"exponents in [{lo}, {hi}]"))
        lead = gn.coeff(-_binom2(n))
        if lead != tau[n - 1]:
            report.violations.append(("leading", n, f"{lead} != tau_{n - 1} = {tau[n - 1]}"))
        if spec.nonnegative and any(c < 0 for c in gn.terms.values()):
            report.violations.append(("sign", n, "negative coefficient"))
    for n in range(N):
        if result.t[n].coeff(0) != tau[n]:
            report.violations.append(("renewal", n, f"[q^0]t_n = {result.t[n].coeff(0)} != {tau[n]}"))
    return report


@dataclass(frozen=True)
class StabilizationRow:
    """[q^j] t_n for j <= n <= N against the partition number p(j).

    ``ok`` is the claim over the whole range n >= j.  ``stable_from`` is the
    first n from which every value up to N equals p(j); it is j + 1 for
    j >= 1 because [q^j] t_j falls short (t_2 = 1 + q has no q^2 term).
    """

    j: int
    partition_number: int
    values: tuple
    ok: bool
    stable_from: int | None


def catalan_stabilization(N: int, j_max: int) -> list:
    """[q^j] t_n against p(j) for j <= j_max and j <= n <= N."""
    result = right_inverse(PhiSpec.catalan(), N + 1, q_order=j_max)
    p = partition_numbers(j_max)
    rows = []
    for j in range(j_max + 1):
        vals = tuple((n, result.t[n].coeff(j)) for n in range(j, N + 1))
        stable = None
        for n, v in reversed(vals):
            if v != p[j]:
                break
            stable = n
        rows.append(StabilizationRow(j, p[j], vals, all(v == p[j] for _, v in vals), stable))
    return rows


@dataclass(frozen=True)
class GevreyFit:
    slope: float
    intercept: float
    residual: float
    points: int
    degenerate: bool


def gevrey_diagnostic(spec: PhiSpec, q: float, N: int) -> GevreyFit:
    """Least-squares slope of log|g_n| against (n^2/2) log(1/q)."""
    _check_q(q)
    if not q < 1:
        raise InvalidQ("the Gevrey diagnostic is for 0 < q < 1")
    res = right_inverse(spec, N, mode="numeric", q=float(q))
    xs, ys = [], []
    lq = math.log(1 / q)
    for n in range(1, N + 1):
        tn = res.t[n - 1]
        if tn != 0:
            xs.append(n * n / 2 * lq)
            ys.append(math.log(abs(tn)) + _binom2(n) * lq)
    if len(xs) < 10:
        return GevreyFit(math.nan, math.nan, math.nan, len(xs), True)
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * np.asarray(xs) + intercept
    resid = float(np.sqrt(np.mean((np.asarray(ys) - fitted) ** 2)))
    return GevreyFit(float(slope), float(intercept), resid, len(xs), False)


# -- residual of the defining equation -------------------------------------


@dataclass(frozen=True)
class EquationResidual:
    residual: TruncatedSeries
    scale: tuple
    max_relative: float

    @property
    def exactly_zero(self) -> bool:
        return all(self.residual.ring.is_zero(c) for c in self.residual.coeffs)


def equation_residual(g: TruncatedSeries, f_coeffs) -> EquationResidual:
    """sum_n f_n g(z) g(z/q) ... g(z/q^(n-1)) - z, truncated at g's order.

    ``f_coeffs`` lists f_1, f_2, ...  The sum is finite: when g(0) = 0 terms
    past n = order + 1 vanish, otherwise f must be a polynomial.  ``scale``
    holds the same sum with every coefficient replaced by its absolute value
    (numeric rings only); ``max_relative`` divides by it.
    """
    ring = g.ring
    N = g.order
    fs = list(f_coeffs)
    if ring.is_zero(g.coeffs[0]):
        fs = fs[: N + 1]
    numeric = not getattr(ring, "exact", True)
    ag = TruncatedSeries(tuple(abs(c) for c in g.coeffs), ring) if numeric else None
    total = TruncatedSeries.zero(ring, N)
    scale = TruncatedSeries.zero(ring, N)
    prod = aprod = None
    for n, fn in enumerate(fs, start=1):
        if n == 1:
            prod, aprod = g, ag
        else:
            prod = series_mul(prod, q_dilate(g, n - 1))
            if numeric:
                aprod = series_mul(aprod, q_dilate(ag, n - 1))
        if fn != 0:
            total = total + prod.scale(fn)
            if numeric:
                scale = scale + aprod.scale(abs(fn))
    res = total - TruncatedSeries.monomial(1, ring, N)
    if numeric:
        rels = [abs(r) / s if s else abs(r) for r, s in zip(res.coeffs, scale.coeffs)]
        max_rel = float(max(rels))
    else:
        max_rel = 0.0 if all(ring.is_zero(c) for c in res.coeffs) else math.inf
    return EquationResidual(res, tuple(scale.coeffs), max_rel)


def f_coefficients(spec: PhiSpec, n_max: int) -> list:
    """f_1..f_{n_max} of f(z) = z (1 - phi(z))."""
    phis = spec.coeffs_upto(n_max)
    return [1] + [-phis[k - 1] for k in range(2, n_max + 1)]
