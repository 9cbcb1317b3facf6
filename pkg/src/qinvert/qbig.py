"""The regime q > 1, where g has a positive radius of convergence eta.

g is obtained from the entire function h through g(z) = z h(z/q) / h(z).
eta is the first positive solution of A(eta) = 1 with
A(z) = sum_k phi_k g(z/q) ... g(z/q^k), and g_n ~ C / eta^n with
1/C = A'(eta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import ScalarRing
from .errors import InvalidQ, NoBracket, NonConvergent
from .inversion import equation_residual, f_coefficients
from .phi import PhiSpec
from .series import TruncatedSeries, q_dilate, series_derivative, series_divide

__all__ = [
    "h_series_qbig",
    "g_from_h",
    "A_eval",
    "A_prime_eval",
    "EtaResult",
    "find_eta",
    "constant_C",
    "QBigResult",
    "solve_qbig",
    "qbig_residual",
]


def _ring(q) -> ScalarRing:
    if isinstance(q, (int, Fraction)):
        q = Fraction(q)
    else:
        q = float(q)
    if not q > 1:
        raise InvalidQ(f"this regime needs q > 1, got {q}")
    return ScalarRing(q)


def h_series_qbig(spec: PhiSpec, q, N: int) -> TruncatedSeries:
    """h_0 = 1 and h_n (1 - q^-n) = sum_{2<=k<=n+1} f_k h_{n+1-k} q^(-k(2n+1-k)/2)."""
    ring = _ring(q)
    qv = ring.q
    fs = [0] + f_coefficients(spec, N + 1)
    h = [ring.one]
    for n in range(1, N + 1):
        acc = ring.zero
        for k in range(2, n + 2):
            if fs[k] != 0 and not ring.is_zero(h[n + 1 - k]):
                acc += ring.scale(h[n + 1 - k], fs[k]) * _qpow(qv, -(k * (2 * n + 1 - k) // 2))
        h.append(acc / (1 - _qpow(qv, -n)))
    return TruncatedSeries(tuple(h), ring)


def _qpow(q, e: int):
    try:
        return q**e
    except OverflowError:
        return math.inf if e > 0 else 0.0


def g_from_h(h: TruncatedSeries, q=None, N: int | None = None) -> TruncatedSeries:
    """z h(z/q) / h(z), truncated at order N (default: the order of h)."""
    ring = h.ring
    N = h.order if N is None else N
    if ring.is_zero(h.coeffs[0]):
        raise NonConvergent("h_0 vanishes; g = z h(z/q)/h(z) is undefined")
    h = h.truncate(N)
    num = TruncatedSeries.from_list([ring.zero] + list(q_dilate(h, 1).coeffs), ring, N)
    den = TruncatedSeries.from_list(list(h.coeffs), ring, N)
    g = series_divide(num, den)
    assert ring.is_zero(g.coeffs[0])
    assert ring.equal(g.coeffs[1], ring.one) if N >= 1 else True
    return g


def _eval_series(g: TruncatedSeries, x: float) -> float:
    """g(x), refusing when the truncation tail is not negligible."""
    terms = [float(c) * x**m for m, c in enumerate(g.coeffs)]
    total = math.fsum(terms)
    tail = max((abs(t) for t in terms[-3:]), default=0.0)
    mag = math.fsum(abs(t) for t in terms)
    if not math.isfinite(total) or tail > 1e-14 * max(mag, 1e-300) and tail > 1e-300:
        raise NonConvergent(f"truncated g is not reliable at x = {x:.6g}")
    return total


def _phi_terms(spec: PhiSpec, k_limit: int):
    if spec.is_polynomial:
        deg = spec.degree
        return [float(c) for c in spec.coeffs_upto(deg)[1:]], True
    return [float(c) for c in spec.coeffs_upto(k_limit)[1:]], False


def A_eval(spec: PhiSpec, g: TruncatedSeries, q, z: float, k_limit: int = 400) -> float:
    """sum_k phi_k g(z/q) ... g(z/q^k), summed until terms drop below 1e-15 of the total."""
    if z == 0:
        return 0.0
    phis, finite = _phi_terms(spec, k_limit)
    qv = float(q)
    total = 0.0
    prod = 1.0
    prev = math.inf
    for k, c in enumerate(phis, start=1):
        prod *= _eval_series(g, z / qv**k)
        term = c * prod
        total += term
        if not finite and abs(prod) < 1e-15 * max(abs(total), 1e-300):
            return total
        if not finite and abs(prod) > prev and k > 2:
            raise NonConvergent("terms of A stopped decreasing")
        prev = abs(prod)
    if not finite:
        raise NonConvergent(f"A did not reach its tail tolerance within {k_limit} terms")
    return total


def A_prime_eval(spec: PhiSpec, g: TruncatedSeries, q, z: float, k_limit: int = 400) -> float:
    """sum_k phi_k prod_i g(z/q^i) sum_i q^-i (g'/g)(z/q^i), same tail policy as A."""
    phis, finite = _phi_terms(spec, k_limit)
    dg = series_derivative(g)
    qv = float(q)
    total = 0.0
    prod = 1.0
    logsum = 0.0
    for k, c in enumerate(phis, start=1):
        x = z / qv**k
        gx = _eval_series(g, x)
        prod *= gx
        logsum += qv**-k * _eval_series(dg, x) / gx
        term = c * prod * logsum
        total += term
        if not finite and abs(prod * logsum) < 1e-15 * max(abs(total), 1e-300):
            return total
    if not finite:
        raise NonConvergent(f"A' did not reach its tail tolerance within {k_limit} terms")
    return total


@dataclass(frozen=True)
class EtaResult:
    eta: float
    A_at_eta: float
    method: str
    unique: bool
    crossings: tuple = ()


def _ratio_guess(g: TruncatedSeries) -> float | None:
    cs = [float(c) for c in g.coeffs]
    for n in range(len(cs) - 1, 1, -1):
        if cs[n] != 0 and cs[n - 1] != 0:
            r = abs(cs[n] / cs[n - 1])
            return 1 / r if r > 0 else None
    return None


def _safe_A(spec, g, q, z):
    try:
        return A_eval(spec, g, q, z)
    except NonConvergent:
        return None


def _bisect(fn, lo, hi, tol, max_iter=200):
    flo = fn(lo)
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm) <= tol or hi - lo <= 4 * math.ulp(hi):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid


def find_eta(spec: PhiSpec, g: TruncatedSeries, q, tol: float = 1e-12,
             scan_points: int = 400) -> EtaResult:
    """Smallest positive z with A(z) = 1.

    Bisection when phi is nonnegative (A is then increasing); otherwise a
    dense scan for sign changes, each polished by bisection.
    """
    _ring(q)
    guess = _ratio_guess(g) or 1.0
    fn = lambda z: A_eval(spec, g, q, z) - 1  # noqa: E731
    if spec.nonnegative:
        lo, hi = 0.0, guess
        val = _safe_A(spec, g, q, hi)
        steps = 0
        while val is not None and val < 1:
            lo, hi = hi, hi * 1.05
            val = _safe_A(spec, g, q, hi)
            steps += 1
            if steps > 2000:
                break
        if val is None:
            raise NonConvergent(f"g to order {g.order} cannot be evaluated reliably near "
                                f"z = {hi:.6g} before A reaches 1; increase N")
        if val < 1:
            raise NoBracket(f"A stays below 1 on [0, {hi:.6g}] for {spec.describe()}")
        eta = _bisect(fn, lo, hi, tol)
        return EtaResult(eta, A_eval(spec, g, q, eta), "bisection", True)
    # signed phi: scan up to where g can still be evaluated
    top = guess
    while _safe_A(spec, g, q, top * 1.05) is not None and top < 1e6:
        top *= 1.05
    xs = [top * i / scan_points for i in range(1, scan_points + 1)]
    vals = [_safe_A(spec, g, q, x) for x in xs]
    crossings = []
    prev_x, prev_v = 0.0, -1.0
    for x, v in zip(xs, vals):
        if v is None:
            break
        if (v - 1 >= 0) != (prev_v >= 0):
            crossings.append(_bisect(fn, prev_x, x, tol))
        prev_x, prev_v = x, v - 1
    if not crossings:
        raise NoBracket(f"A - 1 has no sign change on (0, {top:.6g}] for {spec.describe()}")
    eta = crossings[0]
    monotone = all(b >= a for a, b in zip(vals, vals[1:]) if a is not None and b is not None)
    return EtaResult(eta, A_eval(spec, g, q, eta), "scan", len(crossings) == 1 and monotone,
                     tuple(crossings))


def constant_C(spec: PhiSpec, g: TruncatedSeries, q, eta: float) -> float:
    return 1 / A_prime_eval(spec, g, q, eta)


@dataclass
class QBigResult:
    spec_label: str
    q: float
    N: int
    h: TruncatedSeries
    g: TruncatedSeries
    eta: float
    A_at_eta: float
    eta_unique: bool
    C_formula: float
    C_empirical: float
    ratio_trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "phi": self.spec_label,
            "q": self.q,
            "N": self.N,
            "eta": self.eta,
            "A_at_eta": self.A_at_eta,
            "eta_unique": self.eta_unique,
            "C_formula": self.C_formula,
            "C_empirical": self.C_empirical,
            "ratio_trace": [list(r) for r in self.ratio_trace],
        }

    def csv_rows(self):
        return self.ratio_trace


def solve_qbig(spec: PhiSpec, q, N: int, tol_root: float = 1e-12) -> QBigResult:
    """h, g, eta and both values of C; C_empirical is g_N eta^N."""
    h = h_series_qbig(spec, q, N)
    g = g_from_h(h, q, N)
    eta = find_eta(spec, g, q, tol_root)
    C = constant_C(spec, g, q, eta.eta)
    trace = [(n, float(g.coeffs[n]), float(g.coeffs[n]) * eta.eta**n) for n in range(1, N + 1)]
    return QBigResult(spec.describe(), float(q), N, h, g, eta.eta, eta.A_at_eta, eta.unique,
                      C, trace[-1][2], trace)


def qbig_residual(spec: PhiSpec, g: TruncatedSeries, order: int):
    """Residual of the defining equation for g, to the given order."""
    g = g.truncate(order)
    return equation_residual(g, f_coefficients(spec, order + 1))
