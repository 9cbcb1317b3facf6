"""Solutions that do not vanish at 0, the linearising h-recursion, q-Borel maps.

A nonzero root kappa of f is q-extremal when f(kappa / q^n) != 0 for every
n >= 1.  For such a root, g(z) = kappa h(z/q) / h(z) with
h(z) = sum_n z^n / prod_{i<=n} f(kappa / q^i) solves the defining equation
formally.  Whether other solutions exist is not decided here.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .arith import ScalarRing, format_rational, parse_rational
from .errors import ConfigError, DomainError, FormalSolutionError, InvalidQ, IrrationalRootWarning
from .inversion import EquationResidual, equation_residual
from .phi import PhiSpec
from .series import TruncatedSeries, q_dilate, series_divide

__all__ = [
    "parse_polynomial",
    "format_polynomial",
    "QExtremalZero",
    "q_extremal_zeros",
    "g_kappa",
    "verify_formal_solution",
    "DivergentH",
    "divergent_h_recursion",
    "borel_1_over_q",
    "borel_1_over_q_inverse",
    "borel_q",
]

_TERM = re.compile(r"([+-]?)([^+-]*)")


def parse_polynomial(text: str) -> list:
    """Coefficients [c_0, c_1, ...] of a polynomial in z written like "z-z^2" or "z - 1/2*z^3"."""
    src = text.replace(" ", "")
    if not src:
        raise ConfigError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    for m in _TERM.finditer(src):
        sign, body = m.group(1), m.group(2)
        if not sign and not body:
            continue
        if not body:
            raise ConfigError(f"dangling sign in {text!r}")
        if "z" in body:
            head, _, power = body.partition("z")
            head = head.rstrip("*")
            c = parse_rational(head) if head else Fraction(1)
            if power:
                if not power.startswith("^") or not power[1:].isdigit():
                    raise ConfigError(f"cannot read term {body!r}")
                e = int(power[1:])
            else:
                e = 1
        else:
            c, e = parse_rational(body), 0
        if sign == "-":
            c = -c
        coeffs[e] = coeffs.get(e, Fraction(0)) + c
        pos = m.end()
    if pos != len(src):
        raise ConfigError(f"cannot parse polynomial {text!r}")
    deg = max((e for e, c in coeffs.items() if c), default=0)
    return [coeffs.get(e, Fraction(0)) for e in range(deg + 1)]


def format_polynomial(coeffs) -> str:
    parts = []
    for e, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        var = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
        num = format_rational(mag) if isinstance(mag, Fraction) and mag.denominator != 1 else str(mag)
        body = var if (mag == 1 and var) else (num + ("*" + var if var else ""))
        parts.append(("-" if c < 0 else "+") + body)
    text = "".join(parts) or "0"
    return text[1:] if text.startswith("+") else text


def _peval(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _check_f(coeffs) -> list:
    cs = [parse_rational(c) if not isinstance(c, float) else c for c in coeffs]
    if len(cs) < 2 or cs[0] != 0 or cs[1] != 1:
        raise DomainError("f must satisfy f(0) = 0 and f'(0) = 1")
    while len(cs) > 2 and cs[-1] == 0:
        cs.pop()
    return cs


@dataclass(frozen=True)
class QExtremalZero:
    kappa: object
    extremal: bool
    verified_up_to: int
    reason_finite: str
    exact: bool

    def to_json(self) -> dict:
        k = format_rational(self.kappa) if isinstance(self.kappa, Fraction) else float(self.kappa)
        return {"kappa": k, "extremal": self.extremal, "verified_up_to": self.verified_up_to,
                "reason_finite": self.reason_finite, "exact": self.exact}


def _divisors(n: int) -> list:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _rational_roots(p: list) -> tuple[list, list]:
    """Rational roots (with multiplicity) of an integer polynomial, and the deflated rest."""
    roots = []
    p = list(p)
    while len(p) > 1 and p[0] == 0:
        roots.append(Fraction(0))
        p = p[1:]
    changed = True
    while changed and len(p) > 1:
        changed = False
        for a in _divisors(p[0]):
            for b in _divisors(p[-1]):
                for cand in (Fraction(a, b), Fraction(-a, b)):
                    if _peval(p, cand) == 0:
                        roots.append(cand)
                        p = _integer_form(_deflate(p, cand))
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return roots, p


def _integer_form(p: list) -> list:
    den = math.lcm(*(Fraction(c).denominator for c in p))
    ints = [int(Fraction(c) * den) for c in p]
    g = math.gcd(*ints) or 1
    return [c // g for c in ints]


def _deflate(p: list, r) -> list:
    # synthetic division by (z - r); p is low-to-high
    hi = list(reversed(p))
    out = [hi[0]]
    for c in hi[1:-1]:
        out.append(c + out[-1] * r)
    return list(reversed(out))


def _polish(p: list, x: float) -> float:
    """Refine a numeric real root by bisection on a small sign-change bracket."""
    fp = [float(c) for c in p]
    h = 1e-6 * max(1.0, abs(x))
    lo, hi = x - h, x + h
    flo, fhi = _peval(fp, lo), _peval(fp, hi)
    if flo == 0:
        return lo
    if (flo < 0) == (fhi < 0):
        return x
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _peval(fp, mid)
        if fm == 0 or hi - lo <= 4 * math.ulp(mid):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def q_extremal_zeros(f_coeffs, q, tol: float = 1e-12) -> list:
    """Real nonzero roots of f with a verdict on q-extremality (0 < q < 1).

    Rational roots are found exactly and checked exactly when q is rational.
    The remaining real roots come from a companion-matrix eigen solve,
    polished by bisection, and only get a numeric verdict.
    """
    cs = _check_f(f_coeffs)
    qv = parse_rational(q) if not isinstance(q, float) else q
    if not 0 < qv < 1:
        raise InvalidQ(f"q-extremality is studied for 0 < q < 1, got {q}")
    p = cs[1:]  # f(z)/z, low-to-high, constant term 1
    if len(p) == 1:
        return []
    exact_f = all(isinstance(c, Fraction) for c in p)
    roots: list = []
    rest = p
    if exact_f:
        den = math.lcm(*(c.denominator for c in p))
        ints = [int(c * den) for c in p]
        rat, rest_int = _rational_roots(ints)
        roots.extend(rat)
        rest = rest_int
    numeric_roots = []
    if len(rest) > 1:
        eig = np.roots([float(c) for c in reversed(rest)])
        scale = max(1.0, float(np.max(np.abs(eig))))
        for z in eig:
            if abs(z.imag) <= 1e-9 * scale:
                numeric_roots.append(_polish(rest, float(z.real)))
    if numeric_roots:
        warnings.warn(f"{len(numeric_roots)} root(s) known only numerically; "
                      "their extremality verdict is not exact", IrrationalRootWarning, stacklevel=2)
    lead = abs(float(p[-1]))
    bound = 1 + max(abs(float(c)) / lead for c in p[:-1])  # Cauchy bound on the roots of f/z
    out = []
    for kappa in sorted(set(roots), key=float) + sorted(numeric_roots):
        exact = isinstance(kappa, Fraction) and isinstance(qv, Fraction)
        n_max = 1
        while abs(float(kappa)) / float(qv) ** n_max <= bound:
            n_max += 1
        extremal = True
        for n in range(1, n_max + 1):
            x = kappa / qv**n
            val = _peval(cs, x)
            if (val == 0) if exact else abs(float(val)) <= tol * max(1.0, abs(float(x))) ** (len(cs) - 1):
                extremal = False
                break
        out.append(QExtremalZero(kappa, extremal, n_max, "beyond-largest-root", exact))
    return out


def _scalar_ring(q):
    if isinstance(q, float):
        return ScalarRing(q)
    return ScalarRing(parse_rational(q))


def g_kappa(f_coeffs, kappa, q, N: int) -> TruncatedSeries:
    """kappa h(z/q) / h(z) with h_n = h_{n-1} / f(kappa / q^n), h_0 = 1."""
    cs = _check_f(f_coeffs)
    ring = _scalar_ring(q)
    qv = ring.q
    kappa = kappa if isinstance(kappa, float) else parse_rational(kappa)
    h = [ring.one]
    for n in range(1, N + 1):
        val = _peval(cs, kappa / qv**n)
        if val == 0:
            raise FormalSolutionError(f"f(kappa/q^{n}) = 0: kappa = {kappa} is not q-extremal")
        h.append(h[-1] / val)
    hs = TruncatedSeries(tuple(h), ring)
    g = series_divide(q_dilate(hs, 1), hs).scale(kappa)
    return g


def verify_formal_solution(g: TruncatedSeries, f_coeffs, q=None, N: int | None = None) -> EquationResidual:
    """Residual sum_n f_n prod_{j<n} g(z/q^j) - z up to order N.

    ``f_coeffs`` is a polynomial [0, 1, f_2, ...]; a PhiSpec is accepted only
    when g(0) = 0, because otherwise the infinite sum has no formal meaning.
    """
    ring = g.ring
    if isinstance(f_coeffs, PhiSpec):
        if not ring.is_zero(g.coeffs[0]) and not f_coeffs.is_polynomial:
            raise FormalSolutionError("g(0) != 0 needs a polynomial f: the sum over n is not formally summable")
        deg = f_coeffs.degree + 1 if f_coeffs.is_polynomial else g.order + 1
        phis = f_coeffs.coeffs_upto(deg)
        fs = [1] + [-phis[k - 1] for k in range(2, deg + 1)]
    else:
        fs = _check_f(f_coeffs)[1:]
    if N is not None:
        g = g.truncate(N)
    return equation_residual(g, fs)


@dataclass(frozen=True)
class DivergentH:
    coeffs: tuple
    q: object
    growth_ratio: float
    root_sup: float
    all_positive: bool

    def to_json(self) -> dict:
        return {
            "q": float(self.q),
            "growth_ratio": self.growth_ratio,
            "root_sup": self.root_sup,
            "all_positive": self.all_positive,
            "log_h": [_log_abs(c) for c in self.coeffs],
        }


def _log_abs(x) -> float:
    if x == 0:
        return -math.inf
    if isinstance(x, Fraction):
        return _log_abs_int(x.numerator) - _log_abs_int(x.denominator)
    return float(mpmath.log(abs(x)))


def _log_abs_int(n: int) -> float:
    n = abs(n)
    shift = max(n.bit_length() - 60, 0)
    return math.log(n >> shift) + shift * math.log(2)


def divergent_h_recursion(spec: PhiSpec, q, N: int, dps: int = 40) -> DivergentH:
    """(q^-k - 1) h_k = sum_{m<k} phi_{k-m} q^(-(k-m+1)(k+m)/2) h_m with h_0 = 1.

    Rational q gives exact Fractions; a float q runs in mpmath at ``dps``
    digits so that the superexponential growth for q < 1 stays representable.
    ``growth_ratio`` is log|h_N| / N^2 divided by |log q| / 2.
    """
    exact = not isinstance(q, float) and spec.is_exact
    if exact:
        qv = parse_rational(q)
        phis = spec.coeffs_upto(N)
        h = [Fraction(1)]
    else:
        ctx = mpmath.mp.clone()
        ctx.dps = dps
        qv = ctx.mpf(float(q))
        phis = [ctx.mpf(float(c)) for c in spec.coeffs_upto(N)]
        h = [ctx.mpf(1)]
    if qv <= 0 or qv == 1:
        raise InvalidQ(f"q must be positive and different from 1, got {q}")
    for k in range(1, N + 1):
        acc = 0 * h[0]
        for m in range(k):
            c = phis[k - m]
            if c != 0 and h[m] != 0:
                e = (k - m + 1) * (k + m) // 2
                acc += c * h[m] / qv**e
        h.append(acc / (1 / qv**k - 1))
    logs = [_log_abs(x) for x in h]
    last = logs[-1] if N >= 1 else -math.inf
    lq = abs(math.log(float(qv)))
    growth = last / N**2 / (lq / 2) if N >= 1 and math.isfinite(last) else math.nan
    root_sup = max((math.exp(v / k) for k, v in enumerate(logs) if k >= 1 and math.isfinite(v)), default=0.0)
    positive = all(x > 0 for x in h)
    if not exact:
        h = [float(x) if abs(x) < 1e300 else x for x in h]
    return DivergentH(tuple(h), qv, growth, root_sup, positive)


def borel_1_over_q(g: TruncatedSeries) -> TruncatedSeries:
    """Coefficient n times q^C(n,2)."""
    ring = g.ring
    return TruncatedSeries(tuple(ring.shift(c, n * (n - 1) // 2) for n, c in enumerate(g.coeffs)), ring)


def borel_1_over_q_inverse(b: TruncatedSeries) -> TruncatedSeries:
    ring = b.ring
    return TruncatedSeries(tuple(ring.shift(c, -(n * (n - 1) // 2)) for n, c in enumerate(b.coeffs)), ring)


def borel_q(phi, q: float) -> TruncatedSeries:
    """Coefficient j times q^(-j^2/2); q > 1."""
    q = float(q)
    if not q > 1:
        raise InvalidQ(f"this transform is used with q > 1, got {q}")
    coeffs = phi.coeffs if isinstance(phi, TruncatedSeries) else tuple(phi)
    lq = math.log(q)
    ring = ScalarRing(q)
    return TruncatedSeries(tuple(float(c) * math.exp(-j * j / 2 * lq) for j, c in enumerate(coeffs)), ring)
