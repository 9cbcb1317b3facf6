"""Limit constants for 0 < q < 1 and finite-N convergence diagnostics.

After rescaling z by zeta (so that phi(1) = 1) the sequence
a_n = n * Phi_n * t_n(q), with Phi_n = Gamma(rho) (1 - phi(zeta (1 - 1/n))),
is compared with L(q) = 1 / prod_{j>=1} (1 - phi(zeta q^j)) in three ways:
its liminf, the density of indices where it strays from L, and
coefficient by coefficient in q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, InvalidQ, NoRoot
from .inversion import renewal_sequence, right_inverse
from .phi import PhiSpec

__all__ = [
    "phi_eval",
    "phi_prime",
    "find_zeta",
    "gamma_fn",
    "AsymptoticContext",
    "make_context",
    "big_phi",
    "limit_constant_L",
    "L_as_q_series",
    "ConvergenceReport",
    "theorem_main_report",
    "PolynomialLimit",
    "polynomial_case_limit",
    "RenewalReport",
    "renewal_limit_check",
    "AlternatingCheck",
    "alternating_check",
    "alternating_wrap",
    "DELTA_GRID",
]

DELTA_GRID = (0.1, 0.03, 0.01, 0.003)


def _poly_eval(coeffs, x):
    acc = 0.0 if isinstance(x, float) else Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc * x


def phi_eval(spec: PhiSpec, x):
    """phi(x); exact when both the spec and x are rational."""
    kind = spec.kind
    if kind == "catalan":
        return x
    if kind == "explicit":
        if isinstance(x, Fraction) and spec.is_exact:
            return _poly_eval(spec.coeffs, x)
        return _poly_eval([float(c) for c in spec.coeffs], float(x))
    if kind == "fractional":
        x = float(x)
        if not -1 <= x <= 1:
            raise DomainError(f"fractional phi is defined for |x| <= 1, got {x}")
        return -math.expm1(spec.param * math.log1p(-x)) if x < 1 else 1.0
    if kind == "exponential":
        return math.exp(spec.param) * math.expm1(float(x))
    return phi_eval(spec.inner, -x)


def phi_prime(spec: PhiSpec, x):
    kind = spec.kind
    if kind == "catalan":
        return Fraction(1) if isinstance(x, Fraction) else 1.0
    if kind == "explicit":
        if isinstance(x, Fraction) and spec.is_exact:
            return sum((i + 1) * c * x**i for i, c in enumerate(spec.coeffs))
        return math.fsum((i + 1) * float(c) * float(x) ** i for i, c in enumerate(spec.coeffs))
    if kind == "fractional":
        x = float(x)
        if not -1 <= x < 1:
            raise DomainError(f"fractional phi' is finite only for |x| < 1, got {x}")
        return spec.param * (1 - x) ** (spec.param - 1)
    if kind == "exponential":
        return math.exp(spec.param + float(x))
    return -phi_prime(spec.inner, -x)


def find_zeta(spec: PhiSpec, tol: float = 1e-14):
    """Smallest positive root of phi(x) = 1."""
    if not spec.nonnegative:
        raise DomainError("zeta is defined here for nonnegative phi; use the inner spec")
    if spec.zeta is not None:
        return spec.zeta
    if spec.is_zero:
        raise NoRoot("phi is identically zero")
    lo, hi = 0.0, 1.0
    while phi_eval(spec, hi) < 1:
        lo, hi = hi, 2 * hi
        if hi > 2.0**60:
            raise NoRoot(f"phi stays below 1 for {spec.describe()}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = phi_eval(spec, mid)
        if abs(val - 1) <= tol or hi - lo <= 4 * math.ulp(hi):
            return mid
        if val < 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gamma_fn(rho: float) -> float:
    if not 0 < rho <= 2:
        raise DomainError(f"gamma_fn is used on (0, 2], got {rho}")
    return math.gamma(float(rho))


def _tail_cutoff(q: float, tol: float) -> int:
    # sum_{j>J} -log(1 - q^j) <= q^(J+1) / (1-q)^2 when phi(zeta q^j) <= q^j
    J = 1
    while q ** (J + 1) / (1 - q) ** 2 >= tol:
        J += 1
    return J


@dataclass(frozen=True)
class AsymptoticContext:
    spec: PhiSpec
    zeta: object
    rho: object
    q: float
    L_value: float
    gamma_rho: float
    product_terms: int


def limit_constant_L(spec: PhiSpec, q: float, zeta=None, tol_tail: float = 1e-12) -> float:
    """1 / prod_{j>=1} (1 - phi(zeta q^j)), product truncated with a certified tail."""
    q = float(q)
    if not 0 < q < 1:
        raise InvalidQ(f"L(q) needs 0 < q < 1, got {q}")
    if zeta is None:
        zeta = find_zeta(spec)
    z = float(zeta)
    J = _tail_cutoff(q, tol_tail)
    log_prod = math.fsum(math.log1p(-float(phi_eval(spec, z * q**j))) for j in range(1, J + 1))
    return math.exp(-log_prod)


def make_context(spec: PhiSpec, q: float, rho=None, tol_root: float = 1e-14,
                 tol_tail: float = 1e-12) -> AsymptoticContext:
    q = float(q)
    if not 0 < q < 1:
        raise InvalidQ(f"the asymptotic regime needs 0 < q < 1, got {q}")
    rho = spec.rho if rho is None else rho
    if rho is None or not 0 < float(rho) <= 1:
        raise DomainError(f"rho must lie in (0, 1], got {rho}")
    zeta = find_zeta(spec, tol_root)
    L = limit_constant_L(spec, q, zeta, tol_tail)
    return AsymptoticContext(spec, zeta, rho, q, L, gamma_fn(float(rho)), _tail_cutoff(q, tol_tail))


def big_phi(ctx: AsymptoticContext, n: int):
    """Gamma(rho) (1 - phi(zeta (1 - 1/n))); exact for rational zeta and rho = 1."""
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(ctx.zeta, Fraction) and ctx.spec.is_exact and ctx.rho == 1:
        return 1 - phi_eval(ctx.spec, ctx.zeta * (1 - Fraction(1, n)))
    x = float(ctx.zeta) * (1 - 1 / n)
    return ctx.gamma_rho * (1 - float(phi_eval(ctx.spec, x)))


def L_as_q_series(spec: PhiSpec, j_max: int, zeta=None) -> list:
    """[q^0..q^j_max] of prod_{j>=1} 1/(1 - phi(zeta q^j)).

    Only factors j <= j_max touch these coefficients; the values are exact
    Fractions when phi and zeta are rational.
    """
    if not spec.is_polynomial or spec.kind == "alternating":
        raise DomainError("the q-expansion of L is offered for explicit polynomial phi")
    zeta = find_zeta(spec) if zeta is None else zeta
    exact = spec.is_exact and isinstance(zeta, Fraction)
    scaled = spec.coeffs_upto(spec.degree)[1:]
    scaled = [c * zeta ** (k + 1) for k, c in enumerate(scaled)] if exact else \
        [float(c) * float(zeta) ** (k + 1) for k, c in enumerate(scaled)]
    out = [Fraction(1) if exact else 1.0] + [Fraction(0) if exact else 0.0] * j_max
    for j in range(1, j_max + 1):
        # multiply by 1/(1 - sum_k c_k q^{jk}): out[m] += sum_k c_k out[m - jk]
        for m in range(j, j_max + 1):
            acc = out[m]
            for k, c in enumerate(scaled, start=1):
                if j * k > m:
                    break
                acc += c * out[m - j * k]
            out[m] = acc
    return out


@dataclass
class ConvergenceReport:
    spec_label: str
    q: float
    N: int
    zeta: object
    rho: object
    L: float
    sequence: list
    liminf_estimate: float
    window: tuple
    deviation_density: dict
    coeffwise: list = field(default_factory=list)
    coeffwise_spec: str = ""
    twisted_from: str = ""

    def csv_rows(self):
        return [(n, a, self.L, abs(a - self.L)) for n, a in self.sequence]

    def coeffwise_rows(self):
        return [(j, n, v, lim) for j, n, v, lim in self.coeffwise]

    def to_json(self) -> dict:
        return {
            "phi": self.spec_label,
            "q": self.q,
            "N": self.N,
            "zeta": self.zeta,
            "rho": self.rho,
            "L": self.L,
            "liminf_estimate": self.liminf_estimate,
            "window": list(self.window),
            "deviation_density": {str(d): v for d, v in self.deviation_density.items()},
            "sequence": [[n, a] for n, a in self.sequence],
            "coeffwise_spec": self.coeffwise_spec,
            "coeffwise": [list(r) for r in self.coeffwise],
            "twisted_from": self.twisted_from,
        }


def _deviation_density(seq, L, lo, hi, deltas):
    window = [a for n, a in seq if lo <= n <= hi]
    out = {}
    for d in deltas:
        bad = sum(1 for a in window if not abs(a - L) < d)
        out[d] = bad / len(window) if window else math.nan
    return out


def coefficientwise_table(spec: PhiSpec, N: int, j_max: int) -> list:
    """Rows (j, n, n Phi_n [q^j] t_n, [q^j] L) from exact capped coefficients.

    Needs a rational zeta so that both columns are exact.
    """
    zeta = find_zeta(spec)
    if not (spec.is_exact and isinstance(zeta, Fraction)):
        raise DomainError("the coefficientwise table needs rational phi and rational zeta")
    ctx_spec = spec.rescaled(zeta, N)
    res = right_inverse(ctx_spec, N + 1, q_order=j_max)
    limits = L_as_q_series(spec, j_max, zeta)
    rows = []
    for j in range(j_max + 1):
        for n in range(1, N + 1):
            nphi = n * (1 - phi_eval(ctx_spec, 1 - Fraction(1, n)))
            rows.append((j, n, nphi * res.t[n].coeff(j), limits[j]))
    return rows


def theorem_main_report(spec: PhiSpec, q: float, N: int, rho=None, deltas=DELTA_GRID,
                        coeffwise_spec: PhiSpec | None = None, j_max: int = 4,
                        tol_root: float = 1e-14, tol_tail: float = 1e-12) -> ConvergenceReport:
    """a_n = n Phi_n t_n(q) for the zeta-rescaled phi, against L(q).

    The coefficientwise table is computed for ``coeffwise_spec`` (default:
    ``spec`` itself when its zeta is rational, otherwise skipped).
    """
    if spec.kind == "alternating":
        return alternating_wrap(theorem_main_report, spec, q, N, rho=rho, deltas=deltas,
                                coeffwise_spec=coeffwise_spec, j_max=j_max,
                                tol_root=tol_root, tol_tail=tol_tail)
    ctx = make_context(spec, q, rho, tol_root, tol_tail)
    scaled = spec.rescaled(ctx.zeta, N)
    res = right_inverse(scaled, N + 1, mode="numeric", q=float(q))
    seq = []
    for n in range(1, N + 1):
        seq.append((n, n * float(big_phi(ctx, n)) * float(res.t[n])))
    tail = [a for n, a in seq if n > N - N // 4]
    lo = max(1, N // 2)
    report = ConvergenceReport(
        spec_label=spec.describe(), q=float(q), N=N, zeta=ctx.zeta, rho=ctx.rho, L=ctx.L_value,
        sequence=seq, liminf_estimate=min(tail) if tail else math.nan, window=(lo, N),
        deviation_density=_deviation_density(seq, ctx.L_value, lo, N, deltas),
    )
    cw = coeffwise_spec
    if cw is None and spec.is_exact and isinstance(ctx.zeta, Fraction):
        cw = spec
    if cw is not None:
        report.coeffwise = coefficientwise_table(cw, min(N, 60), j_max)
        report.coeffwise_spec = cw.describe()
    return report


@dataclass(frozen=True)
class PolynomialLimit:
    constant: float
    zeta: object
    phi_prime_zeta: float
    euler_product: float
    theta_product: float
    consistency_gap: float


def polynomial_case_limit(spec: PhiSpec, q: float, tol_tail: float = 1e-12) -> PolynomialLimit:
    """Limit of zeta^n q^C(n,2) g_n for polynomial phi, through the theta factorization."""
    if not spec.is_polynomial or not spec.nonnegative:
        raise DomainError("the polynomial-case limit needs a nonnegative polynomial phi")
    q = float(q)
    if not 0 < q < 1:
        raise InvalidQ(f"needs 0 < q < 1, got {q}")
    zeta = find_zeta(spec)
    z = float(zeta)
    J = _tail_cutoff(q, tol_tail)
    euler = math.exp(math.fsum(math.log1p(-q**j) for j in range(1, J + 1)))
    one_minus = [1 - float(phi_eval(spec, z * q**j)) for j in range(1, J + 1)]
    theta = math.exp(math.fsum(math.log(v) - math.log1p(-q**j) for j, v in enumerate(one_minus, 1)))
    direct = math.exp(math.fsum(math.log(v) for v in one_minus))
    dphi = float(phi_prime(spec, zeta))
    gap = abs(euler * theta - direct)
    assert gap < 1e-10, f"theta factorization is off by {gap}"
    return PolynomialLimit(1 / (dphi * euler * theta), zeta, dphi, euler, theta, gap)


@dataclass
class RenewalReport:
    exact_ok: bool
    exact_failures: list
    table: list
    monotone: bool


def renewal_limit_check(spec: PhiSpec, N: int, q_grid=(0.1, 0.03, 0.01, 0.003, 0.001)) -> RenewalReport:
    """[q^0] t_n = tau_n exactly, and t_n(q) - tau_n shrinking as q decreases."""
    if not spec.is_exact:
        raise DomainError("the exact renewal check needs rational phi")
    tau = renewal_sequence(spec, N)
    res = right_inverse(spec, N + 1, q_order=0)
    failures = [n for n in range(N + 1) if res.t[n].coeff(0) != tau[n]]
    table = []
    grid = sorted((float(x) for x in q_grid), reverse=True)
    monotone = True
    for n in range(N + 1):
        prev = math.inf
        for qv in grid:
            num = right_inverse(spec, n + 1, mode="numeric", q=qv).t[n]
            diff = float(num) - float(tau[n])
            table.append((n, qv, diff))
            if abs(diff) > prev * (1 + 1e-12):
                monotone = False
            prev = abs(diff)
    return RenewalReport(not failures, failures, table, monotone)


@dataclass(frozen=True)
class AlternatingCheck:
    n_max: int
    ok: bool
    mismatches: tuple


def alternating_check(spec: PhiSpec, n_max: int) -> AlternatingCheck:
    """Solve for alt and inner separately and compare g^alt_n with (-1)^(n+1) g_n."""
    if spec.kind != "alternating":
        spec = PhiSpec.alternating(spec)
    inner = right_inverse(spec.inner, n_max)
    alt = right_inverse(spec, n_max)
    bad = []
    for n in range(1, n_max + 1):
        a, b = alt.g.coeffs[n], inner.g.coeffs[n]
        if a != (b if n % 2 else -b):
            bad.append(n)
    return AlternatingCheck(n_max, not bad, tuple(bad))


def alternating_wrap(report_fn, spec: PhiSpec, *args, check_up_to: int = 30, **kwargs):
    """Run a diagnostic for alt:<inner> through the inner spec.

    The sign relation between the two solutions is checked exactly first
    (for rational inner phi), then the inner report is returned tagged.
    """
    if spec.kind != "alternating":
        raise DomainError("alternating_wrap expects an alt: spec")
    if spec.inner.is_exact:
        chk = alternating_check(spec, check_up_to)
        assert chk.ok, f"sign relation fails at n in {chk.mismatches}"
    report = report_fn(spec.inner, *args, **kwargs)
    if hasattr(report, "twisted_from"):
        report.twisted_from = spec.describe()
    return report
