"""Truncated power series in z over a coefficient ring, with q-dilations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .arith import QLaurent
from .errors import DomainError

__all__ = [
    "TruncatedSeries",
    "series_mul",
    "q_dilate",
    "reciprocal_one_minus",
    "project_Pk",
    "series_divide",
    "series_derivative",
    "apply_U",
]


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients of z^0..z^order; everything beyond order is unknown."""

    coeffs: tuple
    ring: object

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a truncated series needs at least the z^0 coefficient")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def from_list(cls, values: Sequence, ring, order: int | None = None) -> "TruncatedSeries":
        vals = [ring.from_scalar(v) for v in values]
        if order is None:
            order = max(len(vals) - 1, 0)
        vals = (vals + [ring.zero] * (order + 1))[: order + 1]
        return cls(tuple(vals), ring)

    @classmethod
    def zero(cls, ring, order: int) -> "TruncatedSeries":
        return cls((ring.zero,) * (order + 1), ring)

    @classmethod
    def monomial(cls, k: int, ring, order: int, c=None) -> "TruncatedSeries":
        vals = [ring.zero] * (order + 1)
        if k <= order:
            vals[k] = ring.one if c is None else c
        return cls(tuple(vals), ring)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, m: int):
        if 0 <= m <= self.order:
            return self.coeffs[m]
        if m > self.order:
            raise IndexError(f"z^{m} is beyond the truncation order {self.order}")
        return self.ring.zero

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.coeffs[: order + 1], self.ring)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        add = self.ring.add
        return TruncatedSeries(tuple(add(self.coeffs[i], other.coeffs[i]) for i in range(n + 1)), self.ring)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        sub = self.ring.sub
        return TruncatedSeries(tuple(sub(self.coeffs[i], other.coeffs[i]) for i in range(n + 1)), self.ring)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(self.ring.neg(c) for c in self.coeffs), self.ring)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return self.scale(other)

    def scale(self, c) -> "TruncatedSeries":
        """Multiply every coefficient by a ring value or a rational scalar."""
        c = self.ring.from_scalar(c)
        return TruncatedSeries(tuple(self.ring.mul(x, c) for x in self.coeffs), self.ring)

    def shift_z(self, k: int = 1) -> "TruncatedSeries":
        """Multiply by z**k keeping the same order."""
        zeros = (self.ring.zero,) * k
        return TruncatedSeries((zeros + self.coeffs)[: self.order + 1], self.ring)

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return i
        return None

    def equals(self, other: "TruncatedSeries") -> bool:
        n = min(self.order, other.order)
        return all(self.ring.equal(self.coeffs[i], other.coeffs[i]) for i in range(n + 1))

    def evaluate(self, x) -> float:
        """Horner evaluation of the truncation at a real point (numeric rings)."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = min(a.order, b.order)
    ring = a.ring
    mul, add = ring.mul, ring.add
    ca, cb = a.coeffs, b.coeffs
    nz_a = [i for i in range(n + 1) if not ring.is_zero(ca[i])]
    nz_b = [j for j in range(n + 1) if not ring.is_zero(cb[j])]
    out = [ring.zero] * (n + 1)
    for i in nz_a:
        ai = ca[i]
        for j in nz_b:
            if i + j > n:
                break
            out[i + j] = add(out[i + j], mul(ai, cb[j]))
    return TruncatedSeries(tuple(out), ring)


def q_dilate(a: TruncatedSeries, k: int) -> TruncatedSeries:
    """Substitute z -> z/q^k: coefficient m is multiplied by q^(-k m)."""
    if k == 0:
        return a
    shift = a.ring.shift
    return TruncatedSeries(tuple(shift(c, -k * m) for m, c in enumerate(a.coeffs)), a.ring)


def reciprocal_one_minus(phi: TruncatedSeries) -> TruncatedSeries:
    """Renewal sequence: the series 1/(1 - phi)."""
    ring = phi.ring
    if not ring.is_zero(phi.coeffs[0]):
        raise DomainError("phi must have a zero constant term")
    tau = [ring.one]
    for n in range(1, phi.order + 1):
        acc = ring.zero
        for i in range(1, n + 1):
            if not ring.is_zero(phi.coeffs[i]):
                acc = ring.add(acc, ring.mul(phi.coeffs[i], tau[n - i]))
        tau.append(acc)
    return TruncatedSeries(tuple(tau), ring)


def project_Pk(a, k: int):
    """Keep the first k monomials (z^0..z^{k-1}, or q^0..q^{k-1} for a QLaurent)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if isinstance(a, QLaurent):
        return QLaurent({e: c for e, c in a.terms.items() if 0 <= e < k})
    ring = a.ring
    return TruncatedSeries(tuple(c if m < k else ring.zero for m, c in enumerate(a.coeffs)), ring)


def _inverse_of(ring, c):
    if isinstance(c, QLaurent):
        terms = c.terms
        if len(terms) != 1:
            raise DomainError("constant coefficient is not a unit in the Laurent ring")
        (e, v), = terms.items()
        return QLaurent.monomial(-e, 1 / v)
    if c == 0:
        raise DomainError("division by a series with zero constant coefficient")
    return ring.one / c


def series_divide(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """c with c*b = a up to the common order (recursive convolution solve)."""
    ring = b.ring
    n = min(a.order, b.order)
    if ring.is_zero(b.coeffs[0]):
        raise DomainError("division by a series with zero constant coefficient")
    inv0 = _inverse_of(ring, b.coeffs[0])
    nz_b = [j for j in range(1, n + 1) if not ring.is_zero(b.coeffs[j])]
    out = []
    for m in range(n + 1):
        acc = a.coeffs[m]
        for j in nz_b:
            if j > m:
                break
            acc = ring.sub(acc, ring.mul(b.coeffs[j], out[m - j]))
        out.append(ring.mul(acc, inv0))
    return TruncatedSeries(tuple(out), ring)


def series_derivative(a: TruncatedSeries) -> TruncatedSeries:
    ring = a.ring
    if a.order == 0:
        return TruncatedSeries((ring.zero,), ring)
    return TruncatedSeries(
        tuple(ring.scale(a.coeffs[m], m) for m in range(1, a.order + 1)), ring
    )


def apply_U(f: TruncatedSeries, qdir: int, target: TruncatedSeries) -> TruncatedSeries:
    """Linear extension of z^k -> f(z) f(q z) ... f(q^{k-1} z).

    ``qdir=-1`` uses 1/q in place of q, so that ``apply_U(g, -1, .)`` inverts
    ``apply_U(f, +1, .)`` when g is the right inverse of f.
    """
    if qdir not in (1, -1):
        raise ValueError("qdir must be +1 or -1")
    ring = f.ring
    n = min(f.order, target.order)
    f = f.truncate(n)
    power = TruncatedSeries.monomial(0, ring, n)
    out = TruncatedSeries.zero(ring, n)
    for k in range(n + 1):
        c = target.coeffs[k]
        if not ring.is_zero(c):
            out = out + TruncatedSeries(tuple(ring.mul(x, c) for x in power.coeffs), ring)
        if k < n:
            power = series_mul(power, q_dilate(f, -qdir * k))
    return out
