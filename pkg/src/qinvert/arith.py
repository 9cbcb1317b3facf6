"""Exact rationals, Laurent polynomials in q, and the coefficient rings.

A :class:`QLaurent` keeps a common positive denominator and a dense run of
integer numerators starting at its lowest exponent.  Products are then plain
integer convolutions, which is where nearly all of the exact-mode time goes.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping

from .errors import ConfigError, EvaluationOverflow, InvalidQ

Rational = Fraction

__all__ = [
    "Rational",
    "parse_rational",
    "format_rational",
    "QLaurent",
    "laurent_mul",
    "laurent_eval",
    "laurent_coeff",
    "LaurentRing",
    "ScalarRing",
]


def parse_rational(text) -> Fraction:
    """Parse ``"a/b"``, an integer or a finite decimal into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {text!r}") from exc


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# -- integer convolution ---------------------------------------------------

_NAIVE_LIMIT = 400


def _convolve_int(a: tuple, b: tuple) -> list:
    """Product of two integer coefficient lists (Kronecker substitution)."""
    if not a or not b:
        return []
    if len(a) * len(b) <= _NAIVE_LIMIT:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(y) for y in b)
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    k = 8 * nbytes
    pa = int.from_bytes(b"".join(_digit_bytes(x, nbytes) for x in reversed(a)), "big", signed=False)
    pb = int.from_bytes(b"".join(_digit_bytes(y, nbytes) for y in reversed(b)), "big", signed=False)
    # the packed operands hold two's-complement digits; undo the wrap by subtracting
    # the borrow masks so that pa, pb are the true signed packings
    pa -= _borrow(a, k)
    pb -= _borrow(b, k)
    n_out = len(a) + len(b) - 1
    half = 1 << (k - 1)
    bias = int.from_bytes(bytes([0x80] + [0] * (nbytes - 1)) * n_out, "big")
    packed = pa * pb + bias
    raw = packed.to_bytes(nbytes * n_out, "big")
    out = []
    for m in range(n_out):
        end = len(raw) - m * nbytes
        out.append(int.from_bytes(raw[end - nbytes:end], "big") - half)
    return out


def _digit_bytes(x: int, nbytes: int) -> bytes:
    return (x % (1 << (8 * nbytes))).to_bytes(nbytes, "big")


def _borrow(coeffs: tuple, k: int) -> int:
    total = 0
    for i, x in enumerate(coeffs):
        if x < 0:
            total += 1 << (k * (i + 1))
    return total


# -- Laurent polynomials ---------------------------------------------------


class QLaurent:
    """Immutable Laurent polynomial in q with rational coefficients."""

    __slots__ = ("_lo", "_c", "_den", "_hash")

    def __init__(self, terms: Mapping[int, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for e, c in items:
            c = parse_rational(c) if not isinstance(c, _RationalABC) else Fraction(c)
            if c:
                acc[int(e)] = acc.get(int(e), Fraction(0)) + c
        acc = {e: c for e, c in acc.items() if c}
        if not acc:
            self._set(0, (), 1)
            return
        den = math.lcm(*(c.denominator for c in acc.values()))
        lo, hi = min(acc), max(acc)
        nums = [0] * (hi - lo + 1)
        for e, c in acc.items():
            nums[e - lo] = c.numerator * (den // c.denominator)
        self._set(lo, tuple(nums), den)

    def _set(self, lo: int, c: tuple, den: int) -> None:
        self._lo = lo
        self._c = c
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, lo: int, nums, den: int) -> "QLaurent":
        """Build from integer numerators over ``den``, normalising the result."""
        nums = list(nums)
        start = 0
        while start < len(nums) and nums[start] == 0:
            start += 1
        end = len(nums)
        while end > start and nums[end - 1] == 0:
            end -= 1
        obj = cls.__new__(cls)
        if start == end:
            obj._set(0, (), 1)
            return obj
        nums = nums[start:end]
        if den < 0:
            den = -den
            nums = [-x for x in nums]
        g = math.gcd(den, *nums)
        if g > 1:
            den //= g
            nums = [x // g for x in nums]
        obj._set(lo + start, tuple(nums), den)
        return obj

    @classmethod
    def constant(cls, c) -> "QLaurent":
        c = Fraction(c)
        return cls._raw(0, [c.numerator], c.denominator)

    @classmethod
    def monomial(cls, exponent: int, c=1) -> "QLaurent":
        c = Fraction(c)
        return cls._raw(exponent, [c.numerator], c.denominator)

    # -- inspection
    @property
    def terms(self) -> dict[int, Fraction]:
        return {
            self._lo + i: Fraction(x, self._den) for i, x in enumerate(self._c) if x
        }

    def is_zero(self) -> bool:
        return not self._c

    @property
    def min_exponent(self) -> int | None:
        return self._lo if self._c else None

    @property
    def max_exponent(self) -> int | None:
        return self._lo + len(self._c) - 1 if self._c else None

    def coeff(self, j: int) -> Fraction:
        i = j - self._lo
        if 0 <= i < len(self._c):
            return Fraction(self._c[i], self._den)
        return Fraction(0)

    def coefficients(self, lo: int, hi: int) -> list[Fraction]:
        return [self.coeff(j) for j in range(lo, hi + 1)]

    # -- arithmetic
    def __add__(self, other) -> "QLaurent":
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        if not self._c:
            return other
        if not other._c:
            return self
        den = math.lcm(self._den, other._den)
        fa, fb = den // self._den, den // other._den
        lo = min(self._lo, other._lo)
        hi = max(self._lo + len(self._c), other._lo + len(other._c))
        nums = [0] * (hi - lo)
        off = self._lo - lo
        for i, x in enumerate(self._c):
            nums[off + i] = x * fa
        off = other._lo - lo
        for i, x in enumerate(other._c):
            nums[off + i] += x * fb
        return QLaurent._raw(lo, nums, den)

    __radd__ = __add__

    def __neg__(self) -> "QLaurent":
        obj = QLaurent.__new__(QLaurent)
        obj._set(self._lo, tuple(-x for x in self._c), self._den)
        return obj

    def __sub__(self, other) -> "QLaurent":
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "QLaurent":
        return (-self) + other

    def __mul__(self, other) -> "QLaurent":
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other, cap: int | None = None) -> "QLaurent":
        """Product, optionally discarding exponents above ``cap``."""
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other or not self._c:
                return QLaurent()
            return QLaurent._raw(
                self._lo,
                [x * other.numerator for x in self._c],
                self._den * other.denominator,
            )
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        if not self._c or not other._c:
            return QLaurent()
        a, b = self._c, other._c
        lo = self._lo + other._lo
        if cap is not None:
            keep = cap - lo + 1
            if keep <= 0:
                return QLaurent()
            a, b = a[:keep], b[:keep]
            nums = _convolve_int(a, b)[:keep]
        else:
            nums = _convolve_int(a, b)
        return QLaurent._raw(lo, nums, self._den * other._den)

    def shift(self, e: int) -> "QLaurent":
        """Multiply by q**e."""
        if not self._c or e == 0:
            return self
        obj = QLaurent.__new__(QLaurent)
        obj._set(self._lo + e, self._c, self._den)
        return obj

    def truncate(self, max_exponent: int) -> "QLaurent":
        if not self._c or self.max_exponent <= max_exponent:
            return self
        keep = max_exponent - self._lo + 1
        if keep <= 0:
            return QLaurent()
        return QLaurent._raw(self._lo, self._c[:keep], self._den)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QLaurent.constant(other)
        if not isinstance(other, QLaurent):
            return NotImplemented
        return (self._lo, self._c, self._den) == (other._lo, other._c, other._den)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._lo, self._c, self._den))
        return self._hash

    # -- evaluation and text
    def evaluate(self, x) -> float:
        return laurent_eval(self, x)

    def __repr__(self) -> str:
        return f"QLaurent({str(self)!r})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                var = "q" if e == 1 else f"q^{e}"
                body = var if mag == 1 else f"{mag}*{var}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += sign + body
        return text

    def to_json(self) -> dict:
        return {"terms": [[e, format_rational(c)] for e, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, obj) -> "QLaurent":
        return cls((int(e), parse_rational(c)) for e, c in obj["terms"])


def _as_laurent(x):
    if isinstance(x, QLaurent):
        return x
    if isinstance(x, (int, Fraction)):
        return QLaurent.constant(x)
    return NotImplemented


def laurent_mul(a: QLaurent, b: QLaurent) -> QLaurent:
    return a.mul(b)


def laurent_coeff(a: QLaurent, j: int) -> Fraction:
    return a.coeff(j)


def laurent_eval(a: QLaurent, q_value) -> float:
    """Evaluate at a real q, summing the rounded terms with fsum."""
    if a.is_zero():
        return 0.0
    x = float(q_value)
    lo = a.min_exponent
    if lo < 0 and (x <= 0 or x == 1.0):
        raise InvalidQ(f"cannot evaluate a Laurent polynomial with negative exponents at q={x}")
    terms = []
    try:
        for i, num in enumerate(a._c):
            if num:
                terms.append((num / a._den) * x ** (lo + i))
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvaluationOverflow(f"term of {a} overflows at q={x}") from exc
    total = math.fsum(terms)
    if math.isinf(total):
        raise EvaluationOverflow(f"{a} overflows at q={x}")
    return total


# -- coefficient rings -----------------------------------------------------


class LaurentRing:
    """Exact mode: q is formal and values are :class:`QLaurent`.

    ``q_cap`` discards every exponent above it.  That is exact for all
    coefficients up to the cap as long as only nonnegative shifts are used,
    which is the case for the normalised recursions.
    """

    exact = True
    q = None

    def __init__(self, q_cap: int | None = None):
        self.q_cap = q_cap
        self.zero = QLaurent()
        self.one = QLaurent.constant(1)

    def __repr__(self) -> str:
        return f"LaurentRing(q_cap={self.q_cap})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentRing) and other.q_cap == self.q_cap

    def __hash__(self) -> int:
        return hash(("laurent", self.q_cap))

    def from_scalar(self, c) -> QLaurent:
        if isinstance(c, QLaurent):
            return self._cap(c)
        return QLaurent.constant(c)

    def _cap(self, v: QLaurent) -> QLaurent:
        return v if self.q_cap is None else v.truncate(self.q_cap)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        if isinstance(b, QLaurent):
            return a.mul(b, self.q_cap)
        return self._cap(a.mul(b))

    def scale(self, a, c):
        return a.mul(Fraction(c))

    def shift(self, a, e: int):
        return self._cap(a.shift(e))

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def equal(self, a, b) -> bool:
        return a == b

    def evaluate(self, a, q_value) -> float:
        return laurent_eval(a, q_value)


class ScalarRing:
    """Numeric mode: q is a fixed number and each value is a single number.

    With ``q`` a Fraction (or None, when no shift is needed) the arithmetic is
    exact; with a float ``q`` values are floats and equality is relative.
    """

    def __init__(self, q=None, rtol: float = 1e-9):
        if isinstance(q, int):
            q = Fraction(q)
        self.q = q
        self.rtol = rtol
        self.exact = q is None or isinstance(q, Fraction)
        self.zero = Fraction(0) if self.exact else 0.0
        self.one = Fraction(1) if self.exact else 1.0
        self.q_cap = None

    def __repr__(self) -> str:
        return f"ScalarRing(q={self.q!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarRing) and (other.q, other.rtol) == (self.q, self.rtol)

    def __hash__(self) -> int:
        return hash(("scalar", self.q, self.rtol))

    def from_scalar(self, c):
        if self.exact:
            return Fraction(c)
        return float(c)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def scale(self, a, c):
        return a * (c if self.exact else float(c))

    def shift(self, a, e: int):
        if self.q is None:
            raise InvalidQ("this ring has no q to shift by")
        if not a:
            return a
        try:
            return a * self.q**e
        except OverflowError:
            return math.copysign(math.inf, a)

    def is_zero(self, a) -> bool:
        return a == 0

    def equal(self, a, b) -> bool:
        if self.exact:
            return a == b
        return math.isclose(a, b, rel_tol=self.rtol, abs_tol=0.0) or a == b

    def evaluate(self, a, q_value=None) -> float:
        return float(a)
