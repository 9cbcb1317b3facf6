"""The problem datum phi, where f(z) = z (1 - phi(z)).

Command-line grammar (see :func:`parse_phi`)::

    catalan | fractional:<rho> | exponential:<lambda> | explicit:<c1,c2,...>
    alt:<any of the above>
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import parse_rational, format_rational
from .errors import ConfigError, DomainError

__all__ = ["PhiSpec", "phi_coeff", "parse_phi"]

_KINDS = ("explicit", "catalan", "fractional", "exponential", "alternating")


@dataclass(frozen=True)
class PhiSpec:
    kind: str
    coeffs: tuple = ()
    param: object = None
    inner: "PhiSpec | None" = None
    zeta: object = None
    rho: object = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown phi family {self.kind!r}")
        if self.kind == "explicit":
            if any(c < 0 for c in self.coeffs) and not self.label.startswith("rescaled"):
                raise DomainError("explicit phi coefficients must be nonnegative; wrap in alt: for signs")
        if self.rho is not None and not (0 < float(self.rho) <= 1):
            raise DomainError(f"rho must lie in (0, 1], got {self.rho}")

    # -- constructors
    @classmethod
    def catalan(cls) -> "PhiSpec":
        return cls("catalan", zeta=Fraction(1), rho=Fraction(1))

    @classmethod
    def explicit(cls, coeffs: Sequence) -> "PhiSpec":
        """phi = c1 z + c2 z^2 + ...; coefficients may be rationals or floats."""
        cs = tuple(c if isinstance(c, float) else parse_rational(c) for c in coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        zeta = None
        if cs and all(isinstance(c, Fraction) for c in cs) and sum(cs) == 1:
            zeta = Fraction(1)
        return cls("explicit", coeffs=cs, zeta=zeta, rho=Fraction(1))

    @classmethod
    def fractional(cls, rho) -> "PhiSpec":
        rho = float(rho)
        if not 0 < rho < 1:
            raise DomainError(f"fractional family needs rho in (0, 1), got {rho}")
        return cls("fractional", param=rho, zeta=Fraction(1), rho=rho)

    @classmethod
    def exponential(cls, lam) -> "PhiSpec":
        lam = float(lam)
        if lam < 0:
            raise DomainError(f"exponential family needs lambda >= 0, got {lam}")
        return cls("exponential", param=lam, zeta=math.log1p(math.exp(-lam)), rho=Fraction(1))

    @classmethod
    def alternating(cls, inner: "PhiSpec") -> "PhiSpec":
        if inner.kind == "alternating":
            raise ConfigError("alt: cannot be nested")
        return cls("alternating", inner=inner, rho=inner.rho)

    # -- properties
    @property
    def is_exact(self) -> bool:
        """True when every coefficient is rational, so exact mode applies."""
        if self.kind == "catalan":
            return True
        if self.kind == "explicit":
            return all(isinstance(c, Fraction) for c in self.coeffs)
        if self.kind == "alternating":
            return self.inner.is_exact
        return False

    @property
    def degree(self) -> int | None:
        """Degree of phi as a polynomial, None for infinite families."""
        if self.kind == "catalan":
            return 1
        if self.kind == "explicit":
            return len(self.coeffs)
        if self.kind == "alternating":
            return self.inner.degree
        return None

    @property
    def is_polynomial(self) -> bool:
        return self.degree is not None

    @property
    def nonnegative(self) -> bool:
        return self.kind != "alternating"

    @property
    def is_zero(self) -> bool:
        return self.degree == 0

    def coeff(self, n: int):
        return phi_coeff(self, n)

    def coeffs_upto(self, n_max: int) -> list:
        """[phi_0, phi_1, ..., phi_{n_max}] with phi_0 = 0."""
        zero = Fraction(0) if self.is_exact else 0.0
        out = [zero]
        if self.kind == "fractional":
            rho = self.param
            c = rho
            for n in range(1, n_max + 1):
                if n > 1:
                    c *= (n - 1 - rho) / n
                out.append(c)
            return out
        if self.kind == "exponential":
            c = math.exp(self.param)
            for n in range(1, n_max + 1):
                c /= n
                out.append(c)
            return out
        for n in range(1, n_max + 1):
            out.append(phi_coeff(self, n))
        return out

    def describe(self) -> str:
        """The command-line spelling of this spec."""
        if self.kind == "catalan":
            return "catalan"
        if self.kind == "fractional":
            return f"fractional:{self.param!r}"
        if self.kind == "exponential":
            return f"exponential:{self.param!r}"
        if self.kind == "alternating":
            return "alt:" + self.inner.describe()
        if self.label.startswith("rescaled"):
            return self.label
        return "explicit:" + ",".join(
            format_rational(c) if isinstance(c, Fraction) else repr(c) for c in self.coeffs
        )

    def rescaled(self, zeta, n_max: int) -> "PhiSpec":
        """phi(zeta z), truncated after z^n_max when phi is not a polynomial."""
        if zeta == 1:
            return self
        if self.kind == "alternating":
            raise DomainError("rescale the inner spec of an alternating phi instead")
        exact = self.is_exact and isinstance(zeta, Fraction)
        deg = self.degree if self.degree is not None else n_max
        cs = self.coeffs_upto(deg)[1:]
        if exact:
            new = tuple(c * zeta ** (i + 1) for i, c in enumerate(cs))
        else:
            z = float(zeta)
            new = tuple(float(c) * z ** (i + 1) for i, c in enumerate(cs))
        return PhiSpec("explicit", coeffs=new, zeta=Fraction(1) if exact else 1.0,
                       rho=self.rho, label=f"rescaled:{self.describe()}")


def phi_coeff(spec: PhiSpec, n: int):
    """phi_n = [z^n] phi, exact for rational families and float otherwise."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(0) if spec.is_exact else 0.0
    kind = spec.kind
    if kind == "catalan":
        return Fraction(1) if n == 1 else Fraction(0)
    if kind == "explicit":
        if n <= len(spec.coeffs):
            return spec.coeffs[n - 1]
        return Fraction(0) if spec.is_exact else 0.0
    if kind == "fractional":
        rho = spec.param
        c = rho
        for k in range(2, n + 1):
            c *= (k - 1 - rho) / k
        return c
    if kind == "exponential":
        return math.exp(spec.param) / math.factorial(n)
    inner = phi_coeff(spec.inner, n)
    return -inner if n % 2 else inner


def parse_phi(text: str) -> PhiSpec:
    """Parse the command-line grammar into a :class:`PhiSpec`."""
    text = text.strip()
    if text.startswith("alt:"):
        return PhiSpec.alternating(parse_phi(text[4:]))
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "catalan" and not arg:
            return PhiSpec.catalan()
        if name == "fractional":
            return PhiSpec.fractional(float(parse_rational(arg)))
        if name == "exponential":
            return PhiSpec.exponential(float(parse_rational(arg)))
        if name == "explicit" and arg:
            return PhiSpec.explicit([parse_rational(c) for c in arg.split(",")])
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise ConfigError(f"bad phi argument in {text!r}: {exc}") from exc
    raise ConfigError(
        f"cannot parse phi {text!r}; expected catalan, fractional:<rho>, "
        "exponential:<lambda>, explicit:<c1,...> or alt:<spec>"
    )
