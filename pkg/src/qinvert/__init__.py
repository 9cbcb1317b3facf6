"""Exact and numeric solver for the q-Lagrange inversion equation.

    sum_n f_n g(z) g(z/q) ... g(z/q^(n-1)) = z,   f(z) = z (1 - phi(z)).
"""

__version__ = "0.1.0"

from .arith import QLaurent, laurent_coeff, laurent_eval, laurent_mul
from .errors import (ConfigError, DomainError, InvalidQ, NoBracket, NonConvergent, NoRoot,
                     QInvertError)
from .inversion import right_inverse, segner_oracle
from .phi import PhiSpec, parse_phi
from .series import TruncatedSeries

__all__ = [
    "__version__",
    "QLaurent",
    "laurent_mul",
    "laurent_eval",
    "laurent_coeff",
    "TruncatedSeries",
    "PhiSpec",
    "parse_phi",
    "right_inverse",
    "segner_oracle",
    "QInvertError",
    "ConfigError",
    "DomainError",
    "InvalidQ",
    "NoRoot",
    "NoBracket",
    "NonConvergent",
]
