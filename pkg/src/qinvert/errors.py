"""Exception hierarchy shared by the library and the command line."""


class QInvertError(Exception):
    """Base class for every error raised on purpose by this package."""


class ConfigError(QInvertError, ValueError):
    """A run configuration or a textual input could not be parsed."""


class DomainError(QInvertError, ValueError):
    """An input is outside the mathematical domain of an operation."""


class InvalidQ(DomainError):
    pass


class NoRoot(DomainError):
    pass


class NoBracket(DomainError):
    pass


class NonConvergent(DomainError):
    pass


class ExactModeUnavailable(DomainError):
    pass


class FormalSolutionError(DomainError):
    pass


class EvaluationOverflow(DomainError, OverflowError):
    pass


class IrrationalRootWarning(UserWarning):
    """A root of f is only known numerically; extremality is then not a proof."""
