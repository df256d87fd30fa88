"""Exceptions and warnings raised by zins

All exceptions derive from :class:`ZinsError`, so a caller can catch
everything the toolbox raises with a single clause. Where a builtin
exception describes the failure as well, the class inherits from it too,
e.g. a :class:`ConfigError` is also a :class:`ValueError`.
"""


class ZinsError(Exception):
    "base class of all zins exceptions"


class ConfigError(ZinsError, ValueError):
    """a configuration field is missing or malformed

    args
    ----
    path: str
        dotted path of the offending field, e.g. ``model.regimes[1].alpha_0``
    message: str
        what is wrong with it
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class GeneratorError(ZinsError, ValueError):
    "a matrix violates the generator invariants"


class DomainError(ZinsError, ValueError):
    "a coefficient was evaluated outside of its domain"


class TruncationError(ZinsError):
    "a truncation policy could not be constructed or does not admit a step"


class DivisibilityError(ZinsError, ValueError):
    "step sizes of a coupled family do not divide each other"


class NumericalError(ZinsError):
    """a simulation produced a non-finite value or an implicit solve failed

    args
    ----
    message: str
        description of the failure
    replay: dict
        everything needed to redraw the offending path in isolation, i.e.
        the master seed, the path index, the step size and the step
    """

    def __init__(self, message: str, replay: dict = None):
        self.replay = dict(replay or {})
        super().__init__(message)


class TruncationWarning(UserWarning):
    "the step size violates the growth condition Δ^(1/4)·ψ(Δ) <= 1"
