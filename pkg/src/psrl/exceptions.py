"""Exception hierarchy shared by every module of the package."""


class PsrlError(Exception):
    """Base class for all errors raised by psrl."""


class SingularMatrix(PsrlError, ArithmeticError):
    pass


class NoConvergence(PsrlError, ArithmeticError):
    pass


class Undecided(PsrlError):
    """A numeric decision fell inside the safety band around its threshold."""


class SpectralRadiusNotLtOne(PsrlError, ValueError):
    pass


class NotPseudoStochastic(PsrlError, ValueError):
    pass


class DegenerateNormalizer(PsrlError, ArithmeticError):
    """Every clamped mass vanished at a prefix that still carries probability."""


class ZeroPrefixMass(PsrlError, ValueError):
    pass


class StateCapExceeded(PsrlError, RuntimeError):
    pass


class ResourceLimitExceeded(PsrlError, RuntimeError):
    pass


class FormatError(PsrlError, ValueError):
    """Raised when an automaton or sample file does not follow its grammar."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
