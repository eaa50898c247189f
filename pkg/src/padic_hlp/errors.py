"""Exception types raised across the package."""


class PadicHLPError(Exception):
    """Base class for all package errors."""


class ZeroInputError(PadicHLPError, ValueError):
    """A nonzero p-adic number was required."""


class BadWindowError(PadicHLPError, ValueError):
    """A valuation window is empty or misses the support it must cover."""


class DivergesError(PadicHLPError, ArithmeticError):
    """A radial integral diverges.

    ``sides`` lists every end at which the integral blows up, drawn from
    ``"origin"`` and ``"infinity"``; ``which`` is the first of them.
    """

    def __init__(self, sides, detail=""):
        self.sides = tuple(sides)
        self.which = self.sides[0]
        msg = "integral diverges at " + " and ".join(self.sides)
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotAvailableError(PadicHLPError):
    """No closed-form norm is known in this regime."""


class NotBoundedError(NotAvailableError):
    """The operator is unbounded, so it has no finite norm to report."""


class WrongRegimeError(PadicHLPError, ValueError):
    """The requested route does not apply to these exponents."""


class InfeasibleFreeParamsError(PadicHLPError, ValueError):
    """Schur free parameters lie outside their admissible window."""


class WindowTooShallowError(PadicHLPError):
    """The truncation tail is too large relative to the quantity measured."""


class OverflowFlag(PadicHLPError, OverflowError):
    """A value left the representable floating-point range."""
