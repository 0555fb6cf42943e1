"""Exception hierarchy.  The CLI maps each class to an exit status."""


class CurlSpectrumError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    kind = "error"


class ValidationError(CurlSpectrumError, ValueError):
    exit_code = 2
    kind = "validation"


class TruncationError(ValidationError):
    """A query reaches past the completeness guarantee of a spectrum."""

    kind = "truncation"


class FixedPointError(ValidationError):
    """A nonidentity group element has eigenvalue 1."""

    kind = "fixed-point"

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class CountingIdentityError(CurlSpectrumError):
    """The two sides of the curl/Laplace counting identity disagree."""

    exit_code = 3
    kind = "counting-identity"


class NumericalResidualError(CurlSpectrumError, ArithmeticError):
    exit_code = 3
    kind = "residual"


class CapExceededError(CurlSpectrumError):
    exit_code = 4
    kind = "cap"


class ClosureCapError(CapExceededError):
    kind = "closure-cap"


class ShellCapError(CapExceededError):
    kind = "shell-cap"
