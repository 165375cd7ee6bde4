"""Exception types shared across the package."""


class NotApplicableError(ValueError):
    """A method's closed form does not apply to the requested potential."""


class NonFiniteError(ArithmeticError):
    """A state component became non-finite during integration."""


class OverdampedError(ValueError):
    """The damped oscillator parameters fall outside the underdamped regime."""


class GridMismatchError(ValueError):
    """A coarse stepsize is not an integer multiple of the reference stepsize."""


class LengthMismatchError(ValueError):
    """Paired series have different lengths (or are empty)."""


class DegenerateFitError(ValueError):
    """A least-squares fit is underdetermined or ill-posed."""


class TooFewExtremaError(ValueError):
    """A series does not contain enough local maxima for a decay fit."""
