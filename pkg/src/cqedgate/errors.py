"""Exception types shared across the package."""


class CqedError(Exception):
    """Base class for errors raised by cqedgate."""


class ContractError(CqedError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateParametersError(CqedError, ArithmeticError):
    """The model is singular for the given parameters (e.g. g = kappa = gamma = 0)."""


class DegenerateWidthError(DegenerateParametersError):
    """A Gaussian width of zero was passed where a density is required."""


class DegenerateContrastError(DegenerateParametersError):
    """Reference intensities coincide, so a probability ratio is undefined."""


class NonIdentifiableError(CqedError, ArithmeticError):
    """The fit Jacobian is rank deficient.

    ``parameters`` lists the free parameters spanning the null space.
    """

    def __init__(self, parameters, message=None):
        self.parameters = list(parameters)
        super().__init__(message or "non-identifiable parameters: " + ", ".join(self.parameters))


class NegativeBackgroundWarning(UserWarning):
    """A background polynomial went negative and was clamped at zero."""
