class TriangleError(Exception):
    """Base class for every error raised by the triangles package."""


class DomainError(TriangleError, ValueError):
    """An argument lies outside the domain of the operation."""


class IntegrandError(DomainError):
    """The integrand produced a non-finite value at an interior abscissa."""

    def __init__(self, x, value):
        super().__init__(f"integrand is not finite at x={x!r} (got {value!r})")
        self.x = x
        self.value = value


class ConvergenceError(TriangleError, ArithmeticError):
    """A series or quadrature did not reach its tolerance within its budget."""


class SamplingError(TriangleError, RuntimeError):
    """The rejection loop exceeded its trial cap."""


class UnknownConstantError(TriangleError, KeyError):
    """The reference table has no record (or no such evaluation path) for a key."""


class ChiSquareError(DomainError):
    """A chi-square test cannot be formed from the given histogram."""
