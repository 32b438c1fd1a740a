"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class G0Violation(ArithmeticError):
    """The error density's Mellin transform vanishes (numerically) at a grid node."""

    def __init__(self, t, modulus):
        self.t = float(t)
        self.modulus = float(modulus)
        super().__init__(
            f"Mellin transform of the error density is {modulus:.3e} at t={t!r}; "
            "deconvolution is ill-posed there"
        )


class DegenerateEstimate(ArithmeticError):
    """The heuristic estimate cannot be normalized (its positive part vanishes)."""


class UnsupportedConfiguration(ValueError):
    """A valid-looking configuration that the implementation does not support."""


class ExperimentFailure(ArithmeticError):
    """Too many Monte Carlo replications failed numerically to report a result."""
