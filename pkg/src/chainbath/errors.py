"""Exception types raised by chainbath."""


class ChainBathError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ChainBathError, ValueError):
    """A physical or numerical parameter is out of its valid range."""


class UnitError(InvalidParameterError):
    """Unknown unit, or a conversion between incompatible dimensions."""


class LanczosBreakdownError(ChainBathError, ArithmeticError):
    """The Krylov recursion lost rank before the chain was complete."""

    def __init__(self, step, residual, message=None):
        self.step = step
        self.residual = residual
        super().__init__(
            message
            or f"Lanczos breakdown at step {step} (residual norm {residual:.3e})"
        )


class DegenerateSeedError(InvalidParameterError):
    """The two block-Lanczos seed vectors are (nearly) parallel."""


class DimensionError(InvalidParameterError):
    """Tensor or Hilbert-space dimensions are inconsistent or too large."""


class NumericalFailureError(ChainBathError, ArithmeticError):
    """Non-finite numbers appeared during time evolution."""


class ConfigError(ChainBathError):
    """A run configuration failed validation.

    ``problems`` holds every violation found, so they can be reported at once.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
