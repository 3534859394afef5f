"""Exception hierarchy shared across the package."""


class LaplaceCarlesonError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LaplaceCarlesonError, ValueError):
    """A function, grid or point lives on the wrong domain."""


class DivergentNormError(LaplaceCarlesonError, ArithmeticError):
    """The requested norm is infinite for the given function and weight."""


class GridMismatchError(LaplaceCarlesonError, ValueError):
    """Two sampled objects do not share a compatible grid."""


class AliasingError(LaplaceCarlesonError, RuntimeError):
    """A discrete transform cannot meet the requested accuracy on its grid."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class OutOfBandError(LaplaceCarlesonError, ValueError):
    """Signal energy outside the resolved dyadic band exceeds tolerance."""

    def __init__(self, message, fraction=None):
        super().__init__(message)
        self.fraction = fraction


class EmptyFamilyError(LaplaceCarlesonError, ValueError):
    """A search over intervals was requested with no candidates."""


class HypothesisError(LaplaceCarlesonError, ValueError):
    """Exponents violate the hypotheses of the requested inequality."""

    def __init__(self, message, hypothesis=""):
        super().__init__(message)
        self.hypothesis = hypothesis


class QuadratureError(LaplaceCarlesonError, RuntimeError):
    """A quadrature consistency check failed (e.g. non-monotone Hardy lines)."""


class AliasingWarning(UserWarning):
    """Sampled supports touch the edge of the grid."""
