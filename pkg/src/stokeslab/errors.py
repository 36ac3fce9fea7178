"""Exception hierarchy shared by all stokeslab modules."""


class StokeslabError(Exception):
    """Base class for all toolkit errors."""


class InvalidGeometryError(StokeslabError):
    """Degenerate box, non-positive spacing/shape, or bad region parameters."""


class DegreeError(StokeslabError):
    """Operation applied to a chain/cochain/form of the wrong degree."""


class ComplexMismatchError(StokeslabError):
    """Chain and cochain (or two chains) live on different complexes."""


class ChartMismatchError(StokeslabError):
    """Analytic form and complex/region use different charts."""


class NotACycleError(StokeslabError):
    """Interior requested for a chain with nonempty boundary."""


class NoInteriorError(StokeslabError):
    """Closed chain does not bound an n-cell subset of the complex."""


class ExpressionError(StokeslabError):
    """Syntax error or unknown identifier in an expression string.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DomainError(StokeslabError):
    """Point, ball, or region leaves the form's domain."""


class NormalizationError(StokeslabError):
    """Total mass Z = int |alpha| vanishes; densities are undefined."""


class ZeroMassError(StokeslabError):
    """Ball mass is zero, so the mass-equivalent radius is undefined."""


class SingularPointError(StokeslabError):
    """Density requested at a singular point of the form."""


class NoLimitError(StokeslabError):
    """Epsilon schedule did not converge within the residual tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TooLargeError(StokeslabError):
    """Exhaustive enumeration requested above the subset cap."""
