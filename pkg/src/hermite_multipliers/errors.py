"""Exception types shared across the package."""


class HermiteError(ValueError):
    """Base class for invalid inputs to the Hermite toolkit."""


class SizingError(HermiteError):
    """A requested grid or matrix would exceed the configured memory cap."""


class GridMismatchError(HermiteError):
    """A grid function does not live on a grid usable with the given basis."""


class CutoffError(HermiteError):
    """An index lies outside the degree cutoff of the basis."""


class SymbolError(HermiteError):
    """Invalid symbol family, parameters, or evaluation outside a declared range."""
