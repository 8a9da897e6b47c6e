"""Exception types shared across the package."""


class DsscError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(DsscError, ValueError):
    """An argument or configuration value is outside its admissible range."""


class DimensionError(DsscError, ValueError):
    """Array shapes are inconsistent with the requested operation."""


class MatrixFormatError(DsscError, ValueError):
    """A matrix or label file violates the expected on-disk format."""


class MatrixParseError(MatrixFormatError):
    """A token in a text matrix file could not be parsed; message carries
    the 1-based line and column location."""


class DivergenceError(DsscError, ArithmeticError):
    """A diffusion operation cannot converge because the input is not
    sub-stochastic (some row sum >= 1)."""


class DegenerateGraphError(DsscError, ValueError):
    """The affinity graph has no edge mass where the operation needs some
    (all-zero matrix, zero volume)."""
