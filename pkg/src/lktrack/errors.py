class DimensionError(ValueError):
    """Array shapes are too small or do not line up."""


class SingularHessianError(ArithmeticError):
    """A 2x2 system is too ill-conditioned to invert."""


class DegenerateHessianError(ArithmeticError):
    """Second-derivative field is identically zero (flat patch)."""


class DegenerateInputError(ValueError):
    """Point set has fewer than three non-collinear points."""


class ParseError(ValueError):
    """A frame or ground-truth file could not be read."""
