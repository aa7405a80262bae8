"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a physical or structural invariant."""


class NumericalError(ArithmeticError):
    """A computation could not produce a meaningful number (singular fit, degenerate scan)."""
