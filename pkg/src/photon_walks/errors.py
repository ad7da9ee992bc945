"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class ResourceError(RuntimeError):
    """Requested problem size exceeds a configured limit."""


class NumericalError(ArithmeticError):
    """A linear-algebra routine failed or produced non-finite output."""
