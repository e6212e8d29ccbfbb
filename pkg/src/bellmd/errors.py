"""Exception types shared across the package."""


class InputError(ValueError):
    """Rejected input: malformed data, dimension mismatch, or a broken precondition."""


class InvariantError(ArithmeticError):
    """A numeric postcondition failed; signals an internal defect, not bad input."""
