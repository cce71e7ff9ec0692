"""Exception types raised across the package."""


class ValidationError(ValueError):
    """An input violates a documented invariant (unitarity, norm, ranges)."""


class CapacityError(RuntimeError):
    """A tree walk would exceed its configured maximum word length."""


class SingularSeriesError(ArithmeticError):
    """A power-series inversion or square root hit a bad constant term."""


class BranchError(ArithmeticError):
    """A branch choice for lambda(z) or a contour could not be made safely."""


class RegimeError(ValueError):
    """A specialised formula was called outside its parameter regime."""
