"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    pass


class ParseError(ValueError):
    """Malformed CSV input. ``row`` and ``column`` are 1-based when known."""

    def __init__(self, message, row=None, column=None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.row = row
        self.column = column


class InconsistentBoundaryError(ValueError):
    """The two boundary series entering a tile disagree at the shared corner."""


class NumericOverflowError(ArithmeticError):
    """A tile produced non-finite values. ``tile`` is the 0-based (k, l) pair."""

    def __init__(self, message, tile=None):
        if tile is not None:
            message = f"{message} at tile {tile}"
        super().__init__(message)
        self.tile = tile


class ResourceError(RuntimeError):
    pass


class FactorizationError(ArithmeticError):
    """A covariance matrix was not numerically positive definite."""
