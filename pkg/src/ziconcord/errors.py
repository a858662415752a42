"""Exception types raised by the package."""


class InvalidInputError(ValueError):
    """Argument outside its documented domain."""


class DegenerateMarginError(ValueError):
    """A quantile was requested beyond a margin that has no positive mass."""


class CSVParseError(ValueError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class TieError(ValueError):
    """Tied positive values found while the tie policy forbids them."""


class ExperimentError(RuntimeError):
    """A simulation repetition failed; carries the cell and repetition."""
