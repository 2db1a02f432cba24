"""Exception types raised across the package."""


class ExprNetError(Exception):
    pass


class ZeroVariance(ExprNetError, ValueError):
    pass


class LengthMismatch(ExprNetError, ValueError):
    pass


class TargetInParents(ExprNetError, ValueError):
    pass


class TargetInCandidates(ExprNetError, ValueError):
    pass


class NoCandidates(ExprNetError, ValueError):
    pass


class UnknownGene(ExprNetError, KeyError):
    pass


class EmptyInput(ExprNetError, ValueError):
    pass


class ParseError(ExprNetError, ValueError):
    """Malformed CSV content. ``row`` and ``col`` are 1-based file coordinates."""

    def __init__(self, message, row=None, col=None):
        self.row = row
        self.col = col
        if row is not None:
            message = f"{message} at ({row},{col})" if col is not None else f"{message} at row {row}"
        super().__init__(message)


class ValidationError(ExprNetError, ValueError):
    pass
