"""Exception hierarchy shared across the package."""


class CoklError(Exception):
    """Base class for all errors raised by this package."""


class InvalidData(CoklError, ValueError):
    pass


class DegenerateBandwidth(CoklError, ValueError):
    """Median pairwise distance is zero, so the RBF bandwidth is undefined."""


class NumericalError(CoklError, ArithmeticError):
    pass


class SingularBlock(NumericalError):
    """A Laplacian sub-block could not be inverted even after jitter."""


class CoverageError(CoklError, ValueError):
    """Some instance is absent from every view."""


class RankDeficient(NumericalError):
    pass


class ParseError(CoklError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(CoklError, ValueError):
    pass


class ConfigError(CoklError, ValueError):
    """Configuration failed validation. ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
