"""Exception types shared across the package."""


class FactflowError(Exception):
    """Base class for all errors raised by factflow."""


class GraphFormatError(FactflowError):
    """A triple source or dataset file is malformed.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownEntityError(FactflowError):
    """A node or relation label/id does not resolve in the graph."""


class InternalInvariantError(FactflowError):
    """An internal algorithmic invariant was violated (implementation bug)."""
