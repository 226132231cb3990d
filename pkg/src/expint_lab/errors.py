"""Semantic exceptions shared across the package."""


class ExpIntLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ExpIntLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class TableRangeError(DomainError):
    """A table query lies outside the tabulated domain (never extrapolated)."""

    def __init__(self, name: str, x, lo: float, hi: float):
        self.name = name
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"{name}: argument {x!r} outside tabulated domain [{lo:g}, {hi:g}]"
        )


class ResourceLimitError(ExpIntLabError, RuntimeError):
    """A size cap (tree depth, sample count) would be exceeded."""
