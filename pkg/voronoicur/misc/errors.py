"""
Exceptions raised by :mod:`voronoicur`.

Each exception subclasses the builtin a caller would naturally catch, so
``except ValueError`` keeps working for code that does not care about the
finer distinction.
"""


class ParameterError(ValueError):
    """An argument is out of range or inconsistent with another argument."""


class DegenerateInputError(ValueError):
    """The input carries no information for the requested operation (e.g. all zeros)."""


class DegenerateSetError(RuntimeError):
    """
    A Voronoi set is empty and cannot be repaired.

    Attributes
    ----------
    set_index : int
        Index of the offending set.
    """

    def __init__(self, message, set_index):
        super().__init__(message)
        self.set_index = set_index


class RankDeficiencyError(ValueError):
    """
    The basis handed to DEIM does not have full column rank.

    Attributes
    ----------
    column : int
        The first column whose interpolation residual vanished.
    """

    def __init__(self, message, column):
        super().__init__(message)
        self.column = column


class IdxParseError(ValueError):
    """
    Malformed IDX data.

    Attributes
    ----------
    offset : int
        Byte offset at which parsing failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class MatrixParseError(ValueError):
    """
    Malformed text matrix file.

    Attributes
    ----------
    line : int
        One-based line number at which parsing failed.
    """

    def __init__(self, message, line):
        super().__init__(f"{message} (line {line})")
        self.line = line
