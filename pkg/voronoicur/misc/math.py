"""
Common definitions.
"""

import numpy as np

from voronoicur.misc.errors import ParameterError

INTEGER_TYPES = (
    int,
    np.integer,
)

FLOAT_TYPES = (
    float,
    np.floating,
)

REAL_TYPES = (
    *INTEGER_TYPES,
    *FLOAT_TYPES,
)

# Unit roundoff of float64, 2^-52.
EPS = np.finfo(np.float64).eps


def as_matrix(A, name="A"):
    """
    Coerce ``A`` to a finite, two-dimensional, column-major ``float64`` array.

    Parameters
    ----------
    A : array_like
        Data to coerce. One-dimensional input is treated as a single column.
    name : str
        Name used in error messages.

    Returns
    -------
    numpy.ndarray
        Fortran-ordered ``float64`` matrix. This is a view of ``A`` when no
        conversion is needed.

    Raises
    ------
    ParameterError
        If ``A`` has more than two dimensions, is empty, or has non-finite entries.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ParameterError(f"{name} must be a matrix; got shape {A.shape}.")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ParameterError(f"{name} must have positive dimensions; got shape {A.shape}.")
    if not np.all(np.isfinite(A)):
        raise ParameterError(f"{name} contains non-finite entries.")
    return np.asfortranarray(A)


def check_count(value, name, minimum=1, maximum=None):
    """
    Validate an integer parameter and return it as ``int``.

    Parameters
    ----------
    value
        Candidate value.
    name : str
        Parameter name used in error messages.
    minimum : int
        Smallest accepted value.
    maximum : int OR None
        Largest accepted value, if any.

    Returns
    -------
    int
        The validated value.
    """
    if isinstance(value, bool) or not isinstance(value, INTEGER_TYPES):
        raise ParameterError(f"{name} must be an integer; got {value!r}.")
    value = int(value)
    if value < minimum:
        raise ParameterError(f"{name} must be at least {minimum}; got {value}.")
    if maximum is not None and value > maximum:
        raise ParameterError(f"{name} must be at most {maximum}; got {value}.")
    return value
