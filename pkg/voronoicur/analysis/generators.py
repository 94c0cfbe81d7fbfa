r"""
Seeded test matrices and random sketches.

Every random draw goes through :class:`numpy.random.Generator` with the
:class:`numpy.random.PCG64` bit generator, and independent vectors use
independent substreams from :meth:`numpy.random.SeedSequence.spawn`, so a seed
reproduces the same matrix on every platform.

- :meth:`gen_snn` builds sparse nonnegative (SNN) matrices

  .. math:: A = \sum_{i=1}^{l} \frac{2}{i} x_i y_i^T + \sum_{i=l+1}^{n} \frac{1}{i} x_i y_i^T,

  with sparse factors :math:`x_i \in \mathbb{R}^m`, :math:`y_i \in \mathbb{R}^n`.
- :class:`SketchOperator` is the Gaussian sketch :math:`\Gamma \in \mathbb{R}^{r \times m}`
  with entries of mean zero and standard deviation :math:`r^{-1/2}`, applied
  from the left to shrink the row dimension before selection.
"""

import numpy as np

from voronoicur.misc.errors import ParameterError
from voronoicur.misc.math import REAL_TYPES, as_matrix, check_count


def _generator(seed):
    return np.random.Generator(np.random.PCG64(seed))


class SnnConfig(object):
    """
    Parameters of a sparse nonnegative test matrix.

    Attributes
    ----------
    m, n : int
        Matrix dimensions.
    l : int
        Number of leading terms with the doubled coefficient ``2/i``; ``1 <= l < n``.
    density : float
        Fraction of nonzero entries in every factor, in ``(0, 1]``.
    seed : int OR None
        Root seed of the factor substreams.
    """

    def __init__(self, m, n, l, density, seed=None):
        self.m = check_count(m, "m", 1)
        self.n = check_count(n, "n", 2)
        self.l = check_count(l, "l", 1, self.n - 1)
        if isinstance(density, bool) or not isinstance(density, REAL_TYPES) or not 0 < density <= 1:
            raise ParameterError(f"density must lie in (0, 1]; got {density!r}.")
        self.density = float(density)
        self.seed = seed

    def __repr__(self):
        return (
            f"SnnConfig(m={self.m}, n={self.n}, l={self.l}, "
            f"density={self.density}, seed={self.seed})"
        )

    @property
    def coefficients(self):
        """Term weights ``2/i`` for ``i <= l`` and ``1/i`` beyond."""
        i = np.arange(1, self.n + 1, dtype=np.float64)
        return np.where(i <= self.l, 2 / i, 1 / i)


def sparse_count(density, dim):
    """
    Number of nonzeros in a sparse factor: ``density * dim`` rounded half up, at least one.
    """
    return max(1, int(np.floor(density * dim + 0.5)))


def sparse_vector(rng, dim, density):
    """
    Draw one sparse factor.

    Exactly :meth:`sparse_count` positions are chosen without replacement;
    their values are uniform on ``(0, 1]``.

    Parameters
    ----------
    rng : numpy.random.Generator
        Source of randomness.
    dim : int
        Length of the vector.
    density : float
        Fraction of nonzeros.

    Returns
    -------
    numpy.ndarray
        The vector.
    """
    x = np.zeros(dim)
    count = sparse_count(density, dim)
    positions = rng.choice(dim, size=count, replace=False)
    x[positions] = 1.0 - rng.random(count)
    return x


def gen_snn(cfg, return_factors=False):
    """
    Materialize a sparse nonnegative test matrix.

    Term ``i`` draws ``x_i`` from substream ``2i`` and ``y_i`` from substream
    ``2i + 1`` (0-based ``i``) of ``SeedSequence(cfg.seed)``.

    Parameters
    ----------
    cfg : SnnConfig
        Dimensions, split index, density and seed.
    return_factors : bool
        Whether to also return the factors and coefficients.

    Returns
    -------
    numpy.ndarray OR (numpy.ndarray, numpy.ndarray, numpy.ndarray, numpy.ndarray)
        The dense ``(m, n)`` matrix; with ``return_factors``, also ``X`` of
        shape ``(m, n)``, ``Y`` of shape ``(n, n)`` (columns are the factors),
        and the coefficients, so that ``A = (X * c) @ Y.T``.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(2 * cfg.n)

    X = np.empty((cfg.m, cfg.n), order="F")
    Y = np.empty((cfg.n, cfg.n), order="F")
    for i in range(cfg.n):
        X[:, i] = sparse_vector(_generator(streams[2 * i]), cfg.m, cfg.density)
        Y[:, i] = sparse_vector(_generator(streams[2 * i + 1]), cfg.n, cfg.density)

    c = cfg.coefficients
    A = np.asfortranarray((X * c) @ Y.T)

    if return_factors:
        return A, X, Y, c
    return A


def sketch_seed(seed, r, shared=False):
    """
    Seed of the sketch used at rank ``r``.

    Parameters
    ----------
    seed : int OR None
        Root seed of a sweep.
    r : int
        Target rank.
    shared : bool
        If ``True``, every rank uses ``seed`` itself, so sketches of
        different sizes share their leading rows' stream. Otherwise each rank
        gets the independent stream ``SeedSequence([seed, r])``.

    Returns
    -------
    numpy.random.SeedSequence
    """
    if shared or seed is None:
        return np.random.SeedSequence(seed)
    return np.random.SeedSequence([int(seed), int(r)])


class SketchOperator(object):
    r"""
    Gaussian sketch :math:`\Gamma` with i.i.d. :math:`\mathcal{N}(0, 1/r)` entries.

    Attributes
    ----------
    r : int
        Target rank, the number of rows.
    m : int
        Source dimension, the number of columns.
    seed : int OR numpy.random.SeedSequence OR None
        Seed; the same seed regenerates bit-identical entries.
    entries : numpy.ndarray
        The ``(r, m)`` matrix.
    """

    def __init__(self, r, m, seed=None, gamma=None):
        """
        Parameters
        ----------
        r, m : int
            Shape of the sketch.
        seed : int OR numpy.random.SeedSequence OR None
            Seed of the Gaussian draw.
        gamma : array_like OR None
            Explicit ``(r, m)`` matrix used instead of a random draw, e.g. the
            identity to disable sketching in tests.
        """
        self.r = check_count(r, "r", 1)
        self.m = check_count(m, "m", 1)
        self.seed = seed

        if gamma is None:
            rng = _generator(seed)
            gamma = rng.normal(0.0, self.r ** -0.5, size=(self.r, self.m))
        else:
            gamma = as_matrix(gamma, "gamma")
            if gamma.shape != (self.r, self.m):
                raise ParameterError(
                    f"gamma must have shape {(self.r, self.m)}; got {gamma.shape}."
                )
        self.entries = np.asfortranarray(gamma)

    def __repr__(self):
        return f"SketchOperator(r={self.r}, m={self.m}, seed={self.seed})"

    def apply(self, A):
        """The product ``entries @ A`` for an ``(m, n)`` matrix ``A``."""
        A = as_matrix(A)
        if A.shape[0] != self.m:
            raise ParameterError(
                f"The sketch expects {self.m} rows; A has {A.shape[0]}."
            )
        return np.asfortranarray(self.entries @ A)


def sketch(A, r, seed=None, gamma=None):
    """
    Left-multiply ``A`` by a Gaussian sketch with ``r`` rows.

    Column indices of the result refer to the columns of ``A``.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    r : int
        Number of sketch rows.
    seed : int OR numpy.random.SeedSequence OR None
        Seed of the sketch.
    gamma : array_like OR None
        See :class:`SketchOperator`.

    Returns
    -------
    numpy.ndarray
        The ``(r, n)`` product.
    """
    A = as_matrix(A)
    return SketchOperator(r, A.shape[0], seed=seed, gamma=gamma).apply(A)
