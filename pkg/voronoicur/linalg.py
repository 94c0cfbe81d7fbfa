r"""
Dense linear-algebra kernels shared by the partitioning and selection code.

All routines accept anything :func:`numpy.asarray` understands, operate on
``float64`` column-major copies, and are pure: inputs are never modified.

Numerical rank is decided by the cutoff

.. math:: \sigma_j > \max(m, n) \cdot \sigma_1 \cdot 2^{-52},

and singular vectors follow a fixed sign convention (the largest-magnitude
entry of every left singular vector is positive, first such entry on ties) so
that centroids and DEIM pivots are reproducible.

Note
~~~~
Reductions (norms, sums of squares) go through :func:`numpy.sum`, whose
pairwise summation tree depends only on the array shape. Results are therefore
identical from run to run.
"""

import numpy as np
import scipy.linalg

from voronoicur.misc.errors import DegenerateInputError, ParameterError
from voronoicur.misc.math import EPS, as_matrix, check_count


class TruncatedSvd(object):
    r"""
    Leading singular triplets :math:`A \approx L \, \text{diag}(\sigma) \, R^T`.

    Attributes
    ----------
    left : numpy.ndarray
        ``(m, d)`` matrix with orthonormal columns.
    singular_values : numpy.ndarray
        Length ``d``, nonincreasing and nonnegative.
    right : numpy.ndarray
        ``(n, d)`` matrix with orthonormal columns.
    """

    def __init__(self, left, singular_values, right):
        self.left = left
        self.singular_values = singular_values
        self.right = right

    @property
    def rank(self):
        """Number of stored triplets."""
        return len(self.singular_values)

    def truncate(self, d):
        """
        Keep the leading ``d`` triplets (or all of them if fewer are stored).

        Parameters
        ----------
        d : int
            Number of triplets requested.

        Returns
        -------
        TruncatedSvd
            New object sharing no memory with ``self``.
        """
        d = min(int(d), self.rank)
        return TruncatedSvd(
            self.left[:, :d].copy(order="F"),
            self.singular_values[:d].copy(),
            self.right[:, :d].copy(order="F"),
        )

    def reconstruct(self):
        """Dense product :math:`L \\, \\text{diag}(\\sigma) \\, R^T`."""
        return (self.left * self.singular_values) @ self.right.T


class OrthonormalBasis(object):
    """
    Orthonormal basis of a subspace of :math:`\\mathbb{R}^m`.

    Attributes
    ----------
    basis : numpy.ndarray
        ``(m, d)`` matrix with orthonormal columns. ``d = 0`` is the empty basis.
    """

    def __init__(self, basis):
        self.basis = np.asfortranarray(basis, dtype=np.float64)

    @classmethod
    def empty(cls, ambient_dim):
        """The zero-dimensional subspace of :math:`\\mathbb{R}^m`."""
        return cls(np.zeros((int(ambient_dim), 0)))

    @property
    def ambient_dim(self):
        """Dimension ``m`` of the ambient space."""
        return self.basis.shape[0]

    @property
    def dim(self):
        """Dimension ``d`` of the subspace."""
        return self.basis.shape[1]


def numerical_rank(singular_values, shape, scale=None):
    """
    Count singular values above the rank cutoff.

    Parameters
    ----------
    singular_values : array_like
        Nonincreasing singular values.
    shape : (int, int)
        Shape of the matrix the values belong to.
    scale : float OR None
        Reference magnitude for the cutoff. Defaults to the largest singular
        value. Passing a larger scale (e.g. the norm of a matrix before
        projection) keeps rounding noise from being counted as rank.

    Returns
    -------
    int
        The numerical rank.
    """
    s = np.asarray(singular_values, dtype=np.float64)
    if s.size == 0:
        return 0
    if scale is None:
        scale = s[0]
    if scale <= 0:
        return 0
    tol = max(shape) * scale * EPS
    return int(np.count_nonzero(s > tol))


def _fix_signs(left, right):
    # Largest-magnitude entry of each left vector made positive; argmax takes the first on ties.
    if left.shape[1] == 0:
        return left, right
    pivots = np.argmax(np.abs(left), axis=0)
    signs = np.sign(left[pivots, np.arange(left.shape[1])])
    signs[signs == 0] = 1
    return left * signs, right * signs


def svd_all(A, scale=None):
    """
    Thin SVD of ``A`` keeping every numerically nonzero triplet.

    Parameters
    ----------
    A : array_like
        Matrix to factor. Zero-column or zero-row input returns an empty result.
    scale : float OR None
        See :func:`numerical_rank`.

    Returns
    -------
    TruncatedSvd
        All triplets above the rank cutoff, under the sign convention.
    """
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    if m == 0 or n == 0:
        return TruncatedSvd(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)))

    U, s, Vt = scipy.linalg.svd(
        A, full_matrices=False, lapack_driver="gesvd", check_finite=False
    )
    rank = numerical_rank(s, A.shape, scale=scale)
    left, right = _fix_signs(U[:, :rank], Vt[:rank].T)
    return TruncatedSvd(
        np.asfortranarray(left), s[:rank].copy(), np.asfortranarray(right)
    )


def truncated_svd(A, d):
    """
    Leading ``d`` singular triplets of ``A``.

    If the numerical rank of ``A`` is smaller than ``d``, only that many
    triplets are returned; callers should read :attr:`TruncatedSvd.rank`.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    d : int
        Requested number of triplets, ``1 <= d <= min(m, n)``.

    Returns
    -------
    TruncatedSvd
        The leading triplets under the sign convention.
    """
    A = as_matrix(A)
    d = check_count(d, "d", 1, min(A.shape))
    return svd_all(A).truncate(d)


def thin_qr(A):
    """
    Orthonormal basis for the range of ``A`` via column-pivoted QR.

    The basis dimension is the numerical rank of ``A``, measured on the
    singular values of the triangular factor (which equal those of ``A``).

    Parameters
    ----------
    A : array_like
        Nonzero ``(m, n)`` matrix.

    Returns
    -------
    OrthonormalBasis
        Basis of dimension ``rank(A)``, under the same sign convention as the SVD.
    """
    A = as_matrix(A)
    if not np.any(A):
        raise DegenerateInputError("thin_qr() requires a nonzero matrix.")

    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True, check_finite=False)
    rank = numerical_rank(scipy.linalg.svdvals(R, check_finite=False), A.shape)
    basis, _ = _fix_signs(Q[:, :rank], np.zeros((0, rank)))
    return OrthonormalBasis(basis)


def orthonormal_residual(A, Q):
    """
    Residual :math:`(I - QQ^T)A` of projecting the columns of ``A`` onto ``Q``.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    Q : OrthonormalBasis
        Basis with ``ambient_dim == m``. The empty basis returns ``A`` unchanged.

    Returns
    -------
    numpy.ndarray
        ``(m, n)`` residual.
    """
    A = np.asfortranarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ParameterError(f"A must be a matrix; got shape {A.shape}.")
    if Q.ambient_dim != A.shape[0]:
        raise ParameterError(
            f"Basis ambient dimension {Q.ambient_dim} does not match "
            f"the {A.shape[0]} rows of A."
        )
    if Q.dim == 0:
        return A.copy(order="F")
    return A - Q.basis @ (Q.basis.T @ A)


def pinv_apply(C, B):
    r"""
    Compute :math:`C^\dagger B` by QR-based least squares.

    The pseudoinverse is never formed. LAPACK's complete orthogonal
    factorization (``gelsy``) returns the minimum-norm solution, so
    :math:`CC^\dagger B` is the orthogonal projection of ``B`` onto
    :math:`\text{range}(C)` even when ``C`` is rank deficient.

    Parameters
    ----------
    C : array_like
        ``(m, p)`` matrix.
    B : array_like
        ``(m, q)`` matrix.

    Returns
    -------
    numpy.ndarray
        ``(p, q)`` matrix.
    """
    C = as_matrix(C, "C")
    B = as_matrix(B, "B")
    if C.shape[0] != B.shape[0]:
        raise ParameterError(
            f"C has {C.shape[0]} rows but B has {B.shape[0]}; they must agree."
        )
    X, _, _, _ = scipy.linalg.lstsq(
        C, B, cond=max(C.shape) * EPS, lapack_driver="gelsy", check_finite=False
    )
    return np.asfortranarray(X)


def fro_norm(A):
    """
    Frobenius norm, the root of the sum of squared entries.

    Parameters
    ----------
    A : array_like
        Any real array, possibly empty.

    Returns
    -------
    float
        The norm.
    """
    A = np.asarray(A, dtype=np.float64)
    return float(np.sqrt(np.sum(np.square(A))))


def tail_norm(A, r):
    r"""
    Best rank-``r`` approximation error :math:`\|A - A_r\|_F`.

    Computed from the trailing singular values rather than by subtraction.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    r : int
        Rank of the approximation, ``r >= 0``.

    Returns
    -------
    float
        :math:`\left(\sum_{j > r} \sigma_j^2\right)^{1/2}`.
    """
    A = as_matrix(A)
    r = check_count(r, "r", 0)
    s = scipy.linalg.svdvals(A, check_finite=False)
    return float(np.sqrt(np.sum(np.square(s[r:]))))
