from voronoicur.partition._header import *


class CentroidSet(object):
    r"""
    Generalized centroids of a column partition: one subspace and one shift per set.

    The projector of set ``i`` is :math:`\Theta_i = U_iU_i^T`. For the VQPCA
    family the shift is the set mean :math:`\bar{x}_i`, which makes the optimal
    offset :math:`\beta_i = \bar{x}_i - \Theta_i\bar{x}_i` implicit in every
    residual :math:`(I - \Theta_i)(x - \bar{x}_i)`.

    Attributes
    ----------
    bases : list of OrthonormalBasis
        :math:`U_i` for every set, of dimension ``d_i >= 0``.
    shifts : numpy.ndarray
        ``(m, k)`` matrix whose columns are the shifts :math:`z_i`.
    singular_values : list of numpy.ndarray
        Singular values paired with the columns of each basis.
    requested : numpy.ndarray OR None
        Dimensions requested by a fixed multi-index, or ``None`` for adaptive updates.
    """

    def __init__(self, bases, shifts=None, singular_values=None, requested=None):
        bases = [b if isinstance(b, OrthonormalBasis) else OrthonormalBasis(b) for b in bases]
        if len(bases) == 0:
            raise ParameterError("A CentroidSet needs at least one centroid.")
        m = bases[0].ambient_dim
        if any(b.ambient_dim != m for b in bases):
            raise ParameterError("All centroid bases must share one ambient dimension.")

        if shifts is None:
            shifts = np.zeros((m, len(bases)))
        shifts = np.asfortranarray(shifts, dtype=np.float64)
        if shifts.shape != (m, len(bases)):
            raise ParameterError(
                f"shifts must have shape {(m, len(bases))}; got {shifts.shape}."
            )
        if singular_values is None:
            singular_values = [np.full(b.dim, np.nan) for b in bases]

        self.bases = bases
        self.shifts = shifts
        self.singular_values = [np.asarray(s, dtype=np.float64) for s in singular_values]
        self.requested = None if requested is None else np.asarray(requested, dtype=np.int64)

    def __repr__(self):
        return f"CentroidSet(dims={self.dims.tolist()})"

    @property
    def num_sets(self):
        """Number of centroids ``k``."""
        return len(self.bases)

    @property
    def ambient_dim(self):
        """Ambient dimension ``m``."""
        return self.shifts.shape[0]

    @property
    def dims(self):
        """Dimension ``d_i`` of every basis."""
        return np.array([b.dim for b in self.bases], dtype=np.int64)

    @property
    def k_active(self):
        """Number of centroids with ``d_i >= 1``."""
        return int(np.count_nonzero(self.dims))

    @property
    def shortfall(self):
        """Requested minus delivered dimensions (zeros for adaptive updates)."""
        if self.requested is None:
            return np.zeros(self.num_sets, dtype=np.int64)
        return self.requested - self.dims

    def with_shifts(self, shifts):
        """Copy with replaced shifts."""
        return CentroidSet(self.bases, shifts, self.singular_values, self.requested)

    def take(self, kept):
        """Copy keeping only the centroids at indices ``kept``."""
        kept = np.asarray(kept, dtype=np.int64)
        return CentroidSet(
            [self.bases[i] for i in kept],
            self.shifts[:, kept],
            [self.singular_values[i] for i in kept],
            None if self.requested is None else self.requested[kept],
        )


def default_multi_index(r, k):
    """
    Split rank ``r`` over ``k`` sets as evenly as possible.

    The first ``r mod k`` sets receive one extra dimension, so the entries sum
    to ``r`` exactly.

    Parameters
    ----------
    r : int
        Target rank.
    k : int
        Number of sets.

    Returns
    -------
    numpy.ndarray
        The multi-index ``(d_1, ..., d_k)``.
    """
    r = check_count(r, "r", 1)
    k = check_count(k, "k", 1)
    d = np.full(k, r // k, dtype=np.int64)
    d[: r % k] += 1
    return d


def _pooled_top(svds, start, count):
    # Select `count` triplets beyond position start[i] of every set, ordered by
    # descending singular value, then set index, then column index.
    sigma, owner, column = [], [], []
    for i, svd in enumerate(svds):
        cols = np.arange(int(start[i]), svd.rank)
        sigma.append(svd.singular_values[cols])
        owner.append(np.full(cols.size, i, dtype=np.int64))
        column.append(cols)
    sigma = np.concatenate(sigma)
    owner = np.concatenate(owner)
    column = np.concatenate(column)

    order = np.lexsort((column, owner, -sigma))[:count]
    return np.bincount(owner[order], minlength=len(svds))


def _centroids_from_svds(svds, dims, requested=None):
    return CentroidSet(
        [OrthonormalBasis(svd.left[:, :d]) for svd, d in zip(svds, dims)],
        singular_values=[svd.singular_values[:d] for svd, d in zip(svds, dims)],
        requested=requested,
    )


def update_centroids_fixed(parts, d, redistribute=False):
    """
    Centroid update for a fixed multi-index.

    Each :math:`U_i` holds the top ``d_i`` left singular vectors of the part
    :math:`Y_i` (the set itself, or the set minus its mean for the VQPCA
    family). A part of numerical rank below ``d_i`` yields only that many
    vectors; the deficit is visible through :attr:`CentroidSet.shortfall`.

    Parameters
    ----------
    parts : list of numpy.ndarray
        ``(m, n_i)`` column blocks, one per set.
    d : array_like of int
        Multi-index with every ``d_i >= 1``.
    redistribute : bool
        If ``True``, the total deficit is handed out greedily to the sets
        whose next unused singular values are largest, so that the
        dimensions still sum to ``sum(d)`` whenever the pooled rank allows.

    Returns
    -------
    CentroidSet
        Centroids with zero shifts and ``requested = d``.
    """
    d = np.asarray(d, dtype=np.int64)
    if np.any(d < 1):
        raise ParameterError(f"Every entry of the multi-index must be at least 1; got {d.tolist()}.")
    return _update_fixed(parts, d, redistribute)


def _update_fixed(parts, d, redistribute):
    # As update_centroids_fixed, but a carried index may hold zeros for sets
    # of rank zero.
    d = np.asarray(d, dtype=np.int64)
    if d.shape != (len(parts),):
        raise ParameterError(
            f"The multi-index has {d.size} entries but there are {len(parts)} parts."
        )

    for i, Y in enumerate(parts):
        if Y.shape[1] == 0:
            raise DegenerateSetError(
                f"Voronoi set {i} is empty but requests dimension {d[i]}.", set_index=i
            )

    svds = [svd_all(Y) for Y in parts]
    ranks = np.array([svd.rank for svd in svds], dtype=np.int64)
    dims = np.minimum(d, ranks)

    deficit = int(np.sum(d - dims))
    if deficit > 0:
        short = np.flatnonzero(dims < d).tolist()
        if redistribute:
            spare = int(np.sum(ranks - dims))
            dims = dims + _pooled_top(svds, dims, min(deficit, spare))
            warnings.warn(
                f"Sets {short} have rank below the requested dimension; "
                f"{min(deficit, spare)} of {deficit} missing dimensions were redistributed."
            )
        else:
            warnings.warn(
                f"Sets {short} have rank below the requested dimension; "
                f"{deficit} dimensions are missing."
            )

    return _centroids_from_svds(svds, dims, requested=d)


def carry_multi_index(requested, dims):
    """
    Multi-index for the next fixed-dimension update.

    Dimensions a set received through redistribution stay with it, and the
    part of the total that could not be placed goes back to the short sets
    (in index order, up to their own request). The result sums to
    ``sum(requested)``, so the next update can only keep or grow every
    subspace that still has the rank, and the energy cannot rise.

    Parameters
    ----------
    requested : array_like of int
        Multi-index of the update that produced ``dims``.
    dims : array_like of int
        Dimensions actually fitted.

    Returns
    -------
    numpy.ndarray
    """
    requested = np.asarray(requested, dtype=np.int64)
    carried = np.asarray(dims, dtype=np.int64).copy()
    left = int(np.sum(requested) - np.sum(carried))
    for i in np.flatnonzero(carried < requested):
        if left <= 0:
            break
        give = min(left, int(requested[i] - carried[i]))
        carried[i] += give
        left -= give
    return carried


def update_centroids_adapt(parts, r):
    """
    Centroid update that distributes a total rank ``r`` across all sets.

    The singular values of every part are pooled and the ``r`` largest are
    kept (ties broken by set index, then position). Each set keeps the left
    singular vectors paired with its selected values; a set with none gets
    the empty basis.

    Parameters
    ----------
    parts : list of numpy.ndarray
        ``(m, n_i)`` column blocks, one per set.
    r : int
        Total dimension, at most the sum of the numerical ranks of the parts.

    Returns
    -------
    (CentroidSet, int)
        Centroids with zero shifts whose dimensions sum to ``r``, and the
        number of centroids with at least one vector.
    """
    svds = [svd_all(Y) for Y in parts]
    pooled = int(sum(svd.rank for svd in svds))
    r = check_count(r, "r", 1)
    if r > pooled:
        raise ParameterError(
            f"r = {r} exceeds the pooled numerical rank of the parts; "
            f"the achievable maximum is {pooled}."
        )

    dims = _pooled_top(svds, np.zeros(len(svds), dtype=np.int64), r)
    centroids = _centroids_from_svds(svds, dims)
    return centroids, centroids.k_active


def _residual_energy(A, partition, centroids, shifted):
    if partition.num_sets != centroids.num_sets:
        raise ParameterError(
            f"The partition has {partition.num_sets} sets but there are "
            f"{centroids.num_sets} centroids."
        )
    A = np.asarray(A, dtype=np.float64)
    energies = np.zeros(partition.num_sets)
    for i, idx in enumerate(partition.sets()):
        if idx.size == 0:
            continue
        V = A[:, idx]
        if shifted:
            V = V - centroids.shifts[:, [i]]
        energies[i] = np.sum(np.square(orthonormal_residual(V, centroids.bases[i])))
    return float(np.sum(energies))


def energy_g1(A, partition, centroids):
    r"""
    Unshifted energy :math:`\sum_i \sum_{x \in V_i} \|(I - U_iU_i^T)x\|_2^2`.

    Centroid shifts are ignored.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    partition : VoronoiPartition
        Partition of the columns of ``A``.
    centroids : CentroidSet
        One centroid per set.

    Returns
    -------
    float
        The energy.
    """
    return _residual_energy(A, partition, centroids, shifted=False)


def energy_g2(A, partition, centroids):
    r"""
    Mean-shifted energy :math:`\sum_i \sum_{x \in V_i} \|(I - U_iU_i^T)(x - \bar{x}_i)\|_2^2`.

    This is the VQPCA objective after substituting the optimal offsets
    :math:`\beta_i`. The shifts of ``centroids`` must hold the means of the
    current sets (see :meth:`VoronoiPartition.means`).

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    partition : VoronoiPartition
        Partition of the columns of ``A``.
    centroids : CentroidSet
        One centroid per set, shifted by the set means.

    Returns
    -------
    float
        The energy.
    """
    return _residual_energy(A, partition, centroids, shifted=True)
