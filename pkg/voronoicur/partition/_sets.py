from voronoicur.partition._header import *

# Columns processed per block in the assignment step; bounds the temporary memory.
ASSIGNMENT_BLOCK = 4096


class VoronoiPartition(object):
    """
    Disjoint assignment of the columns of a matrix to ``k`` sets.

    Attributes
    ----------
    labels : numpy.ndarray
        Integer array of length ``n``; ``labels[j]`` is the set of column ``j``,
        in ``range(num_sets)``.
    num_sets : int
        Number of sets ``k``. Sets may be empty between an assignment step and
        the repair or compaction that follows it.
    """

    def __init__(self, labels, num_sets):
        labels = np.asarray(labels, dtype=np.int64)
        num_sets = check_count(num_sets, "num_sets", 1)
        if labels.ndim != 1:
            raise ParameterError(f"labels must be one-dimensional; got shape {labels.shape}.")
        if labels.size and (labels.min() < 0 or labels.max() >= num_sets):
            raise ParameterError(
                f"labels must lie in [0, {num_sets}); got range "
                f"[{labels.min()}, {labels.max()}]."
            )
        self.labels = labels
        self.num_sets = num_sets

    def __eq__(self, other):
        if not isinstance(other, VoronoiPartition):
            return NotImplemented
        return self.num_sets == other.num_sets and np.array_equal(self.labels, other.labels)

    def __repr__(self):
        return f"VoronoiPartition(num_sets={self.num_sets}, sizes={self.sizes.tolist()})"

    @property
    def n(self):
        """Number of columns partitioned."""
        return self.labels.size

    @property
    def sizes(self):
        """Cardinality of every set."""
        return np.bincount(self.labels, minlength=self.num_sets)

    def members(self, i):
        """Sorted column indices of set ``i``."""
        return np.flatnonzero(self.labels == i)

    def sets(self):
        """List of the column indices of every set."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(self.sizes)[:-1]
        return np.split(order, bounds)

    def parts(self, A):
        """Column blocks ``A[:, members(i)]`` for every set."""
        return [A[:, idx] for idx in self.sets()]

    def means(self, A):
        """
        Column mean of every set, as an ``(m, k)`` matrix.

        Empty sets get the zero vector.
        """
        A = np.asarray(A, dtype=np.float64)
        sums = np.zeros((A.shape[0], self.num_sets))
        for i, idx in enumerate(self.sets()):
            if idx.size:
                sums[:, i] = np.sum(A[:, idx], axis=1) / idx.size
        return sums

    def compact(self, keep=None):
        """
        Drop sets, relabeling the survivors contiguously in their original order.

        Parameters
        ----------
        keep : array_like of bool OR None
            Mask over sets to keep. Defaults to the nonempty sets. Every
            dropped set must be empty.

        Returns
        -------
        (VoronoiPartition, numpy.ndarray)
            The compacted partition and the original indices of the kept sets.
        """
        sizes = self.sizes
        if keep is None:
            keep = sizes > 0
        keep = np.asarray(keep, dtype=bool)
        if np.any(sizes[~keep] > 0):
            raise ParameterError("compact() can only drop empty sets.")
        kept = np.flatnonzero(keep)
        if kept.size == 0:
            raise DegenerateSetError("compact() would leave no sets.", set_index=0)
        relabel = np.full(self.num_sets, -1, dtype=np.int64)
        relabel[kept] = np.arange(kept.size)
        return VoronoiPartition(relabel[self.labels], kept.size), kept


def init_partition(A, k, seed=None):
    """
    Seeded uniform random partition of the columns of ``A`` into ``k`` nonempty sets.

    Labels are drawn uniformly with a :class:`numpy.random.PCG64` generator.
    Every empty set, in increasing order, then receives the highest-indexed
    column of the currently largest set (smallest label on ties).

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix whose columns are partitioned.
    k : int
        Number of sets, ``1 <= k <= n``.
    seed : int OR None
        Seed of the generator. The same seed reproduces the same partition.

    Returns
    -------
    VoronoiPartition
        Partition with every set nonempty.
    """
    A = as_matrix(A)
    n = A.shape[1]
    k = check_count(k, "k", 1, n)

    rng = np.random.Generator(np.random.PCG64(seed))
    labels = rng.integers(0, k, size=n)

    sizes = np.bincount(labels, minlength=k)
    for empty in np.flatnonzero(sizes == 0):
        donor = int(np.argmax(sizes))
        column = np.flatnonzero(labels == donor)[-1]
        labels[column] = empty
        sizes[donor] -= 1
        sizes[empty] += 1

    return VoronoiPartition(labels, k)


def assignment_distances(A, centroids):
    r"""
    Squared residuals :math:`\|(x - z_i) - U_iU_i^T(x - z_i)\|_2^2` of every
    column against every centroid.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    centroids : CentroidSet
        Centroids with ambient dimension ``m``.

    Returns
    -------
    numpy.ndarray
        ``(k, n)`` distances.
    """
    A = np.asarray(A, dtype=np.float64)
    if centroids.ambient_dim != A.shape[0]:
        raise ParameterError(
            f"Centroid ambient dimension {centroids.ambient_dim} does not match "
            f"the {A.shape[0]} rows of A."
        )

    n = A.shape[1]
    distances = np.empty((centroids.num_sets, n))
    for start in range(0, n, ASSIGNMENT_BLOCK):
        block = A[:, start:start + ASSIGNMENT_BLOCK]
        for i in range(centroids.num_sets):
            X = block - centroids.shifts[:, [i]]
            R = orthonormal_residual(X, centroids.bases[i])
            distances[i, start:start + block.shape[1]] = np.sum(np.square(R), axis=0)

    return distances


def find_voronoi_sets(A, centroids, return_distances=False):
    """
    Assign every column to the centroid with the smallest squared residual.

    Ties go to the smallest set index. Centroids with an empty basis still
    compete through the plain distance to their shift.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    centroids : CentroidSet
        At least one centroid, ambient dimension ``m``.
    return_distances : bool
        Whether to also return the distance of every column to its own set.

    Returns
    -------
    VoronoiPartition OR (VoronoiPartition, numpy.ndarray)
        The partition has ``centroids.num_sets`` sets, some possibly empty.
    """
    distances = assignment_distances(A, centroids)
    labels = np.argmin(distances, axis=0)
    partition = VoronoiPartition(labels, centroids.num_sets)

    if return_distances:
        return partition, distances[labels, np.arange(labels.size)]
    return partition


def repair_empty_sets(partition, residuals):
    """
    Refill empty sets for the fixed-dimension algorithms.

    Each empty set, in increasing order, receives the column with the largest
    current residual among sets that keep at least one other member (smallest
    column index on ties).

    Parameters
    ----------
    partition : VoronoiPartition
        Partition possibly holding empty sets.
    residuals : numpy.ndarray
        Length ``n`` residual of every column against its own set.

    Returns
    -------
    (VoronoiPartition, list of int)
        The repaired partition and the columns that were moved.
    """
    labels = partition.labels.copy()
    sizes = partition.sizes
    residuals = np.array(residuals, dtype=np.float64)
    moved = []

    for empty in np.flatnonzero(sizes == 0):
        movable = sizes[labels] >= 2
        if not np.any(movable):
            raise DegenerateSetError(
                f"Voronoi set {empty} is empty and no other set can spare a column.",
                set_index=int(empty),
            )
        candidates = np.where(movable, residuals, -np.inf)
        column = int(np.argmax(candidates))

        sizes[labels[column]] -= 1
        sizes[empty] += 1
        labels[column] = empty
        residuals[column] = -np.inf
        moved.append(column)

    return VoronoiPartition(labels, partition.num_sets), moved
