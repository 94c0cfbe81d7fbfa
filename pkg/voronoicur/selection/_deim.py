from voronoicur.selection._header import *


class SelectionResult(object):
    """
    Columns chosen from a matrix.

    Attributes
    ----------
    global_indices : numpy.ndarray
        Distinct column indices of the source matrix, in selection order.
    C : numpy.ndarray
        ``(m, len(global_indices))`` exact copies of the selected columns.
    per_set_blocks : list of numpy.ndarray
        For every Voronoi set (by set index), the global indices it contributed.
    requested : int
        Number of columns asked for.
    set_order : numpy.ndarray
        Order in which the sets were processed.
    seconds : float
        Wall time of partitioning and selection when produced by
        :func:`select_columns`; sketching and the bound report are excluded.
    """

    def __init__(self, global_indices, C, per_set_blocks, requested=None, set_order=None):
        self.global_indices = np.asarray(global_indices, dtype=np.int64)
        self.C = np.asfortranarray(C)
        self.per_set_blocks = [np.asarray(b, dtype=np.int64) for b in per_set_blocks]
        self.requested = self.rank if requested is None else int(requested)
        if set_order is None:
            set_order = np.arange(len(self.per_set_blocks))
        self.set_order = np.asarray(set_order, dtype=np.int64)
        self.seconds = 0.0

    def __repr__(self):
        return f"SelectionResult(rank={self.rank}, requested={self.requested})"

    def __len__(self):
        return self.rank

    @property
    def rank(self):
        """Number of selected columns."""
        return int(self.global_indices.size)

    @property
    def shortfall(self):
        """Requested minus selected columns."""
        return self.requested - self.rank


def deim_select(W):
    r"""
    Discrete empirical interpolation: one interpolation index per basis vector.

    The first index is :math:`\text{argmax}|w_1|`. For :math:`j \geq 2`, the
    previous :math:`j-1` vectors interpolate :math:`w_j` at the chosen indices,
    and the next index is the argmax of the magnitude of the interpolation
    residual. Ties go to the smallest index.

    Parameters
    ----------
    W : array_like
        ``(n, r)`` basis, ``r <= n``, of full column rank.

    Returns
    -------
    numpy.ndarray
        ``r`` distinct indices into the rows of ``W``.

    Raises
    ------
    RankDeficiencyError
        If a residual vanishes to rounding level or repeats an index,
        naming the failing column.
    """
    W = as_matrix(W, "W")
    n, r = W.shape
    if r > n:
        raise ParameterError(f"W has {r} columns but only {n} rows; DEIM needs r <= n.")

    tol = max(W.shape) * EPS
    p = np.empty(r, dtype=np.int64)

    for j in range(r):
        w = W[:, j]
        if j == 0:
            res = w
        else:
            try:
                c = scipy.linalg.solve(W[p[:j], :j], w[p[:j]], check_finite=False)
            except (scipy.linalg.LinAlgError, ValueError):
                raise RankDeficiencyError(
                    f"DEIM interpolation matrix is singular at column {j}.", column=j
                )
            res = w - W[:, :j] @ c

        magnitude = np.abs(res)
        pick = int(np.argmax(magnitude))
        if not magnitude[pick] > tol * np.max(np.abs(w)) or pick in p[:j]:
            raise RankDeficiencyError(
                f"DEIM residual of column {j} vanished; the basis is rank deficient.",
                column=j,
            )
        p[j] = pick

    return p


def partitioned_deim(A, partition, centroids, r=None, source=None):
    r"""
    Combine per-set DEIM selections into one full-rank column selection.

    Sets are processed in ascending order of centroid dimension (set index on
    ties); sets with dimension zero contribute nothing.

    - The first set :math:`V_1` selects :math:`d_1` columns by DEIM on
      :math:`V_1^T U_1`. If that matrix is numerically rank deficient, the
      top :math:`d_1` right singular vectors of :math:`V_1` are used instead
      (with a warning).
    - Every later set :math:`V_i` is deflated against the columns chosen so
      far: with :math:`Q` an orthonormal basis of :math:`C`, the right singular
      vectors :math:`\tilde{W}` of :math:`(I - QQ^T)V_i` drive DEIM on
      :math:`V_i`. If the deflated set has numerical rank below :math:`d_i`,
      only that many columns are taken, with a warning.

    Local indices are mapped to global column indices of ``A``.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix the selection runs on (possibly a sketch).
    partition : VoronoiPartition
        Partition of the columns of ``A``.
    centroids : CentroidSet
        One centroid per set; ``centroids.dims`` are the per-set counts.
    r : int OR None
        If given, must equal the sum of the centroid dimensions.
    source : array_like OR None
        Matrix whose columns fill :attr:`SelectionResult.C`, sharing the
        column count of ``A``. Defaults to ``A``; pass the unsketched matrix
        when ``A`` is a sketch.

    Returns
    -------
    SelectionResult
        The combined selection, with ``requested = sum(d)``.
    """
    A = as_matrix(A)
    source = A if source is None else as_matrix(source, "source")
    if source.shape[1] != A.shape[1]:
        raise ParameterError(
            f"source has {source.shape[1]} columns but A has {A.shape[1]}."
        )
    if partition.n != A.shape[1]:
        raise ParameterError(
            f"The partition covers {partition.n} columns but A has {A.shape[1]}."
        )
    if partition.num_sets != centroids.num_sets:
        raise ParameterError(
            f"The partition has {partition.num_sets} sets but there are "
            f"{centroids.num_sets} centroids."
        )

    dims = centroids.dims
    if r is not None and int(np.sum(dims)) != check_count(r, "r", 1):
        raise ParameterError(
            f"Centroid dimensions {dims.tolist()} sum to {int(np.sum(dims))}, not r = {r}."
        )

    sets = partition.sets()
    for i, idx in enumerate(sets):
        if idx.size < dims[i]:
            raise ParameterError(
                f"Voronoi set {i} has {idx.size} columns but centroid dimension {dims[i]}."
            )

    order = np.argsort(dims, kind="stable")
    order = order[dims[order] > 0]

    blocks = [np.zeros(0, dtype=np.int64) for _ in sets]
    selected = []

    for position, i in enumerate(order):
        d = int(dims[i])
        V = A[:, sets[i]]

        if position == 0:
            W = V.T @ centroids.bases[i].basis
            try:
                local = deim_select(W)
            except RankDeficiencyError as e:
                warnings.warn(
                    f"V_1^T U_1 of set {i} is rank deficient at column {e.column}; "
                    f"using the right singular vectors of the set instead."
                )
                svd = svd_all(V)
                d_eff = min(d, svd.rank)
                if d_eff < d:
                    warnings.warn(f"Set {i} has rank {svd.rank} below its dimension {d}.")
                local = deim_select(svd.right[:, :d_eff]) if d_eff else np.zeros(0, dtype=np.int64)
        else:
            C = A[:, np.concatenate(selected)]
            Q = thin_qr(C) if np.any(C) else OrthonormalBasis.empty(A.shape[0])
            svd = svd_all(orthonormal_residual(V, Q), scale=fro_norm(V))
            d_eff = min(d, svd.rank)
            if d_eff < d:
                warnings.warn(
                    f"Set {i} has projected rank {svd.rank} below its dimension {d}; "
                    f"selecting {d_eff} columns."
                )
            local = deim_select(svd.right[:, :d_eff]) if d_eff else np.zeros(0, dtype=np.int64)

        blocks[i] = sets[i][local]
        selected.append(blocks[i])

    indices = np.concatenate(selected) if selected else np.zeros(0, dtype=np.int64)
    return SelectionResult(
        indices,
        source[:, indices],
        blocks,
        requested=int(np.sum(dims)),
        set_order=order,
    )
