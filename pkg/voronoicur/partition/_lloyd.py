from voronoicur.partition._header import *
from voronoicur.partition._stats import _PartitionerStats
from voronoicur.partition._sets import (
    VoronoiPartition,
    init_partition,
    find_voronoi_sets,
    repair_empty_sets,
)
from voronoicur.partition._centroids import (
    _update_fixed,
    carry_multi_index,
    default_multi_index,
    update_centroids_adapt,
    energy_g1,
    energy_g2,
)

# Names that select plain DEIM (no partitioning) in column selection.
BASELINE_NAMES = ("deim", "none")


class PartitionConfig(object):
    """
    Parameters of one partitioning (and column selection) run.

    Attributes
    ----------
    algorithm : str
        One of :data:`ALGORITHM_DEFAULTS` (``"cvod"``, ``"vqpca"``,
        ``"adapt_cvod"``, ``"adapt_vqpca"``), or ``"deim"`` / ``"none"`` for the
        unpartitioned baseline accepted by column selection.
    k : int
        Initial number of Voronoi sets.
    r : int
        Target rank, the total centroid dimension and the number of selected columns.
    multi_index : numpy.ndarray OR None
        Per-set dimensions summing to ``r`` for the fixed variants. Defaults to
        :func:`default_multi_index`. ``None`` for the adaptive variants and the baseline.
    epsilon : float
        Stopping tolerance on the energy decrement.
    max_iters : int
        Cap on Lloyd iterations.
    seed : int OR None
        Seed of the initial random partition.
    stopping : str OR None
        ``"absolute"`` or ``"relative"`` decrement test. ``None`` uses the
        family default (absolute for CVOD, relative for VQPCA).
    redistribute : bool
        Whether fixed variants hand rank shortfalls to other sets.
    """

    def __init__(
        self,
        algorithm,
        k,
        r,
        multi_index=None,
        epsilon=0.1,
        max_iters=DEFAULT_MAX_ITERS,
        seed=None,
        stopping=None,
        redistribute=True,
    ):
        valid = list(ALGORITHM_DEFAULTS.keys()) + list(BASELINE_NAMES)
        if algorithm not in valid:
            raise ParameterError(
                "Unrecognized algorithm '{}'.\n"
                "Valid algorithms include {}".format(algorithm, valid)
            )
        self.algorithm = algorithm
        self.k = check_count(k, "k", 1)
        self.r = check_count(r, "r", 1)

        if not isinstance(epsilon, REAL_TYPES) or not epsilon > 0:
            raise ParameterError(f"epsilon must be positive; got {epsilon!r}.")
        self.epsilon = float(epsilon)
        self.max_iters = check_count(max_iters, "max_iters", 1)
        self.seed = seed

        if stopping is not None and stopping not in STOPPING_OPTIONS:
            raise ParameterError(
                f"Unrecognized stopping rule '{stopping}'. Valid options: {STOPPING_OPTIONS}"
            )
        self.stopping = stopping
        self.redistribute = bool(redistribute)

        if self.is_fixed:
            if multi_index is None:
                if self.r < self.k:
                    raise ParameterError(
                        f"Fixed-dimension algorithms need r >= k so every set gets "
                        f"a dimension; got r = {self.r}, k = {self.k}."
                    )
                multi_index = default_multi_index(self.r, self.k)
            multi_index = np.asarray(multi_index, dtype=np.int64)
            if multi_index.shape != (self.k,):
                raise ParameterError(
                    f"multi_index must have k = {self.k} entries; got {multi_index.tolist()}."
                )
            if np.any(multi_index < 1) or int(np.sum(multi_index)) != self.r:
                raise ParameterError(
                    f"multi_index entries must be positive and sum to r = {self.r}; "
                    f"got {multi_index.tolist()}."
                )
            self.multi_index = multi_index
        else:
            self.multi_index = None

    def __repr__(self):
        return (
            f"PartitionConfig(algorithm={self.algorithm!r}, k={self.k}, r={self.r}, "
            f"epsilon={self.epsilon}, max_iters={self.max_iters}, seed={self.seed})"
        )

    @property
    def is_baseline(self):
        """Whether this configuration selects plain DEIM."""
        return self.algorithm in BASELINE_NAMES

    @property
    def is_fixed(self):
        """Whether this configuration uses a fixed multi-index."""
        return (not self.is_baseline) and ALGORITHM_DEFAULTS[self.algorithm]["centroids"] == "fixed"

    def validate(self, A):
        """
        Check the configuration against the shape of the data.

        Parameters
        ----------
        A : numpy.ndarray
            ``(m, n)`` data matrix.
        """
        m, n = A.shape
        if self.k > n:
            raise ParameterError(f"k = {self.k} exceeds the {n} columns of A.")
        if self.r > min(m, n):
            raise ParameterError(f"r = {self.r} exceeds min(m, n) = {min(m, n)}.")


class Partitioner(_PartitionerStats):
    r"""
    Lloyd-type alternating minimization that partitions the columns of a matrix
    around low-dimensional subspace centroids.

    Four algorithms are supported (see :meth:`optimize`). All alternate a
    centroid update (subspaces fitted to the current sets) with a Voronoi
    assignment (every column moves to the subspace that represents it best),
    until the energy decrement falls below a tolerance.

    Attributes
    ----------
    A : numpy.ndarray
        ``(m, n)`` data; its columns are the points being partitioned.
    k_initial : int
        Number of sets of the initial partition.
    r : int
        Target total centroid dimension.
    multi_index : numpy.ndarray OR None
        Per-set dimensions requested for the fixed variants.
    working_index : numpy.ndarray OR None
        Multi-index of the next fixed-dimension update: :attr:`multi_index`
        with redistributed dimensions carried over (see
        :func:`carry_multi_index`). ``None`` until the first update.
    partition : VoronoiPartition
        Current partition.
    centroids : CentroidSet OR None
        Centroids fitted in the latest iteration, compacted like
        :attr:`partition`. Shifts are the means of the current sets for the
        VQPCA family and zero otherwise.
    set_ids : numpy.ndarray
        Initial set number of every current set; adaptive runs drop empty sets.
    iter : int
        Number of completed iterations.
    converged : bool
        Whether the last :meth:`optimize` call met the tolerance.
    truncated : bool
        Whether the last :meth:`optimize` call hit its iteration cap first.
    flags : dict
        Options of the current run. Contains:

         - ``"method"`` : ``str``, the algorithm.
         - ``"centroids"``, ``"shifted"``, ``"stopping"`` : see :data:`ALGORITHM_DEFAULTS`.
         - ``"epsilon"`` : ``float``, the tolerance.
         - ``"redistribute"`` : ``bool``, see :class:`PartitionConfig`.

    stats : dict of lists
        Per-iteration ``"energy"``, ``"delta"``, ``"dims"``, ``"k_active"``,
        ``"num_sets"`` and ``"sizes"``. See :attr:`trace`.
    """

    def __init__(self, A, k=None, r=None, multi_index=None, seed=None, partition=None):
        """
        Initialize datastructures for partitioning.

        Parameters
        ----------
        A : array_like
            Data matrix; coerced to ``float64``.
        k : int OR None
            Number of sets of a seeded random initial partition.
            Ignored if ``partition`` is given.
        r : int
            Target total dimension.
        multi_index : array_like OR None
            Dimensions for the fixed variants. Defaults to
            :func:`default_multi_index`.
        seed : int OR None
            Seed of the initial partition.
        partition : VoronoiPartition OR None
            Explicit initial partition, e.g. shared between algorithms.
        """
        self.A = as_matrix(A)
        if r is None:
            raise ParameterError("The target rank r is required.")
        self.r = check_count(r, "r", 1, min(self.A.shape))
        self.seed = seed

        if partition is None:
            if k is None:
                raise ParameterError("Either k or an initial partition is required.")
            partition = init_partition(self.A, k, seed)
        elif partition.n != self.A.shape[1]:
            raise ParameterError(
                f"The initial partition covers {partition.n} columns but A has {self.A.shape[1]}."
            )
        self._initial_partition = partition
        self.k_initial = partition.num_sets

        if multi_index is not None:
            multi_index = np.asarray(multi_index, dtype=np.int64)
        self.multi_index = multi_index

        self.flags = {"method": ""}
        self.reset()

    def reset(self, reset_flags=False):
        """
        Return to the initial partition and clear statistics.

        Parameters
        ----------
        reset_flags : bool
            Whether to erase :attr:`flags`.
        """
        self.partition = VoronoiPartition(self._initial_partition.labels.copy(), self.k_initial)
        self.set_ids = np.arange(self.k_initial)
        self.centroids = None
        self.iter = 0
        self.converged = False
        self.truncated = False
        self._delta = None
        self._energy = None
        self.working_index = None
        self._iteration_dims = np.zeros(self.k_initial, dtype=np.int64)
        self._reset_stats()
        if reset_flags:
            self.flags = {"method": ""}

    def optimize(
        self,
        method="cvod",
        maxiter=DEFAULT_MAX_ITERS,
        epsilon=0.1,
        verbose=False,
        callback=None,
        **kwargs,
    ):
        r"""
        Run Lloyd iterations until the energy decrement falls below ``epsilon``.

        Supported methods:

        - ``'cvod'``

          Centroidal Voronoi orthogonal decomposition. Every set :math:`V_i`
          gets a subspace :math:`U_i` of fixed dimension :math:`d_i` spanned by
          its top left singular vectors, and columns are assigned by
          :math:`\|(I - U_iU_i^T)x\|_2^2`. The energy is

          .. math:: \mathcal{G}_1 = \sum_i \sum_{x \in V_i} \|(I - U_iU_i^T)x\|_2^2.

        - ``'vqpca'``

          Vector-quantization PCA. As ``'cvod'``, but every set is first centered
          on its mean :math:`\bar{x}_i`, both when fitting :math:`U_i` and when
          assigning:

          .. math:: \mathcal{G}_2 = \sum_i \sum_{x \in V_i} \|(I - U_iU_i^T)(x - \bar{x}_i)\|_2^2.

        - ``'adapt_cvod'``, ``'adapt_vqpca'``

          Adaptive variants. Instead of a fixed multi-index, the dimensions are
          redistributed every iteration: the singular values of all sets are
          pooled and the top :math:`r` kept, so a set may end up with
          :math:`d_i = 0`. Sets that lose all their columns are dropped, so the
          number of sets can only shrink.

        The loop follows the classic schedule: the first decrement is never
        tested (at least two iterations run), after which the run stops once
        :math:`\Delta^j < \epsilon`, where :math:`\Delta^j` is the decrement
        :math:`\mathcal{G}^{j-1} - \mathcal{G}^j` (``"absolute"``, CVOD family
        default) or that decrement divided by :math:`\mathcal{G}^{j-1}`
        (``"relative"``, VQPCA family default).

        Tip
        ~~~
        The parameters ``method``, ``maxiter``, and ``callback`` follow the
        naming of :meth:`scipy.optimize.minimize()`.

        Parameters
        ----------
        method : str
            Algorithm to run. See above.
        maxiter : int
            Cap on the iterations of this call. Hitting the cap sets
            :attr:`truncated` and warns.
        epsilon : float
            Stopping tolerance.
        verbose : bool OR int
            Whether to display a :mod:`tqdm` progress bar.
            If ``verbose`` is greater than 1, the flags are printed as a preamble.
        callback : callable OR None
            Called with this object after every iteration. If it returns
            ``True``, the run exits. Ignored if ``None``.
        **kwargs
            ``stopping`` and ``redistribute`` overrides, stored in :attr:`flags`.

        Returns
        -------
        (VoronoiPartition, CentroidSet, EnergyTrace)
            Final partition, centroids refitted to it, and the trace of all
            iterations so far.
        """
        # 1) Update flags based upon the arguments.
        self._update_flags(method, epsilon, verbose, **kwargs)

        # 2) Prepare the iterations iterable.
        maxiter = check_count(maxiter, "maxiter", 1)
        iterations = range(maxiter)
        if verbose and maxiter > 1:
            iterations = tqdm(iterations, desc=method)

        if self._delta is None:
            self._delta = self.flags["epsilon"] + 1

        # 3) Alternate centroid updates and assignments.
        self.converged = False
        self.truncated = False
        stopped = False
        for _ in iterations:
            self._iterate()

            if callback is not None:
                if callback(self):
                    stopped = True
                    break

            if self._energy_increased():
                warnings.warn(
                    f"'{method}' raised the energy at iteration {self.iter} "
                    f"(decrement {self._delta:.3e}); not treated as convergence."
                )
            elif self._delta < self.flags["epsilon"]:
                self.converged = True
                break

        if not (self.converged or stopped):
            self.truncated = True
            warnings.warn(
                f"'{method}' stopped at the iteration cap ({maxiter}) with "
                f"decrement {self._delta:.3e} above epsilon = {self.flags['epsilon']:.3e}."
            )

        # Refit so every d_i <= |V_i| on the final sets.
        self.centroids = self._update_centroids()

        return self.partition, self.centroids, self.trace

    def _update_flags(self, method, epsilon, verbose, **kwargs):
        """
        Helper function for :meth:`optimize()` to parse arguments.
        """
        # 0) Check and record method.
        methods = list(ALGORITHM_DEFAULTS.keys())
        if not method in methods:
            raise ParameterError(
                "Unrecognized method '{}'.\n"
                "Valid methods include {}".format(method, methods)
            )
        if not isinstance(epsilon, REAL_TYPES) or not epsilon > 0:
            raise ParameterError(f"epsilon must be positive; got {epsilon!r}.")
        self.flags["method"] = method
        self.flags["epsilon"] = float(epsilon)

        # 1) Family defaults, then keyword overrides.
        for flag, value in ALGORITHM_DEFAULTS[method].items():
            self.flags[flag] = value
        self.flags["redistribute"] = True

        for flag in kwargs:
            if kwargs[flag] is not None:
                self.flags[flag] = kwargs[flag]

        if self.flags["stopping"] not in STOPPING_OPTIONS:
            raise ParameterError(
                "Stopping rule '{}' not recognized.\n"
                "Valid options: {}".format(self.flags["stopping"], STOPPING_OPTIONS)
            )

        # 2) The fixed variants need one dimension per set.
        if self.flags["centroids"] == "fixed":
            if self.partition.num_sets != self.k_initial:
                raise ParameterError(
                    f"'{method}' needs a fixed number of sets, but this run has already "
                    f"been compacted to {self.partition.num_sets}; call reset() first."
                )
            if self.multi_index is None:
                if self.r < self.k_initial:
                    raise ParameterError(
                        f"Fixed-dimension algorithms need r >= k; got r = {self.r}, "
                        f"k = {self.k_initial}."
                    )
                self.multi_index = default_multi_index(self.r, self.k_initial)
            if self.multi_index.shape != (self.k_initial,) or int(np.sum(self.multi_index)) != self.r:
                raise ParameterError(
                    f"multi_index must have {self.k_initial} entries summing to r = {self.r}; "
                    f"got {self.multi_index.tolist()}."
                )

        # 3) Print the flags if verbose.
        if verbose > 1:
            print(f"Partitioning with '{method}' using the following flags:")
            pprint.pprint(self.flags)
            print("", end="", flush=True)  # Prevent tqdm conflicts.

    def _update_centroids(self):
        """
        Fit centroids to the current partition.

        Returns
        -------
        CentroidSet
            Centroids carrying the means of the current sets as shifts for the
            VQPCA family, zero shifts otherwise.
        """
        A = self.A
        parts = self.partition.parts(A)
        if self.flags["shifted"]:
            shifts = self.partition.means(A)
            parts = [part - shifts[:, [i]] for i, part in enumerate(parts)]
        else:
            shifts = np.zeros((A.shape[0], self.partition.num_sets))

        if self.flags["centroids"] == "fixed":
            if self.working_index is None:
                self.working_index = self.multi_index.copy()
            centroids = _update_fixed(
                parts, self.working_index, redistribute=self.flags["redistribute"]
            )
            self.working_index = carry_multi_index(self.working_index, centroids.dims)
        else:
            centroids, _ = update_centroids_adapt(parts, self.r)

        return centroids.with_shifts(shifts)

    def _energy_increased(self):
        """Whether the latest energy exceeds the previous one beyond roundoff."""
        energies = self.stats["energy"]
        if len(energies) < 2:
            return False
        return energies[-1] > energies[-2] + MONOTONE_RTOL * abs(energies[0])

    def _iterate(self):
        """One centroid update, one assignment, and the bookkeeping that follows."""
        A = self.A

        # (A) Centroid update on the current sets.
        centroids = self._update_centroids()
        self._iteration_dims = np.zeros(self.k_initial, dtype=np.int64)
        self._iteration_dims[self.set_ids] = centroids.dims

        # (B) Voronoi assignment against the new centroids.
        partition, residuals = find_voronoi_sets(A, centroids, return_distances=True)

        # (C) Energy of the new sets; the VQPCA family re-centers on the new means.
        if self.flags["shifted"]:
            energy = energy_g2(A, partition, centroids.with_shifts(partition.means(A)))
        else:
            energy = energy_g1(A, partition, centroids)

        if self.iter < 1:
            delta = self._delta
        else:
            delta = self._energy - energy
            if self.flags["stopping"] == "relative":
                delta = delta / self._energy if self._energy > 0 else 0.0

        # (D) Empty sets: refilled for fixed dimensions, dropped for adaptive ones.
        if self.flags["centroids"] == "fixed":
            if np.any(partition.sizes == 0):
                partition, _ = repair_empty_sets(partition, residuals)
        else:
            partition, kept = partition.compact()
            centroids = centroids.take(kept)
            self.set_ids = self.set_ids[kept]

        if self.flags["shifted"]:
            centroids = centroids.with_shifts(partition.means(A))

        self.partition = partition
        self.centroids = centroids
        self._update_stats(energy, delta)

        self._energy = energy
        self._delta = delta
        self.iter += 1

    def save(self, file_path):
        """Alias of :meth:`save_stats` with the full state."""
        self.save_stats(file_path, include_state=True)

    @classmethod
    def load(cls, file_path, A):
        """
        Rebuild a :class:`Partitioner` written by :meth:`save`.

        Parameters
        ----------
        file_path : str
            Path of the h5 file.
        A : array_like
            The data matrix of the saved run.

        Returns
        -------
        Partitioner
            Object in the saved state, ready to resume :meth:`optimize`.
            :meth:`reset` returns to the saved partition.
        """
        from_save = load_h5(file_path)
        partitioner = cls(
            A,
            r=int(from_save["r"]),
            partition=VoronoiPartition(
                np.atleast_1d(from_save["labels"]), int(from_save["num_sets"])
            ),
        )
        partitioner.load_stats(file_path, include_state=True)
        return partitioner


def lloyd_run(A, config, verbose=False, callback=None):
    """
    Partition the columns of ``A`` as described by ``config``.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` data matrix.
    config : PartitionConfig
        Algorithm and parameters. The baseline names are rejected.
    verbose : bool OR int
        See :meth:`Partitioner.optimize`.
    callback : callable OR None
        See :meth:`Partitioner.optimize`.

    Returns
    -------
    (VoronoiPartition, CentroidSet, EnergyTrace)
        Final state and the full trace. ``trace.truncated`` is set when the
        iteration cap was reached first.
    """
    A = as_matrix(A)
    if config.is_baseline:
        raise ParameterError(f"'{config.algorithm}' does not partition; use select_columns().")
    config.validate(A)

    partitioner = Partitioner(A, config.k, config.r, config.multi_index, config.seed)
    return partitioner.optimize(
        config.algorithm,
        config.max_iters,
        config.epsilon,
        verbose=verbose,
        callback=callback,
        stopping=config.stopping,
        redistribute=config.redistribute,
    )
