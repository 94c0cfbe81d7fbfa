from voronoicur.partition._header import *


class EnergyTrace(object):
    """
    Per-iteration record of a Lloyd run.

    Attributes
    ----------
    energies : numpy.ndarray
        Energy after each iteration's assignment step.
    dims : list of numpy.ndarray
        Centroid dimensions used in each iteration, indexed by the initial set
        number. Sets dropped by compaction report zero.
    k_active : numpy.ndarray
        Number of centroids with at least one dimension in each iteration.
    num_sets : numpy.ndarray
        Number of sets after each iteration (adaptive runs may shrink).
    truncated : bool
        Whether the run stopped at the iteration cap before meeting the tolerance.
    """

    def __init__(self, energies, dims, k_active, num_sets, truncated=False):
        self.energies = np.asarray(energies, dtype=np.float64)
        self.dims = [np.asarray(d, dtype=np.int64) for d in dims]
        self.k_active = np.asarray(k_active, dtype=np.int64)
        self.num_sets = np.asarray(num_sets, dtype=np.int64)
        self.truncated = bool(truncated)

    def __len__(self):
        return len(self.energies)

    @property
    def iterations(self):
        """Iteration numbers, starting at 1."""
        return np.arange(1, len(self) + 1)

    def is_monotone(self, rtol=1e-10):
        """
        Whether every energy is at most the previous one plus ``rtol`` times the first.
        """
        if len(self) < 2:
            return True
        slack = rtol * abs(self.energies[0])
        return bool(np.all(np.diff(self.energies) <= slack))

    def rows(self, width=None):
        """
        Tabular form ``(iteration, energy, k_active, d_1, ..., d_width)``.

        Parameters
        ----------
        width : int OR None
            Number of dimension columns. Shorter records are padded with zeros.
            Defaults to the longest record.

        Returns
        -------
        list of tuple
        """
        if width is None:
            width = max((d.size for d in self.dims), default=0)
        rows = []
        for j in range(len(self)):
            d = np.zeros(width, dtype=np.int64)
            d[: self.dims[j].size] = self.dims[j][:width]
            rows.append((j + 1, float(self.energies[j]), int(self.k_active[j]), *d.tolist()))
        return rows


class _PartitionerStats(object):

    def _reset_stats(self):
        self.stats = {
            "energy": [],
            "delta": [],
            "dims": [],
            "k_active": [],
            "num_sets": [],
            "sizes": [],
        }

    def _update_stats(self, energy, delta):
        """
        Append the state of the current iteration to :attr:`stats`.

        Parameters
        ----------
        energy : float
            Energy after the assignment step.
        delta : float
            Stopping quantity after this iteration.
        """
        self.stats["energy"].append(float(energy))
        self.stats["delta"].append(float(delta))
        self.stats["dims"].append(self._iteration_dims.copy())
        self.stats["k_active"].append(int(np.count_nonzero(self._iteration_dims)))
        self.stats["num_sets"].append(int(self.partition.num_sets))
        sizes = np.zeros(self.k_initial, dtype=np.int64)
        sizes[self.set_ids] = self.partition.sizes
        self.stats["sizes"].append(sizes)

    @property
    def trace(self):
        """The statistics collected so far, as an :class:`EnergyTrace`."""
        return EnergyTrace(
            self.stats["energy"],
            self.stats["dims"],
            self.stats["k_active"],
            self.stats["num_sets"],
            truncated=self.truncated,
        )

    @staticmethod
    def _pad(ragged, width):
        padded = np.zeros((len(ragged), width), dtype=np.int64)
        for j, row in enumerate(ragged):
            padded[j, : len(row)] = row
        return padded

    def _as_basis(self, stored):
        stored = np.asarray(stored, dtype=np.float64)
        if stored.size == 0:
            return np.zeros((self.A.shape[0], 0))
        return stored.reshape(self.A.shape[0], -1)

    def save_stats(self, file_path, include_state=True):
        """
        Uses :meth:`save_h5` to export the statistics to a given h5 file.

        Parameters
        ----------
        file_path : str
            Full path to the file to write.
        include_state : bool
            If ``True``, also stores the current partition, centroids, iteration
            counter, and :attr:`flags`, enough for :meth:`load_stats` to resume.
        """
        stats = dict(self.stats)
        stats["dims"] = self._pad(self.stats["dims"], self.k_initial)
        stats["sizes"] = self._pad(self.stats["sizes"], self.k_initial)

        to_save = {"stats": stats}
        if include_state:
            to_save["iter"] = self.iter
            to_save["r"] = self.r
            to_save["k_initial"] = self.k_initial
            to_save["multi_index"] = self.multi_index
            to_save["working_index"] = self.working_index
            to_save["set_ids"] = self.set_ids
            to_save["flags"] = dict(self.flags)
            to_save["labels"] = self.partition.labels
            to_save["num_sets"] = self.partition.num_sets
            to_save["truncated"] = self.truncated
            to_save["converged"] = self.converged
            if self.centroids is not None:
                to_save["centroids"] = {
                    "shifts": self.centroids.shifts,
                    "bases": {str(i): b.basis for i, b in enumerate(self.centroids.bases)},
                    "singular_values": {
                        str(i): s for i, s in enumerate(self.centroids.singular_values)
                    },
                }

        save_h5(file_path, to_save)

    def load_stats(self, file_path, include_state=True):
        """
        Uses :meth:`load_h5` to import statistics written by :meth:`save_stats`.

        Parameters
        ----------
        file_path : str
            Full path to the file to read.
        include_state : bool
            If ``True``, also restores the partition, centroids, iteration
            counter, and :attr:`flags`.
        """
        from voronoicur.partition._sets import VoronoiPartition
        from voronoicur.partition._centroids import CentroidSet

        from_save = load_h5(file_path)

        stats = from_save["stats"]
        self.stats = {
            "energy": [float(e) for e in np.atleast_1d(stats["energy"])],
            "delta": [float(e) for e in np.atleast_1d(stats["delta"])],
            "dims": [np.asarray(row) for row in np.atleast_2d(stats["dims"])],
            "k_active": [int(k) for k in np.atleast_1d(stats["k_active"])],
            "num_sets": [int(k) for k in np.atleast_1d(stats["num_sets"])],
            "sizes": [np.asarray(row) for row in np.atleast_2d(stats["sizes"])],
        }

        if include_state:
            if "labels" not in from_save:
                raise ValueError(
                    "State was not stored in file '{}' "
                    "and cannot be imported".format(file_path)
                )
            self.iter = int(from_save["iter"])
            self.r = int(from_save["r"])
            self.k_initial = int(from_save["k_initial"])
            multi_index = np.asarray(from_save["multi_index"])
            # None is stored as False.
            self.multi_index = multi_index.astype(np.int64) if multi_index.ndim == 1 else None
            working = np.asarray(from_save.get("working_index", False))
            self.working_index = working.astype(np.int64) if working.ndim == 1 else None
            self.set_ids = np.atleast_1d(np.asarray(from_save["set_ids"], dtype=np.int64))
            self.flags = dict(from_save["flags"])
            self.truncated = bool(from_save["truncated"])
            self.converged = bool(from_save["converged"])
            self.partition = VoronoiPartition(
                np.atleast_1d(from_save["labels"]), int(from_save["num_sets"])
            )
            if self.stats["energy"]:
                self._iteration_dims = self.stats["dims"][-1].astype(np.int64)
                self._energy = self.stats["energy"][-1]
                self._delta = self.stats["delta"][-1]
            else:
                self._iteration_dims = np.zeros(self.k_initial, dtype=np.int64)
                self._energy = None
                self._delta = None
            if "centroids" in from_save:
                c = from_save["centroids"]
                keys = sorted(c["bases"].keys(), key=int)
                self.centroids = CentroidSet(
                    [self._as_basis(c["bases"][key]) for key in keys],
                    c["shifts"],
                    [np.atleast_1d(c["singular_values"][key]) for key in keys],
                )

    def plot_stats(self, stats_dict=None, show=False):
        """
        Plots the energy profile and the evolution of the centroid dimensions.

        Parameters
        ----------
        stats_dict : dict OR None
            Stats to plot in dictionary form. If ``None``, defaults to :attr:`stats`.
        show : bool
            Whether or not to immediately show the plot. Defaults to false.

        Returns
        -------
        (matplotlib.axes.Axes, matplotlib.axes.Axes)
            The energy axis and the dimension axis.
        """
        if stats_dict is None:
            stats_dict = self.stats

        _, (ax_energy, ax_dims) = plt.subplots(1, 2, figsize=(10, 4))

        niter = np.arange(1, len(stats_dict["energy"]) + 1)
        method = self.flags.get("method", "")

        ax_energy.plot(niter, stats_dict["energy"], "o-", c="C0", lw=0.5)
        ax_energy.set_xlabel("Iteration")
        ax_energy.set_ylabel("Energy")
        ax_energy.set_title(f"{method} energy")
        ax_energy.grid()

        dims = self._pad(stats_dict["dims"], self.k_initial)
        for i in range(dims.shape[1]):
            ax_dims.plot(niter, dims[:, i], "s-", c="C%d" % (i % 10), lw=0.5, label=f"set {i}")
        ax_dims.set_xlabel("Iteration")
        ax_dims.set_ylabel("Centroid dimension")
        ax_dims.set_title(f"{method} dimensions")
        ax_dims.grid()
        if dims.shape[1] <= 10:
            ax_dims.legend(loc="upper right", fontsize="small")

        try:  # This fails under degenerate conditions. Fail elegantly.
            plt.tight_layout()
        except:
            pass

        if show:
            plt.show()

        return ax_energy, ax_dims
