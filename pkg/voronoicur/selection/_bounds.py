from voronoicur.selection._header import *


def residual_energy(V, C):
    r"""
    Squared Frobenius residual :math:`\|(I - CC^\dagger)V\|_F^2`.

    The projector is never formed: ``C`` is reduced to an orthonormal basis by
    :func:`~voronoicur.linalg.thin_qr`. An empty or zero ``C`` leaves ``V`` whole.

    Parameters
    ----------
    V : array_like
        ``(m, n)`` matrix.
    C : array_like
        ``(m, p)`` matrix, ``p >= 0``.

    Returns
    -------
    float
    """
    V = np.asarray(V, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    if C.size == 0 or not np.any(C):
        return fro_norm(V) ** 2
    return fro_norm(orthonormal_residual(V, thin_qr(C))) ** 2


class BoundReport(object):
    r"""
    Evaluation of the partitioned error bound for one column selection.

    Two inequalities are evaluated for :math:`\tilde{k}` nonempty sets and
    :math:`\gamma = \max_i \|(I - C_iC_i^\dagger)V_i\|_F^2`:

    - the intermediate inequality :math:`\|(I - CC^\dagger)A\|_F^2 \le \tilde{k}\gamma`,
      which holds for every selection whose blocks :math:`C_i` are drawn from
      the sets :math:`V_i`;
    - the stated bound :math:`\|(I - CC^\dagger)A\|_F \le \sqrt{2\tilde{k}\gamma}\,E_r`
      with :math:`E_r = \|A - A_r\|_F`. Its derivation divides by
      :math:`E_r^2` after adding one, so it is only enforced when :math:`E_r \ge 1`.

    Attributes
    ----------
    k_tilde : int
        Number of nonempty sets.
    k_active : int
        Number of sets that contributed at least one column.
    gamma : float
        Worst per-set squared residual.
    tail : float
        :math:`E_r`.
    lhs : float
        :math:`\|(I - CC^\dagger)A\|_F`.
    rank : int
        The ``r`` of :math:`E_r`.
    """

    def __init__(self, k_tilde, k_active, gamma, tail, lhs, rank):
        self.k_tilde = int(k_tilde)
        self.k_active = int(k_active)
        self.gamma = float(gamma)
        self.tail = float(tail)
        self.lhs = float(lhs)
        self.rank = int(rank)

    def __repr__(self):
        return (
            f"BoundReport(k_tilde={self.k_tilde}, gamma={self.gamma:.6g}, "
            f"tail={self.tail:.6g}, lhs={self.lhs:.6g})"
        )

    @property
    def intermediate_rhs(self):
        r""":math:`\tilde{k}\gamma`."""
        return self.k_tilde * self.gamma

    @property
    def intermediate_holds(self):
        """Whether ``lhs**2 <= k_tilde * gamma`` within :data:`INTERMEDIATE_RTOL`."""
        return self.lhs ** 2 <= self.intermediate_rhs * (1 + INTERMEDIATE_RTOL)

    @property
    def intermediate_slack(self):
        """``1 - lhs**2 / (k_tilde * gamma)``; zero when both sides vanish."""
        if self.intermediate_rhs == 0:
            return 0.0 if self.lhs == 0 else -np.inf
        return 1 - self.lhs ** 2 / self.intermediate_rhs

    @property
    def stated_rhs(self):
        r""":math:`\sqrt{2\tilde{k}\gamma}\,E_r`."""
        return float(np.sqrt(2 * self.k_tilde * self.gamma) * self.tail)

    @property
    def stated_enforced(self):
        """Whether the stated bound applies, i.e. ``tail >= 1``."""
        return self.tail >= 1

    @property
    def stated_holds(self):
        """Whether ``lhs <= stated_rhs``; only meaningful if :attr:`stated_enforced`."""
        return self.lhs <= self.stated_rhs

    @property
    def stated_slack(self):
        """``1 - lhs / stated_rhs``; zero when both sides vanish."""
        if self.stated_rhs == 0:
            return 0.0 if self.lhs == 0 else -np.inf
        return 1 - self.lhs / self.stated_rhs

    def rows(self, prefix=""):
        """
        ``(key, value)`` pairs describing the report, for text export.

        Parameters
        ----------
        prefix : str
            Prepended to every key.

        Returns
        -------
        list of (str, object)
        """
        return [
            (prefix + "k_tilde", self.k_tilde),
            (prefix + "k_active", self.k_active),
            (prefix + "gamma", self.gamma),
            (prefix + "tail", self.tail),
            (prefix + "lhs", self.lhs),
            (prefix + "intermediate_rhs", self.intermediate_rhs),
            (prefix + "intermediate_slack", self.intermediate_slack),
            (prefix + "intermediate", "PASS" if self.intermediate_holds else "FAIL"),
            (prefix + "stated_rhs", self.stated_rhs),
            (prefix + "stated_slack", self.stated_slack),
            (prefix + "stated", _verdict(self.stated_holds, self.stated_enforced)),
        ]


def _verdict(holds, enforced):
    if holds:
        return "PASS"
    return "FAIL" if enforced else "REPORTED"


def bound_report(A, selection, partition, r):
    """
    Evaluate the partitioned error bound of a column selection.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix the selected columns were copied from.
    selection : SelectionResult
        Selection whose :attr:`~SelectionResult.per_set_blocks` follow ``partition``.
    partition : VoronoiPartition
        Final partition of the columns of ``A``.
    r : int
        Rank of the tail term :math:`E_r`, at most ``min(m, n)``.

    Returns
    -------
    BoundReport
    """
    A = as_matrix(A)
    r = check_count(r, "r", 1, min(A.shape))
    if len(selection.per_set_blocks) != partition.num_sets:
        raise ParameterError(
            f"The selection has {len(selection.per_set_blocks)} blocks but the "
            f"partition has {partition.num_sets} sets."
        )

    gamma = 0.0
    k_tilde = 0
    for idx, block in zip(partition.sets(), selection.per_set_blocks):
        if idx.size == 0:
            continue
        k_tilde += 1
        gamma = max(gamma, residual_energy(A[:, idx], A[:, block]))

    k_active = sum(1 for block in selection.per_set_blocks if block.size)
    lhs = np.sqrt(residual_energy(A, A[:, selection.global_indices]))

    return BoundReport(k_tilde, k_active, gamma, tail_norm(A, r), lhs, r)


class CurBoundReport(object):
    r"""
    Evaluation of the CUR bound
    :math:`\|A - CUR\|_F \le (\sqrt{2k_1\gamma_C} + \sqrt{2k_2\gamma_R})\,E_r`.

    Attributes
    ----------
    columns : BoundReport
        Report of the column selection on ``A``.
    rows_ : BoundReport
        Report of the row selection on ``A^T``.
    error : float
        :math:`\|A - CUR\|_F`.
    """

    def __init__(self, columns, rows_, error):
        self.columns = columns
        self.rows_ = rows_
        self.error = float(error)

    def __repr__(self):
        return f"CurBoundReport(error={self.error:.6g}, rhs={self.rhs:.6g})"

    @property
    def tail(self):
        """:math:`E_r`, shared by both reports."""
        return self.columns.tail

    @property
    def rhs(self):
        """Right-hand side of the CUR bound."""
        c, r = self.columns, self.rows_
        return float(
            (np.sqrt(2 * c.k_tilde * c.gamma) + np.sqrt(2 * r.k_tilde * r.gamma)) * self.tail
        )

    @property
    def enforced(self):
        """Whether the bound applies, i.e. ``tail >= 1``."""
        return self.tail >= 1

    @property
    def holds(self):
        """Whether ``error <= rhs``."""
        return self.error <= self.rhs

    def rows(self):
        """``(key, value)`` pairs: the CUR bound, then the column and row reports."""
        return [
            ("cur_error", self.error),
            ("cur_rhs", self.rhs),
            ("cur_bound", _verdict(self.holds, self.enforced)),
        ] + self.columns.rows("col_") + self.rows_.rows("row_")
