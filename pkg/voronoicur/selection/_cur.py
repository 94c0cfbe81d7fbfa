from voronoicur.selection._header import *
from voronoicur.selection._deim import SelectionResult, deim_select, partitioned_deim
from voronoicur.selection._bounds import (
    BoundReport,
    CurBoundReport,
    bound_report,
    residual_energy,
)


def reconstruction_error(A, C):
    r"""
    Normalized reconstruction error :math:`\|(I - CC^\dagger)A\|_F / \|A\|_F`.

    Parameters
    ----------
    A : array_like
        Nonzero ``(m, n)`` matrix.
    C : array_like
        Nonempty ``(m, p)`` matrix.

    Returns
    -------
    float
        The error, in ``[0, 1]`` up to rounding.
    """
    A = as_matrix(A)
    C = as_matrix(C, "C")
    if C.shape[0] != A.shape[0]:
        raise ParameterError(f"C has {C.shape[0]} rows but A has {A.shape[0]}.")
    norm = fro_norm(A)
    if norm == 0:
        raise DegenerateInputError("The reconstruction error of a zero matrix is undefined.")
    return float(np.sqrt(residual_energy(A, C)) / norm)


def _baseline(Y, A, r):
    # Plain DEIM on the leading right singular vectors of the (sketched) matrix.
    svd = truncated_svd(Y, r)
    if svd.rank < r:
        warnings.warn(f"The matrix has numerical rank {svd.rank} below r = {r}.")
    indices = deim_select(svd.right)
    partition = VoronoiPartition(np.zeros(A.shape[1], dtype=np.int64), 1)
    selection = SelectionResult(indices, A[:, indices], [indices], requested=r)
    trace = EnergyTrace([], [], [], [])
    return selection, partition, trace


def select_columns(A, config, sketch=None, verbose=False, return_partition=False):
    """
    Select ``config.r`` columns of ``A``.

    The partitioned algorithms run :func:`~voronoicur.partition.lloyd_run` and
    then :func:`partitioned_deim`. The baseline (``"deim"`` or ``"none"``)
    runs DEIM on the top ``r`` right singular vectors of ``A``.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    config : PartitionConfig
        Algorithm and parameters.
    sketch : SketchOperator OR None
        If given, partitioning and selection run on ``sketch.apply(A)``;
        indices and :attr:`SelectionResult.C` still refer to ``A``.
    verbose : bool OR int
        Passed to the Lloyd iteration.
    return_partition : bool
        Whether to also return the final partition.

    Returns
    -------
    (SelectionResult, EnergyTrace, BoundReport) OR (..., VoronoiPartition)
        The selection (timed in :attr:`SelectionResult.seconds`), the Lloyd
        trace (empty for the baseline), and the bound evaluated on ``A``.
    """
    A = as_matrix(A)
    config.validate(A)

    Y = A
    if sketch is not None:
        if not isinstance(sketch, SketchOperator):
            raise ParameterError(f"sketch must be a SketchOperator; got {type(sketch).__name__}.")
        Y = sketch.apply(A)
        config.validate(Y)

    start = time.perf_counter()
    if config.is_baseline:
        selection, partition, trace = _baseline(Y, A, config.r)
    else:
        partition, centroids, trace = lloyd_run(Y, config, verbose=verbose)
        selection = partitioned_deim(Y, partition, centroids, source=A)
    selection.seconds = time.perf_counter() - start

    report = bound_report(A, selection, partition, config.r)

    if return_partition:
        return selection, trace, report, partition
    return selection, trace, report


def select_rows(A, config, sketch=None, verbose=False):
    """
    Select ``config.r`` rows of ``A`` by running :func:`select_columns` on ``A.T``.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    config : PartitionConfig
        Algorithm and parameters; ``k`` counts sets of rows.
    sketch : SketchOperator OR None
        Sketch with ``n`` columns, applied to ``A.T``.
    verbose : bool OR int
        Passed to the Lloyd iteration.

    Returns
    -------
    (SelectionResult, EnergyTrace, BoundReport)
        Indices are row indices of ``A``; :attr:`SelectionResult.C` holds the
        selected rows as columns, i.e. ``R.T``.
    """
    return select_columns(as_matrix(A).T, config, sketch=sketch, verbose=verbose)


class CurDecomposition(object):
    r"""
    :math:`A \approx CUR` with :math:`C` and :math:`R` copied from :math:`A`
    and :math:`U = C^\dagger A R^\dagger`.

    Attributes
    ----------
    col_selection : SelectionResult
        Column selection on ``A``.
    row_selection : SelectionResult
        Row selection on ``A.T``.
    U : numpy.ndarray
        Linking matrix.
    """

    def __init__(self, col_selection, row_selection, U):
        self.col_selection = col_selection
        self.row_selection = row_selection
        self.U = np.asfortranarray(U)

    def __repr__(self):
        return f"CurDecomposition(C={self.C.shape}, U={self.U.shape}, R={self.R.shape})"

    @property
    def C(self):
        """Selected columns."""
        return self.col_selection.C

    @property
    def R(self):
        """Selected rows."""
        return np.asfortranarray(self.row_selection.C.T)

    def reconstruct(self):
        """The product ``C @ U @ R``."""
        return self.C @ self.U @ self.R

    def error(self, A):
        r""":math:`\|A - CUR\|_F`."""
        return fro_norm(as_matrix(A) - self.reconstruct())


def linking_matrix(A, C, R):
    r"""
    :math:`U = C^\dagger (A R^\dagger)`, from two least-squares solves.

    :math:`AR^\dagger` is obtained as the transpose of
    :math:`(R^T)^\dagger A^T`, then :math:`C^\dagger` is applied.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    C : array_like
        ``(m, p)`` columns.
    R : array_like
        ``(q, n)`` rows.

    Returns
    -------
    numpy.ndarray
        ``(p, q)`` matrix.
    """
    A = as_matrix(A)
    AR = pinv_apply(as_matrix(R, "R").T, A.T).T
    return pinv_apply(C, AR)


def cur_decompose(A, config, row_config=None, sketch=None, row_sketch=None, verbose=False):
    """
    CUR decomposition from partitioned column and row selections.

    Parameters
    ----------
    A : array_like
        ``(m, n)`` matrix.
    config : PartitionConfig
        Parameters of the column selection.
    row_config : PartitionConfig OR None
        Parameters of the row selection; defaults to ``config``.
    sketch, row_sketch : SketchOperator OR None
        Optional sketches for the column (``m`` columns) and row (``n`` columns) pipelines.
    verbose : bool OR int
        Passed to the Lloyd iterations.

    Returns
    -------
    (CurDecomposition, CurBoundReport)
    """
    A = as_matrix(A)
    if row_config is None:
        row_config = config

    columns, _, col_report = select_columns(A, config, sketch=sketch, verbose=verbose)
    rows, _, row_report = select_rows(A, row_config, sketch=row_sketch, verbose=verbose)

    U = linking_matrix(A, columns.C, rows.C.T)
    cur = CurDecomposition(columns, rows, U)

    return cur, CurBoundReport(col_report, row_report, cur.error(A))
