"""
Column subset selection and CUR decomposition driven by DEIM.

:func:`select_columns` partitions the columns of a matrix with one of the
Lloyd algorithms of :mod:`voronoicur.partition`, then combines per-set DEIM
selections with :func:`partitioned_deim`, which deflates each set against the
columns already chosen so that the combined selection has full column rank.
:func:`cur_decompose` runs the same pipeline on rows and links both with
:math:`U = C^\\dagger A R^\\dagger`. Every run is accompanied by a
:class:`BoundReport` that evaluates the partitioned error bound.

Note
~~~~
Internally, selection is split into several hidden files.

- ``_header.py`` : The common imports.
- ``_deim.py`` : DEIM and its partitioned combination (:class:`SelectionResult`).
- ``_bounds.py`` : Error bound diagnostics (:class:`BoundReport`, :class:`CurBoundReport`).
- ``_cur.py`` : End-to-end pipelines (:func:`select_columns`, :class:`CurDecomposition`).
"""
from voronoicur.selection._deim import SelectionResult, deim_select, partitioned_deim
from voronoicur.selection._bounds import (
    INTERMEDIATE_RTOL,
    BoundReport,
    CurBoundReport,
    bound_report,
    residual_energy,
)
from voronoicur.selection._cur import (
    CurDecomposition,
    cur_decompose,
    linking_matrix,
    reconstruction_error,
    select_columns,
    select_rows,
)
