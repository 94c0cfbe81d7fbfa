"""
Utilities for interfacing with files.

Three formats are handled:

- `HDF5 <https://hdfgroup.org/solutions/hdf5>`_ (.h5) archives of Lloyd runs,
  through the :mod:`h5py` `module <https://h5py.org>`_
  (:meth:`save_h5`, :meth:`load_h5`).
- IDX tensors, the big-endian format MNIST is distributed in, optionally
  gzip-compressed (:meth:`read_idx`, :meth:`parse_idx`).
- A headered text format for dense matrices whose first line is ``rows cols``,
  followed by one matrix row per line in 17 significant digits, so that
  :meth:`read_matrix` inverts :meth:`write_matrix` bit-exactly.
"""

import gzip
import os

import h5py
import numpy as np

from voronoicur.misc.errors import IdxParseError, MatrixParseError
from voronoicur.misc.math import as_matrix

# IDX type code of unsigned bytes, the only one MNIST uses.
IDX_UBYTE = 0x08
IDX_HEADER_BYTES = 4

# Suffixes dispatched to read_idx by load_matrix.
IDX_SUFFIXES = (".idx", "-ubyte", ".gz")


def _read_group(group, decode_bytes):
    data = {}
    for key, item in group.items():
        if isinstance(item, h5py.Group):
            data[key] = _read_group(item, decode_bytes)
            continue
        value = item[()]
        if decode_bytes and isinstance(value, bytes):
            value = value.decode("utf-8")
        data[key] = value
    return data


def load_h5(file_path, decode_bytes=True):
    """
    Read an archive written by :func:`save_h5`.

    Parameters
    ----------
    file_path : str
        Path of the h5 file.
    decode_bytes : bool
        Whether stored strings come back as ``str`` instead of ``bytes``.

    Returns
    -------
    dict
        Datasets by name; h5 groups become nested dictionaries.
    """
    with h5py.File(file_path, "r") as file_:
        return _read_group(file_, decode_bytes)


def _write_group(group, data):
    for key, value in data.items():
        if isinstance(value, dict):
            _write_group(group.create_group(key), value)
        elif isinstance(value, str):
            group[key] = value.encode("utf-8")
        elif value is None:
            # h5 has no null; load_stats reads a scalar False back as None.
            group[key] = False
        else:
            try:
                group[key] = np.array(value)
            except ValueError as e:
                raise ValueError(
                    f"Cannot archive '{key}': ragged arrays must be padded first. {e}"
                ) from e


def save_h5(file_path, data, mode="w"):
    """
    Archive a dictionary of run data (statistics, labels, centroids, flags).

    Nested dictionaries become h5 groups, strings are stored as UTF-8 bytes,
    ``None`` as ``False``, and everything else as a uniform numpy array.

    Parameters
    ----------
    file_path : str
        Path of the h5 file.
    data : dict
        Data to write.
    mode : str
        :class:`h5py.File` mode; ``"w"`` truncates an existing file.
    """
    with h5py.File(file_path, mode) as file_:
        _write_group(file_, data)


def parse_idx(data, samples_as_columns=True):
    """
    Decode an IDX byte string into a matrix.

    The layout is two zero bytes, the type code (only ``0x08``, unsigned byte,
    is supported), the number of dimensions, one big-endian ``uint32`` per
    dimension, then the payload in row-major order. The first dimension
    indexes samples; trailing dimensions are flattened, so a
    ``60000 x 28 x 28`` tensor becomes ``60000`` rows of ``784`` values.
    A one-dimensional tensor (e.g. a label file) is a single column of samples.
    Values are scaled to ``[0, 1]`` by ``1/255``.

    Parameters
    ----------
    data : bytes
        Raw file contents.
    samples_as_columns : bool
        If ``True`` (default), the result is transposed so that every sample
        is a column, the orientation column selection works on.

    Returns
    -------
    numpy.ndarray
        ``(features, samples)`` matrix, or ``(samples, features)`` if
        ``samples_as_columns`` is ``False``.

    Raises
    ------
    IdxParseError
        For a bad magic number, an unsupported type code, a zero dimension,
        a truncated header or payload, or trailing bytes. The error carries
        the offending byte offset.
    """
    data = bytes(data)
    if len(data) < IDX_HEADER_BYTES:
        raise IdxParseError(
            f"Header needs {IDX_HEADER_BYTES} bytes; got {len(data)}.", offset=len(data)
        )
    if data[0] != 0 or data[1] != 0:
        bad = 0 if data[0] != 0 else 1
        raise IdxParseError(f"Bad magic byte 0x{data[bad]:02x}; expected 0x00.", offset=bad)
    if data[2] != IDX_UBYTE:
        raise IdxParseError(
            f"Unsupported type code 0x{data[2]:02x}; only 0x{IDX_UBYTE:02x} (unsigned byte) is read.",
            offset=2,
        )
    ndim = data[3]
    if ndim == 0:
        raise IdxParseError("The tensor has no dimensions.", offset=3)

    payload_start = IDX_HEADER_BYTES + 4 * ndim
    if len(data) < payload_start:
        raise IdxParseError(
            f"Truncated dimension list: {ndim} dimensions need {payload_start} header bytes.",
            offset=len(data),
        )
    dims = np.frombuffer(data, dtype=">u4", count=ndim, offset=IDX_HEADER_BYTES).astype(np.int64)
    for i, size in enumerate(dims):
        if size == 0:
            raise IdxParseError(f"Dimension {i} is zero.", offset=IDX_HEADER_BYTES + 4 * i)

    # Python integers; a fuzzed header can overflow int64.
    count = 1
    for size in dims.tolist():
        count *= size
    payload_end = payload_start + count
    if len(data) < payload_end:
        raise IdxParseError(
            f"Truncated payload: dimensions {dims.tolist()} need {count} bytes; "
            f"got {len(data) - payload_start}.",
            offset=len(data),
        )
    if len(data) > payload_end:
        raise IdxParseError(
            f"{len(data) - payload_end} unexpected bytes after the payload.", offset=payload_end
        )

    values = np.frombuffer(data, dtype=np.uint8, count=count, offset=payload_start)
    matrix = values.reshape(int(dims[0]), -1).astype(np.float64) / 255

    if samples_as_columns:
        matrix = matrix.T
    return np.asfortranarray(matrix)


def read_idx(file_path, samples_as_columns=True):
    """
    Read an IDX file. Paths ending in ``.gz`` are decompressed transparently.

    Parameters
    ----------
    file_path : str
        Path to the file.
    samples_as_columns : bool
        See :meth:`parse_idx`.

    Returns
    -------
    numpy.ndarray
        See :meth:`parse_idx`.
    """
    opener = gzip.open if str(file_path).endswith(".gz") else open
    with opener(file_path, "rb") as file_:
        data = file_.read()
    return parse_idx(data, samples_as_columns=samples_as_columns)


def write_matrix(file_path, A):
    """
    Write a matrix in the headered text format.

    The first line is ``rows cols``. Every following line holds one row, its
    entries separated by single spaces in ``"{:.17g}"`` notation, which
    round-trips every ``float64`` exactly and is independent of the locale.

    Parameters
    ----------
    file_path : str
        Destination path; parent directories are created.
    A : array_like
        Finite matrix to write.
    """
    A = as_matrix(A)
    directory = os.path.dirname(os.path.abspath(file_path))
    os.makedirs(directory, exist_ok=True)

    with open(file_path, "w", encoding="ascii", newline="\n") as file_:
        file_.write("{} {}\n".format(*A.shape))
        for row in A:
            file_.write(" ".join(format(float(x), ".17g") for x in row))
            file_.write("\n")


def read_matrix(file_path):
    """
    Read a matrix written by :meth:`write_matrix`.

    Entries may also be separated by commas. Blank lines after the last row
    are ignored.

    Parameters
    ----------
    file_path : str
        Path to the file.

    Returns
    -------
    numpy.ndarray
        The matrix, ``float64`` in Fortran order.

    Raises
    ------
    MatrixParseError
        For an empty file, non-ASCII bytes, a malformed header, a row of the
        wrong length, a non-numeric entry, or a row count that disagrees with
        the header.
        The error carries the 1-based line number.
    """
    with open(file_path, "rb") as file_:
        raw = file_.read().splitlines()

    lines = []
    for number, line in enumerate(raw, start=1):
        try:
            lines.append(line.decode("ascii"))
        except UnicodeDecodeError:
            raise MatrixParseError("Non-ASCII bytes.", line=number) from None

    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixParseError("Empty file; expected a 'rows cols' header.", line=1)

    header = lines[0].split()
    try:
        rows, cols = (int(token) for token in header)
    except ValueError:
        raise MatrixParseError(f"Malformed header {lines[0]!r}; expected 'rows cols'.", line=1)
    if rows < 1 or cols < 1:
        raise MatrixParseError(f"Header dimensions must be positive; got {rows} x {cols}.", line=1)

    if len(lines) - 1 != rows:
        # The first missing line, or the first surplus one.
        raise MatrixParseError(
            f"Header declares {rows} rows but the file holds {len(lines) - 1}.",
            line=len(lines) + 1 if len(lines) - 1 < rows else rows + 2,
        )

    A = np.empty((rows, cols), order="F")
    for i, line in enumerate(lines[1:]):
        tokens = line.replace(",", " ").split()
        if len(tokens) != cols:
            raise MatrixParseError(f"Expected {cols} entries; got {len(tokens)}.", line=i + 2)
        try:
            A[i, :] = [float(token) for token in tokens]
        except ValueError:
            raise MatrixParseError(f"Non-numeric entry in {line!r}.", line=i + 2)

    if not np.all(np.isfinite(A)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(A), axis=1))[0])
        raise MatrixParseError("Non-finite entry.", line=bad + 2)

    return A


def load_matrix(file_path):
    """
    Load a data matrix, dispatching on the file name.

    IDX files (``.idx``, ``-ubyte``, or ``.gz``) go to :meth:`read_idx` with
    samples as columns; everything else to :meth:`read_matrix`.

    Parameters
    ----------
    file_path : str
        Path to the file.

    Returns
    -------
    numpy.ndarray
        The matrix whose columns are the selection targets.
    """
    if str(file_path).endswith(IDX_SUFFIXES):
        return read_idx(file_path)
    return read_matrix(file_path)
