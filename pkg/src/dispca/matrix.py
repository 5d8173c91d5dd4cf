"""Dense-matrix primitives: validation, centering, z-scoring, thin SVD, and I/O.

Everything downstream treats matrices as immutable float64 values with rows
as observations and columns as features.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataFormatError, DimensionMismatchError, SvdConvergenceError

ORTHO_TOL = 1e-10

_BIN_HEADER = struct.Struct("<QQ")


def as_matrix(m) -> np.ndarray:
    """Coerce a DataMatrix or array-like to a validated float64 2-D array.

    Raises DimensionMismatchError for non-2-D or empty shapes and ValueError
    for non-finite entries.
    """
    values = m.values if isinstance(m, DataMatrix) else np.asarray(m, dtype=np.float64)
    if values.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got ndim={values.ndim}")
    if values.shape[0] < 1 or values.shape[1] < 1:
        raise DimensionMismatchError(f"matrix must be at least 1x1, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("matrix entries must be finite")
    return values


@dataclass(frozen=True)
class DataMatrix:
    """An m x n observation matrix with optional feature labels."""

    values: np.ndarray
    col_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", as_matrix(values))
        if self.col_names is not None:
            names = tuple(str(c) for c in self.col_names)
            if len(names) != values.shape[1]:
                raise DimensionMismatchError(
                    f"{len(names)} column names for {values.shape[1]} columns"
                )
            object.__setattr__(self, "col_names", names)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ColumnStats:
    """Per-column means and population standard deviations."""

    means: np.ndarray
    stds: np.ndarray


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD factors: left (m x q), singular_values (q,), right (n x q).

    q = min(m, n); singular values are nonincreasing and the sign convention
    below makes the factors deterministic.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


def _apply_sign_convention(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Largest-magnitude entry of each right singular vector is made positive;
    # the matching left vector is flipped with it.
    idx = np.argmax(np.abs(right), axis=0)
    signs = np.sign(right[idx, np.arange(right.shape[1])])
    signs[signs == 0] = 1.0
    return left * signs, right * signs


def thin_svd(m) -> SvdResult:
    """Thin SVD with a deterministic sign convention.

    Raises SvdConvergenceError if the factorization does not converge.
    """
    x = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(f"SVD did not converge on a {x.shape} matrix") from exc
    u, v = _apply_sign_convention(u, vh.T)
    return SvdResult(left=u, singular_values=s, right=v)


def center_columns(m) -> tuple[DataMatrix, ColumnStats]:
    """Subtract the column means; returns the centered matrix and the stats.

    stds in the returned stats are the population standard deviations of the
    original columns.
    """
    x = as_matrix(m)
    means = x.mean(axis=0)
    centered = x - means
    stds = np.sqrt(np.mean(centered * centered, axis=0))
    names = m.col_names if isinstance(m, DataMatrix) else None
    return DataMatrix(centered, names), ColumnStats(means=means, stds=stds)


def zscore_columns(m) -> tuple[DataMatrix, ColumnStats]:
    """Center each column and scale it to unit population standard deviation.

    Columns whose entries are all exactly equal are mapped to zeros and
    recorded with std 0 in the stats.
    """
    x = as_matrix(m)
    constant = np.all(x == x[0, :], axis=0)
    means = np.where(constant, x[0, :], x.mean(axis=0))
    centered = x - means
    stds = np.sqrt(np.mean(centered * centered, axis=0))
    stds = np.where(constant, 0.0, stds)
    out = np.divide(centered, np.where(stds > 0, stds, 1.0))
    out[:, constant] = 0.0
    names = m.col_names if isinstance(m, DataMatrix) else None
    return DataMatrix(out, names), ColumnStats(means=means, stds=stds)


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    x = as_matrix(a)
    y = as_matrix(b)
    if x.shape[1] != y.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {x.shape} by {y.shape}")
    return x @ y


def save_csv(m: DataMatrix, path) -> None:
    """Write a matrix as CSV: header row of column names, one row per observation."""
    names = m.col_names or tuple(f"c{j}" for j in range(m.n))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in m.values.tolist():
            writer.writerow([repr(v) for v in row])


def load_csv(path) -> DataMatrix:
    """Read a matrix written by save_csv. Lines starting with '#' are skipped."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    except OSError as exc:
        raise DataFormatError(f"cannot read matrix CSV {path}: {exc}") from exc
    if len(rows) < 2:
        raise DataFormatError(f"matrix CSV {path} needs a header and at least one data row")
    names = tuple(rows[0])
    try:
        values = np.array([[float(v) for v in row] for row in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise DataFormatError(f"non-numeric entry in matrix CSV {path}: {exc}") from exc
    if values.ndim != 2 or values.shape[1] != len(names):
        raise DataFormatError(f"ragged rows in matrix CSV {path}")
    return DataMatrix(values, names)


def save_bin(m: DataMatrix, path) -> None:
    """Write the raw binary layout: u64 m, u64 n, then m*n float64 row-major, little-endian."""
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(m.m, m.n))
        fh.write(np.ascontiguousarray(m.values, dtype="<f8").tobytes())


def load_bin(path) -> DataMatrix:
    """Read a matrix written by save_bin."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataFormatError(f"cannot read matrix file {path}: {exc}") from exc
    if len(raw) < _BIN_HEADER.size:
        raise DataFormatError(f"matrix file {path} is truncated")
    rows, cols = _BIN_HEADER.unpack_from(raw)
    expected = _BIN_HEADER.size + rows * cols * 8
    if len(raw) != expected:
        raise DataFormatError(f"matrix file {path}: expected {expected} bytes, got {len(raw)}")
    values = np.frombuffer(raw, dtype="<f8", offset=_BIN_HEADER.size).reshape(rows, cols)
    return DataMatrix(values.astype(np.float64))
