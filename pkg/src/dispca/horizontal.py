"""Distributed PCA for row-partitioned data.

Each monitor holds a block of observations over the full feature set. It
uplinks only the top r singular values and right singular vectors of its
block. The fusion center scales each loading matrix by its singular values,
stacks the s blocks into an (s*r) x n matrix, and re-factorizes; the right
singular vectors of that stack approximate the global principal components.
Left singular vectors never travel: right factors are invariant under left
multiplication of a block by any orthonormal matrix.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, DimensionMismatchError
from .matrix import as_matrix, thin_svd
from .pca import Subspace

SUMMARY_HEADER = struct.Struct("<III")  # monitor_id, r, n


@dataclass(frozen=True)
class LocalSummary:
    """What one monitor uplinks: top-r singular values and right vectors."""

    monitor_id: int
    singular_values: np.ndarray  # (r,) nonincreasing, nonnegative
    right_vectors: np.ndarray  # (n, r) column-orthonormal

    @property
    def r(self) -> int:
        return self.singular_values.shape[0]

    @property
    def n(self) -> int:
        return self.right_vectors.shape[0]

    def payload_values(self) -> int:
        """Float payload count on the wire: r singular values plus n*r vector entries."""
        return self.r + self.n * self.r


@dataclass(frozen=True)
class Aggregate:
    """Fusion-center state: the stacked summary matrix and its SVD factors."""

    stacked: np.ndarray  # (s*r, n), block i = diag(sigma_i) @ right_i.T
    global_singular_values: np.ndarray  # (q,), q = min(s*r, n)
    global_right_vectors: np.ndarray  # (n, q) column-orthonormal


def local_summarize(block, r: int, monitor_id: int = 0) -> LocalSummary:
    """Factorize one monitor's block and keep the top-r factors.

    A block of rank below r keeps trailing zero singular values with the
    orthonormal completion vectors from the thin SVD, so the transcript size
    stays fixed at r.
    """
    x = as_matrix(block)
    limit = min(x.shape)
    if not 1 <= r <= limit:
        raise ValueError(f"r={r} out of range 1..{limit} for a {x.shape} block")
    result = thin_svd(x)
    return LocalSummary(
        monitor_id=int(monitor_id),
        singular_values=result.singular_values[:r].copy(),
        right_vectors=result.right[:, :r].copy(),
    )


def aggregate(summaries: list[LocalSummary]) -> Aggregate:
    """Stack the per-monitor summaries in monitor-id order and re-factorize."""
    if not summaries:
        raise ValueError("no summaries to aggregate")
    ids = sorted(s.monitor_id for s in summaries)
    if ids != list(range(len(summaries))):
        raise ValueError(f"monitor ids must be exactly 0..{len(summaries) - 1}, got {ids}")
    by_id = sorted(summaries, key=lambda s: s.monitor_id)
    n = by_id[0].n
    r = by_id[0].r
    for s in by_id:
        if s.n != n or s.r != r:
            raise DimensionMismatchError(
                f"monitor {s.monitor_id} summary has (n={s.n}, r={s.r}), expected ({n}, {r})"
            )
    stacked = np.vstack([s.singular_values[:, None] * s.right_vectors.T for s in by_id])
    result = thin_svd(stacked)
    return Aggregate(
        stacked=stacked,
        global_singular_values=result.singular_values,
        global_right_vectors=result.right,
    )


def principal_subspace(agg: Aggregate, k: int) -> Subspace:
    """Top-k columns of the aggregated right singular vectors."""
    q = agg.global_right_vectors.shape[1]
    if not 1 <= k <= q:
        raise DimensionMismatchError(f"k={k} out of range 1..{q}")
    return Subspace(agg.global_right_vectors[:, :k].copy())


def pack_summary(summary: LocalSummary) -> bytes:
    """Serialize: u32 monitor_id, u32 r, u32 n, then float64 singular values
    and the right vectors column-major, all little-endian."""
    header = SUMMARY_HEADER.pack(summary.monitor_id, summary.r, summary.n)
    values = np.ascontiguousarray(summary.singular_values, dtype="<f8").tobytes()
    vectors = np.asfortranarray(summary.right_vectors.astype("<f8")).tobytes(order="F")
    return header + values + vectors


def unpack_summary(buf: bytes) -> LocalSummary:
    """Parse a buffer produced by pack_summary."""
    if len(buf) < SUMMARY_HEADER.size:
        raise DataFormatError("summary buffer is truncated")
    monitor_id, r, n = SUMMARY_HEADER.unpack_from(buf)
    expected = SUMMARY_HEADER.size + 8 * (r + n * r)
    if len(buf) != expected:
        raise DataFormatError(f"summary buffer: expected {expected} bytes, got {len(buf)}")
    offset = SUMMARY_HEADER.size
    values = np.frombuffer(buf, dtype="<f8", count=r, offset=offset).astype(np.float64)
    offset += 8 * r
    vectors = np.frombuffer(buf, dtype="<f8", count=n * r, offset=offset)
    vectors = vectors.reshape((n, r), order="F").astype(np.float64)
    return LocalSummary(monitor_id=monitor_id, singular_values=values, right_vectors=vectors)
