"""Distributed PCA for column-partitioned data.

Each monitor owns a slice of the feature columns for every observation. It
uplinks its local top-r right singular vectors (loadings over its own
columns) and the projection of its block onto them. The fusion center
assembles the loadings into a block-diagonal selector, concatenates the
projections, runs PCA on that reduced m x (s*r) matrix, and lifts the result
back to the full feature space.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, DimensionMismatchError
from .matrix import as_matrix, thin_svd
from .pca import Subspace, residual_scores as _subspace_residual_scores

SUMMARY_HEADER = struct.Struct("<IIIQ")  # monitor_id, r, n_local, m


@dataclass(frozen=True)
class LocalSummary:
    """What one monitor uplinks: local loadings and the projected block."""

    monitor_id: int
    loadings: np.ndarray  # (n_local, r) column-orthonormal
    projection: np.ndarray  # (m, r) = block @ loadings

    @property
    def r(self) -> int:
        return self.loadings.shape[1]

    @property
    def n_local(self) -> int:
        return self.loadings.shape[0]

    @property
    def m(self) -> int:
        return self.projection.shape[0]

    def payload_values(self) -> int:
        """Float payload count on the wire: n_local*r loadings plus m*r projection entries."""
        return self.n_local * self.r + self.m * self.r


@dataclass(frozen=True)
class Aggregate:
    """Fusion-center state after combining column-block summaries.

    block_loading is the n x (s*r) block-diagonal matrix holding each
    monitor's loadings on its own column range; projections is the m x (s*r)
    concatenation of the uplinked projections, equal to the (centered) data
    times block_loading. PCA of the projections gives projection_components;
    lifting through block_loading gives the estimated global basis and the
    rank-limited reconstruction used for scoring.
    """

    block_loading: np.ndarray  # (n, s*r)
    projections: np.ndarray  # (m, s*r)
    projection_components: np.ndarray  # (s*r, k)
    basis: np.ndarray  # (n, k) column-orthonormal
    reconstruction: np.ndarray  # (m, n) = projections @ block_loading.T
    k: int

    @property
    def subspace(self) -> Subspace:
        return Subspace(self.basis)


def local_summarize(block, r: int, monitor_id: int = 0) -> LocalSummary:
    """Factorize one monitor's column block and keep loadings plus projection."""
    x = as_matrix(block)
    limit = min(x.shape)
    if not 1 <= r <= limit:
        raise ValueError(f"r={r} out of range 1..{limit} for a {x.shape} block")
    result = thin_svd(x)
    loadings = result.right[:, :r].copy()
    return LocalSummary(
        monitor_id=int(monitor_id),
        loadings=loadings,
        projection=x @ loadings,
    )


def aggregate(summaries: list[LocalSummary], k: int) -> Aggregate:
    """Fuse column-block summaries and keep a k-dimensional global estimate."""
    if not summaries:
        raise ValueError("no summaries to aggregate")
    ids = sorted(s.monitor_id for s in summaries)
    if ids != list(range(len(summaries))):
        raise ValueError(f"monitor ids must be exactly 0..{len(summaries) - 1}, got {ids}")
    by_id = sorted(summaries, key=lambda s: s.monitor_id)
    m = by_id[0].m
    r = by_id[0].r
    for s in by_id:
        if s.m != m or s.r != r:
            raise DimensionMismatchError(
                f"monitor {s.monitor_id} summary has (m={s.m}, r={s.r}), expected ({m}, {r})"
            )
    n = sum(s.n_local for s in by_id)
    sr = len(by_id) * r

    block_loading = np.zeros((n, sr))
    row = 0
    for i, s in enumerate(by_id):
        block_loading[row : row + s.n_local, i * r : (i + 1) * r] = s.loadings
        row += s.n_local
    projections = np.hstack([s.projection for s in by_id])

    limit = min(sr, m)
    if not 1 <= k <= limit:
        raise DimensionMismatchError(f"k={k} out of range 1..{limit} for fused rank {sr}, m={m}")
    fused = thin_svd(projections)
    projection_components = fused.right[:, :k].copy()
    basis = block_loading @ projection_components
    reconstruction = projections @ block_loading.T
    return Aggregate(
        block_loading=block_loading,
        projections=projections,
        projection_components=projection_components,
        basis=basis,
        reconstruction=reconstruction,
        k=k,
    )


def residual_scores(agg: Aggregate) -> np.ndarray:
    """Anomaly scores from the fusion-center reconstruction.

    The reconstruction already lives in the monitors' fused column space;
    scoring removes the k-dimensional estimated signal subspace from it and
    takes squared row norms of what is left.
    """
    return _subspace_residual_scores(agg.reconstruction, agg.subspace)


def pack_summary(summary: LocalSummary) -> bytes:
    """Serialize: u32 monitor_id, u32 r, u32 n_local, u64 m, then the
    loadings and the projection, each float64 column-major little-endian."""
    header = SUMMARY_HEADER.pack(summary.monitor_id, summary.r, summary.n_local, summary.m)
    loadings = np.asfortranarray(summary.loadings.astype("<f8")).tobytes(order="F")
    projection = np.asfortranarray(summary.projection.astype("<f8")).tobytes(order="F")
    return header + loadings + projection


def unpack_summary(buf: bytes) -> LocalSummary:
    """Parse a buffer produced by pack_summary."""
    if len(buf) < SUMMARY_HEADER.size:
        raise DataFormatError("summary buffer is truncated")
    monitor_id, r, n_local, m = SUMMARY_HEADER.unpack_from(buf)
    expected = SUMMARY_HEADER.size + 8 * (n_local * r + m * r)
    if len(buf) != expected:
        raise DataFormatError(f"summary buffer: expected {expected} bytes, got {len(buf)}")
    offset = SUMMARY_HEADER.size
    loadings = np.frombuffer(buf, dtype="<f8", count=n_local * r, offset=offset)
    loadings = loadings.reshape((n_local, r), order="F").astype(np.float64)
    offset += 8 * n_local * r
    projection = np.frombuffer(buf, dtype="<f8", count=m * r, offset=offset)
    projection = projection.reshape((m, r), order="F").astype(np.float64)
    return LocalSummary(monitor_id=monitor_id, loadings=loadings, projection=projection)
