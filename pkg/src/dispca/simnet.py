"""Simulated distributed deployment of both PCA protocols.

Monitors are logical actors: the matrix is partitioned, a pre-pass computes
global column statistics so every block is normalized identically to the
centralized pipeline, summaries cross an in-memory wire as the exact bytes
the protocol modules serialize, and the fusion side unpacks and aggregates.
Payload values are counted from those byte buffers, so communication costs
are measured, not assumed. Every run also carries the geodesic distance to
the centralized principal subspace computed on the same normalized matrix.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import commcost, horizontal, vertical
from .errors import InvalidConfigError
from .matrix import ColumnStats, as_matrix, center_columns, zscore_columns
from .metrics import geodesic_distance
from .pca import Subspace, fit_pca, residual_scores

MODES = ("horizontal", "vertical")
NORMALIZATIONS = ("center", "zscore")

# relative std below which a column is treated as constant by the
# distributed pre-pass (float dust from summing an exactly constant column)
_CONST_STD_REL = 1e-12


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise InvalidConfigError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class Partitioning:
    """Contiguous split of rows (horizontal) or columns (vertical)."""

    mode: str
    s: int
    boundaries: tuple[int, ...]  # s+1 cut indices, 0 .. total

    @property
    def sizes(self) -> tuple[int, ...]:
        b = self.boundaries
        return tuple(b[i + 1] - b[i] for i in range(self.s))


def partition(m, mode: str, s: int) -> Partitioning:
    """Split the matrix into s nearly equal contiguous blocks.

    Every block except the last has round-half-up(total / s) rows or columns;
    the last absorbs the remainder. The rule can leave the last block empty
    for extreme s (e.g. 11 items over 7 monitors), which is rejected.
    """
    x = as_matrix(m)
    _check_mode(mode)
    total = x.shape[0] if mode == "horizontal" else x.shape[1]
    axis = "rows" if mode == "horizontal" else "columns"
    if not 1 <= s <= total:
        raise ValueError(f"s={s} out of range 1..{total} ({axis})")
    size = (2 * total + s) // (2 * s)  # round-half-up of total/s, exact in ints
    last = total - (s - 1) * size
    if last < 1:
        raise ValueError(
            f"nearest-integer split of {total} {axis} over s={s} monitors leaves "
            f"the last block with {last}; reduce s"
        )
    boundaries = tuple(i * size for i in range(s)) + (total,)
    return Partitioning(mode=mode, s=s, boundaries=boundaries)


def split_blocks(m, parts: Partitioning) -> list[np.ndarray]:
    """Materialize the per-monitor blocks of the partitioning."""
    x = as_matrix(m)
    b = parts.boundaries
    if parts.mode == "horizontal":
        if b[-1] != x.shape[0]:
            raise ValueError(f"partitioning covers {b[-1]} rows, matrix has {x.shape[0]}")
        return [x[b[i] : b[i + 1], :].copy() for i in range(parts.s)]
    if b[-1] != x.shape[1]:
        raise ValueError(f"partitioning covers {b[-1]} columns, matrix has {x.shape[1]}")
    return [x[:, b[i] : b[i + 1]].copy() for i in range(parts.s)]


@dataclass(frozen=True)
class PrepassResult:
    """Globally normalized blocks plus the statistics round's uplink cost."""

    blocks: list[np.ndarray]
    stats: ColumnStats
    values_sent: int  # 2 values per (monitor-visible) column: sum + sum of squares


def center_prepass(blocks: list[np.ndarray], mode: str, scale: bool = False) -> PrepassResult:
    """Normalize every block with GLOBAL column statistics.

    Horizontal blocks see all columns but only some rows, so stats take two
    uplink rounds: column sums give the global means, then column sums of
    squared deviations from those means give the population stds. Vertical
    blocks own whole columns, so their local statistics are already global
    and each monitor normalizes in place. Either way the concatenation of
    the returned blocks equals the centrally normalized matrix, and every
    monitor uplinks 2 values per column it sees.
    """
    _check_mode(mode)
    if not blocks:
        raise ValueError("no blocks")
    if mode == "horizontal":
        n = blocks[0].shape[1]
        for blk in blocks:
            if blk.shape[1] != n:
                raise ValueError("horizontal blocks must share the column count")
        m_total = sum(blk.shape[0] for blk in blocks)
        col_sums = np.sum([blk.sum(axis=0) for blk in blocks], axis=0)
        means = col_sums / m_total
        sq_sums = np.sum([((blk - means) ** 2).sum(axis=0) for blk in blocks], axis=0)
        stds = np.sqrt(sq_sums / m_total)
        if scale:
            # a constant column yields std at float-dust level relative to its
            # mean; dividing by it would amplify rounding noise into signal
            effective = stds.copy()
            effective[stds <= _CONST_STD_REL * np.abs(means)] = 0.0
            safe = np.where(effective == 0.0, 1.0, effective)
            out = [np.where(effective == 0.0, 0.0, (blk - means) / safe) for blk in blocks]
            stds = effective
        else:
            out = [blk - means for blk in blocks]
        values = 2 * n * len(blocks)
        return PrepassResult(blocks=out, stats=ColumnStats(means=means, stds=stds), values_sent=values)

    m_rows = blocks[0].shape[0]
    for blk in blocks:
        if blk.shape[0] != m_rows:
            raise ValueError("vertical blocks must share the row count")
    out = []
    mean_parts = []
    std_parts = []
    for blk in blocks:
        normalized, stats = zscore_columns(blk) if scale else center_columns(blk)
        out.append(normalized.values)
        mean_parts.append(stats.means)
        std_parts.append(stats.stds)
    stats = ColumnStats(means=np.concatenate(mean_parts), stds=np.concatenate(std_parts))
    values = 2 * sum(blk.shape[1] for blk in blocks)
    return PrepassResult(blocks=out, stats=stats, values_sent=values)


@dataclass(frozen=True)
class ProtocolRun:
    """Transcript of one simulated protocol execution."""

    mode: str
    s: int
    r: int
    k: int
    normalize: str
    values_sent: int  # float payload values uplinked by the summaries
    prepass_values_sent: int  # statistics round, tracked separately
    gd_to_centralized: float
    scores: np.ndarray  # (m,) residual anomaly scores
    subspace: Subspace  # estimated k-dimensional principal subspace

    def to_json(self) -> str:
        """Deterministic JSON transcript (sorted keys, full precision)."""
        obj = {
            "mode": self.mode,
            "s": self.s,
            "r": self.r,
            "k": self.k,
            "normalize": self.normalize,
            "values_sent": self.values_sent,
            "prepass_values_sent": self.prepass_values_sent,
            "gd_to_centralized": self.gd_to_centralized,
            "scores": self.scores.tolist(),
            "basis": self.subspace.basis.tolist(),
        }
        return json.dumps(obj, sort_keys=True)


def _summarize_bytes(mode: str, blocks: list[np.ndarray], r: int, parallel: bool) -> list[bytes]:
    proto = horizontal if mode == "horizontal" else vertical

    def work(i: int) -> bytes:
        return proto.pack_summary(proto.local_summarize(blocks[i], r, monitor_id=i))

    if parallel:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            return list(pool.map(work, range(len(blocks))))
    return [work(i) for i in range(len(blocks))]


def centralized_reference(x_norm: np.ndarray, k: int) -> tuple[Subspace, np.ndarray]:
    """Top-k subspace and residual scores of the centralized pipeline."""
    model = fit_pca(x_norm)
    if k > model.components.shape[1]:
        raise ValueError(f"k={k} exceeds centralized rank {model.components.shape[1]}")
    sub = Subspace(model.components[:, :k].copy())
    return sub, residual_scores(x_norm, sub)


def run_protocol(
    m,
    mode: str,
    s: int,
    r: int,
    k: int,
    normalize: str = "center",
    parallel: bool = False,
) -> ProtocolRun:
    """Execute one full protocol round and compare against centralized PCA.

    Flow: partition -> statistics pre-pass -> per-monitor summaries
    (serialized; values counted from the byte buffers) -> fusion-center
    aggregation -> k-dimensional subspace -> residual scores. Horizontal
    monitors score their own rows against the broadcast basis; vertical
    scoring happens at the fusion center on its reconstruction. The
    centralized twin runs on the concatenation of the same normalized
    blocks, so the comparison isolates protocol loss from normalization.
    """
    x = as_matrix(m)
    _check_mode(mode)
    if normalize not in NORMALIZATIONS:
        raise InvalidConfigError(f"normalize must be one of {NORMALIZATIONS}, got {normalize!r}")
    parts = partition(x, mode, s)
    pre = center_prepass(split_blocks(x, parts), mode, scale=(normalize == "zscore"))
    blocks = pre.blocks

    bufs = _summarize_bytes(mode, blocks, r, parallel)
    if mode == "horizontal":
        header = horizontal.SUMMARY_HEADER.size
        summaries = [horizontal.unpack_summary(b) for b in bufs]
        agg = horizontal.aggregate(summaries)
        sub = horizontal.principal_subspace(agg, k)
        scores = np.concatenate([residual_scores(blk, sub) for blk in blocks])
        x_norm = np.vstack(blocks)
    else:
        header = vertical.SUMMARY_HEADER.size
        summaries = [vertical.unpack_summary(b) for b in bufs]
        agg = vertical.aggregate(summaries, k)
        sub = agg.subspace
        scores = vertical.residual_scores(agg)
        x_norm = np.hstack(blocks)
    values_sent = sum((len(b) - header) // 8 for b in bufs)

    central_sub, _ = centralized_reference(x_norm, k)
    gd = geodesic_distance(sub, central_sub)
    return ProtocolRun(
        mode=mode,
        s=s,
        r=r,
        k=k,
        normalize=normalize,
        values_sent=values_sent,
        prepass_values_sent=pre.values_sent,
        gd_to_centralized=gd,
        scores=scores,
        subspace=sub,
    )


def max_feasible_r(m, mode: str, s: int) -> int:
    """Largest r every monitor can honor under the block shapes."""
    x = as_matrix(m)
    parts = partition(x, mode, s)
    if mode == "horizontal":
        return min(min(parts.sizes), x.shape[1])
    return min(x.shape[0], min(parts.sizes))


@dataclass(frozen=True)
class MinRRow:
    """One sweep result: least r meeting the distance budget at this s."""

    mode: str
    s: int
    d_star: float
    r_star: int | None  # None: no feasible r met the budget
    gd: float | None  # distance achieved at r_star
    cost: float | None  # closed-form normalized cost at (s, r_star)


def sweep_min_r(
    m,
    mode: str,
    s_values,
    d_star: float,
    k: int,
    normalize: str = "center",
    parallel: bool = False,
) -> list[MinRRow]:
    """For each monitor count, scan r upward until the subspace estimate is
    within d_star of centralized.

    The scan starts at the smallest r that can produce a k-dimensional fused
    subspace, ceil(k / s), and ends at the largest r the blocks support. A
    monitor count with no qualifying r yields a row with r_star = None
    rather than an error, so sweeps over many s values survive hard cases.
    """
    x = as_matrix(m)
    if not d_star > 0:
        raise ValueError(f"d_star must be > 0, got {d_star}")
    rows = []
    cost_fn = commcost.horizontal_cost if mode == "horizontal" else commcost.vertical_cost
    for s in s_values:
        r_hi = max_feasible_r(x, mode, s)
        r_lo = max(1, math.ceil(k / s))
        found = None
        for r in range(r_lo, r_hi + 1):
            run = run_protocol(x, mode, s, r, k, normalize=normalize, parallel=parallel)
            if run.gd_to_centralized <= d_star:
                found = (r, run.gd_to_centralized)
                break
        if found is None:
            rows.append(MinRRow(mode=mode, s=s, d_star=d_star, r_star=None, gd=None, cost=None))
        else:
            r_star, gd = found
            rows.append(
                MinRRow(
                    mode=mode,
                    s=s,
                    d_star=d_star,
                    r_star=r_star,
                    gd=gd,
                    cost=cost_fn(s, r_star, x.shape[0], x.shape[1]),
                )
            )
    return rows
