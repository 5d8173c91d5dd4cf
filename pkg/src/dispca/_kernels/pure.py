"""Reference histogram-aggregation kernel in plain numpy.

This is the fallback the package selects when the compiled extension is
unavailable (or when DISPCA_PURE_KERNELS forces it). Both implementations
accumulate per-bin sums over (bin, domain) keys in ascending key order, so
their floating-point results agree to the last ulp of the log2 they call.
"""

from __future__ import annotations

import numpy as np


def _validate(bin_idx, dom_idx, n_bins, col_of_domain, n_cols):
    b = np.ascontiguousarray(bin_idx, dtype=np.int64)
    d = np.ascontiguousarray(dom_idx, dtype=np.int64)
    col = np.ascontiguousarray(col_of_domain, dtype=np.int64)
    if b.ndim != 1 or d.ndim != 1 or col.ndim != 1:
        raise ValueError("bin_idx, dom_idx, col_of_domain must be 1-D")
    if b.shape[0] != d.shape[0]:
        raise ValueError(f"bin_idx ({b.shape[0]}) and dom_idx ({d.shape[0]}) lengths differ")
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    if n_cols < 1:
        raise ValueError(f"n_cols must be >= 1, got {n_cols}")
    if b.size:
        if b.min() < 0 or b.max() >= n_bins:
            raise ValueError("bin_idx out of range")
        if d.min() < 0 or d.max() >= col.shape[0]:
            raise ValueError("dom_idx out of range")
    if col.size and col.max() >= n_cols:
        raise ValueError("col_of_domain exceeds n_cols")
    return b, d, col


def aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols):
    """Aggregate one-query-per-entry (bin, domain) pairs into per-bin features.

    Args:
      bin_idx: int64 (N,) bin index of each query, in [0, n_bins).
      dom_idx: int64 (N,) domain index of each query, in [0, D).
      n_bins: number of time bins.
      col_of_domain: int64 (D,) matrix column for each domain, -1 if the
        domain is not retained.
      n_cols: number of retained matrix columns.

    Returns:
      counts: float64 (n_bins, n_cols) query counts for retained domains.
      totals: int64 (n_bins,) total queries per bin over ALL domains.
      norms: float64 (n_bins,) Euclidean norm of the full per-domain
        count vector of each bin.
      entropies: float64 (n_bins,) Shannon entropy in bits of the full
        per-domain distribution of each bin; 0 for empty bins.
      retained: int64 (n_bins,) queries per bin landing in retained domains.
    """
    b, d, col = _validate(bin_idx, dom_idx, n_bins, col_of_domain, n_cols)
    n_dom = col.shape[0]

    key = b * n_dom + d
    uniq, cnt = np.unique(key, return_counts=True)
    ub = (uniq // n_dom).astype(np.int64)
    c = cnt.astype(np.float64)

    totals = np.bincount(b, minlength=n_bins).astype(np.int64)
    sumsq = np.bincount(ub, weights=c * c, minlength=n_bins)
    plog = np.bincount(ub, weights=c * np.log2(c), minlength=n_bins)
    norms = np.sqrt(sumsq)
    entropies = np.zeros(n_bins, dtype=np.float64)
    nz = totals > 0
    entropies[nz] = np.log2(totals[nz].astype(np.float64)) - plog[nz] / totals[nz]
    np.maximum(entropies, 0.0, out=entropies)

    cols = col[(uniq % n_dom).astype(np.int64)]
    mask = cols >= 0
    counts = np.zeros((n_bins, n_cols), dtype=np.float64)
    counts[ub[mask], cols[mask]] = c[mask]
    retained = np.zeros(n_bins, dtype=np.int64)
    np.add.at(retained, ub[mask], cnt[mask])
    return counts, totals, norms, entropies, retained
