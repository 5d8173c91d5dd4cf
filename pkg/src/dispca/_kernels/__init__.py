"""Histogram-aggregation kernels with a compiled fast path.

At import the package picks the Cython extension when it built successfully
and the environment variable DISPCA_PURE_KERNELS is not set truthy; otherwise
it falls back to the numpy implementation in pure.py. Both expose the same
aggregate_bins contract; benchmarks/bench_kernels.py compares them.
"""

from __future__ import annotations

import os

from . import pure

_impl = pure
_backend = "pure"

if os.environ.get("DISPCA_PURE_KERNELS", "").strip().lower() not in ("1", "true", "yes"):
    try:
        from . import _aggregate as _compiled  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        _impl = _compiled
        _backend = "compiled"


def backend() -> str:
    """Name of the active implementation: "compiled" or "pure"."""
    return _backend


def aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols):
    """Per-bin histogram features; see pure.aggregate_bins for the contract."""
    return _impl.aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols)
