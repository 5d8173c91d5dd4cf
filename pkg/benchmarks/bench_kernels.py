"""Benchmark the compiled histogram-aggregation kernel against the numpy
fallback, plus the end-to-end matrix build that sits on top of them.

Run: python benchmarks/bench_kernels.py [--pairs 4000000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dispca._kernels import backend, pure

try:
    from dispca._kernels import _aggregate as compiled
except ImportError:
    compiled = None

from dispca.ingest import build_histogram_matrix
from dispca.synth import SynthConfig, synth_traffic


def _timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(pairs: int, repeat: int) -> None:
    rng = np.random.default_rng(0)
    n_bins = 2000
    n_dom = 5000
    n_cols = 300
    bin_idx = rng.integers(0, n_bins, size=pairs)
    # zipf-ish domain skew, like real traffic
    dom_idx = np.minimum((rng.pareto(1.1, size=pairs)).astype(np.int64), n_dom - 1)
    col_of_domain = np.full(n_dom, -1, dtype=np.int64)
    col_of_domain[:n_cols] = np.arange(n_cols)

    t_pure = _timeit(lambda: pure.aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols), repeat)
    print(f"aggregate_bins[pure]     {pairs:>9d} pairs: {t_pure * 1e3:8.1f} ms")
    if compiled is None:
        print("aggregate_bins[compiled] unavailable (extension not built)")
        return
    t_comp = _timeit(
        lambda: compiled.aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols), repeat
    )
    print(f"aggregate_bins[compiled] {pairs:>9d} pairs: {t_comp * 1e3:8.1f} ms")
    print(f"speedup: {t_pure / t_comp:.2f}x")

    out_p = pure.aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols)
    out_c = compiled.aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols)
    for a, b, name in zip(out_p, out_c, ("counts", "totals", "norms", "entropies", "retained")):
        if not np.allclose(a, b, rtol=1e-12, atol=0):
            raise AssertionError(f"backends disagree on {name}")
    print("backends agree on all outputs")


def bench_pipeline(repeat: int) -> None:
    cfg = SynthConfig(duration_seconds=600, rate=800.0, n_domains=400, latent_factors=4,
                      factor_strength=0.5, seed=3)
    records, _ = synth_traffic(cfg)
    t = _timeit(lambda: build_histogram_matrix(records, top_k=300), repeat)
    print(f"build_histogram_matrix   {len(records):>9d} records: {t * 1e3:8.1f} ms "
          f"(active backend: {backend()})")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=4_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    bench_kernel(args.pairs, args.repeat)
    bench_pipeline(args.repeat)


if __name__ == "__main__":
    main()
