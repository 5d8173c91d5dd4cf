# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled histogram-aggregation kernel.

Counting-sorts the queries by bin, then counts each bin's domain runs with a
reusable counter table: no comparison sort of the full key array and no
gather through a permutation, just sequential passes. Runs are folded into
the per-bin sums in ascending (bin, domain) key order, the same order the
numpy fallback uses, so the floating-point outputs agree to the last ulp.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log2
from libc.stdlib cimport qsort

cnp.import_array()


cdef int _cmp_int64(const void* a, const void* b) noexcept nogil:
    cdef cnp.int64_t x = (<const cnp.int64_t*> a)[0]
    cdef cnp.int64_t y = (<const cnp.int64_t*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def aggregate_bins(bin_idx, dom_idx, n_bins, col_of_domain, n_cols):
    """Same contract as dispca._kernels.pure.aggregate_bins."""
    cdef cnp.int64_t[::1] b = np.ascontiguousarray(bin_idx, dtype=np.int64)
    cdef cnp.int64_t[::1] d = np.ascontiguousarray(dom_idx, dtype=np.int64)
    cdef cnp.int64_t[::1] col = np.ascontiguousarray(col_of_domain, dtype=np.int64)
    cdef Py_ssize_t nb = n_bins
    cdef Py_ssize_t nc = n_cols
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t n_dom = col.shape[0]
    if d.shape[0] != n:
        raise ValueError(f"bin_idx ({n}) and dom_idx ({d.shape[0]}) lengths differ")
    if nb < 1:
        raise ValueError(f"n_bins must be >= 1, got {nb}")
    if nc < 1:
        raise ValueError(f"n_cols must be >= 1, got {nc}")

    cdef Py_ssize_t i
    for i in range(n):
        if b[i] < 0 or b[i] >= nb:
            raise ValueError("bin_idx out of range")
        if d[i] < 0 or d[i] >= n_dom:
            raise ValueError("dom_idx out of range")
    for i in range(n_dom):
        if col[i] >= nc:
            raise ValueError("col_of_domain exceeds n_cols")

    counts_arr = np.zeros((nb, nc), dtype=np.float64)
    totals_arr = np.zeros(nb, dtype=np.int64)
    sumsq_arr = np.zeros(nb, dtype=np.float64)
    plog_arr = np.zeros(nb, dtype=np.float64)
    retained_arr = np.zeros(nb, dtype=np.int64)
    cdef double[:, ::1] counts = counts_arr
    cdef cnp.int64_t[::1] totals = totals_arr
    cdef double[::1] sumsq = sumsq_arr
    cdef double[::1] plog = plog_arr
    cdef cnp.int64_t[::1] retained = retained_arr

    # segment boundaries: seg[bi] .. seg[bi+1] will hold bin bi's queries
    cdef cnp.int64_t[::1] seg = np.zeros(nb + 1, dtype=np.int64)
    for i in range(n):
        seg[b[i] + 1] += 1
    for i in range(nb):
        seg[i + 1] += seg[i]

    # stable scatter of each query's domain id into its bin's segment
    cdef cnp.int64_t[::1] by_bin = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] fill = np.empty(nb, dtype=np.int64)
    cdef Py_ssize_t bi
    for i in range(nb):
        fill[i] = seg[i]
    for i in range(n):
        bi = <Py_ssize_t> b[i]
        by_bin[fill[bi]] = d[i]
        fill[bi] += 1

    # per bin: tally each domain's run, then emit runs in ascending domain
    # order so the accumulation order matches the numpy fallback exactly
    cdef cnp.int64_t[::1] dom_count = np.zeros(n_dom, dtype=np.int64)
    cdef cnp.int64_t[::1] touched = np.empty(n_dom, dtype=np.int64)
    cdef Py_ssize_t t, p, start, stop, ci
    cdef cnp.int64_t di, run_length
    cdef double run
    for bi in range(nb):
        start = <Py_ssize_t> seg[bi]
        stop = <Py_ssize_t> seg[bi + 1]
        if start == stop:
            continue
        totals[bi] = stop - start
        t = 0
        for p in range(start, stop):
            di = by_bin[p]
            if dom_count[di] == 0:
                touched[t] = di
                t += 1
            dom_count[di] += 1
        if t > 1:
            qsort(&touched[0], t, sizeof(cnp.int64_t), _cmp_int64)
        for p in range(t):
            di = touched[p]
            run_length = dom_count[di]
            dom_count[di] = 0
            run = <double> run_length
            sumsq[bi] += run * run
            plog[bi] += run * log2(run)
            ci = <Py_ssize_t> col[di]
            if ci >= 0:
                counts[bi, ci] = run
                retained[bi] += run_length

    norms_arr = np.sqrt(sumsq_arr)
    entropies_arr = np.zeros(nb, dtype=np.float64)
    nz = totals_arr > 0
    entropies_arr[nz] = np.log2(totals_arr[nz].astype(np.float64)) - plog_arr[nz] / totals_arr[nz]
    np.maximum(entropies_arr, 0.0, out=entropies_arr)
    return counts_arr, totals_arr, norms_arr, entropies_arr, retained_arr
