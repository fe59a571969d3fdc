# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled kernels for the message-round, tree-elimination and
walk-enumeration inner loops. Mirrors ``_pure`` bit for bit."""

from libc.stdint cimport int64_t

import numpy as np

BACKEND = "compiled"


def bp_round(double[::1] diag, double[::1] pot, int64_t[::1] src,
             int64_t[::1] dst, int64_t[::1] rev, int64_t[::1] in_offsets,
             double[::1] coup, double[::1] msg_a, double[::1] msg_b,
             double floor):
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t m = src.shape[0]
    agg_a_arr = np.empty(m, dtype=np.float64)
    agg_b_arr = np.empty(m, dtype=np.float64)
    new_a_arr = np.empty(m, dtype=np.float64)
    new_b_arr = np.empty(m, dtype=np.float64)
    t_a_arr = np.empty(n, dtype=np.float64)
    t_b_arr = np.empty(n, dtype=np.float64)
    s_a_arr = np.zeros(n, dtype=np.float64)
    s_b_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] agg_a = agg_a_arr
    cdef double[::1] agg_b = agg_b_arr
    cdef double[::1] new_a = new_a_arr
    cdef double[::1] new_b = new_b_arr
    cdef double[::1] t_a = t_a_arr
    cdef double[::1] t_b = t_b_arr
    cdef double[::1] s_a = s_a_arr
    cdef double[::1] s_b = s_b_arr
    cdef Py_ssize_t d, i
    cdef Py_ssize_t first_bad = -1
    cdef double aa, ab, c
    # per-node totals; sequential adds in edge order = ascending source per node
    for d in range(m):
        s_a[dst[d]] += msg_a[d]
        s_b[dst[d]] += msg_b[d]
    for i in range(n):
        t_a[i] = diag[i] + s_a[i]
        t_b[i] = pot[i] + s_b[i]
    for d in range(m):
        aa = t_a[src[d]] - msg_a[rev[d]]
        ab = t_b[src[d]] - msg_b[rev[d]]
        agg_a[d] = aa
        agg_b[d] = ab
        if first_bad < 0 and aa <= floor:
            first_bad = d
        c = coup[d]
        new_a[d] = -(c * c) / aa
        new_b[d] = -(c * ab) / aa
    return agg_a_arr, agg_b_arr, new_a_arr, new_b_arr, first_bad


def tree_marginals(double[::1] diag, double[::1] pot, int64_t[::1] parent,
                   double[::1] cpar, int64_t[::1] layer_offsets, double ptol):
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t nlayers = layer_offsets.shape[0] - 1
    ua_arr = np.array(diag, dtype=np.float64, copy=True)
    ub_arr = np.array(pot, dtype=np.float64, copy=True)
    ma_arr = np.zeros(n, dtype=np.float64)
    mb_arr = np.zeros(n, dtype=np.float64)
    da_arr = np.zeros(n, dtype=np.float64)
    db_arr = np.zeros(n, dtype=np.float64)
    s_a_arr = np.zeros(n, dtype=np.float64)
    s_b_arr = np.zeros(n, dtype=np.float64)
    zeros_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] ua = ua_arr
    cdef double[::1] ub = ub_arr
    cdef double[::1] ma = ma_arr
    cdef double[::1] mb = mb_arr
    cdef double[::1] da = da_arr
    cdef double[::1] db = db_arr
    cdef double[::1] s_a = s_a_arr
    cdef double[::1] s_b = s_b_arr
    cdef Py_ssize_t lay, lo, hi, plo, t, p
    cdef double piv, c, fa, fb, ea, eb
    for lay in range(nlayers - 1, 0, -1):
        lo = layer_offsets[lay]
        hi = layer_offsets[lay + 1]
        plo = layer_offsets[lay - 1]
        for t in range(lo, hi):
            if ua[t] <= ptol:
                return zeros_arr, zeros_arr, t
        for t in range(lo, hi):
            piv = ua[t]
            c = cpar[t]
            ma[t] = -(c * c) / piv
            mb[t] = -(c * ub[t]) / piv
        for p in range(plo, lo):
            s_a[p] = 0.0
            s_b[p] = 0.0
        for t in range(lo, hi):
            s_a[parent[t]] += ma[t]
            s_b[parent[t]] += mb[t]
        for p in range(plo, lo):
            ua[p] = ua[p] + s_a[p]
            ub[p] = ub[p] + s_b[p]
    for lay in range(1, nlayers):
        lo = layer_offsets[lay]
        hi = layer_offsets[lay + 1]
        for t in range(lo, hi):
            p = parent[t]
            fa = ua[p] + da[p]
            fb = ub[p] + db[p]
            ea = fa - ma[t]
            if ea <= ptol:
                return zeros_arr, zeros_arr, t
            eb = fb - mb[t]
            c = cpar[t]
            da[t] = -(c * c) / ea
            db[t] = -(c * eb) / ea
    mean_arr = np.empty(n, dtype=np.float64)
    var_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] mean = mean_arr
    cdef double[::1] var = var_arr
    cdef double prec
    for t in range(n):
        prec = ua[t] + da[t]
        if prec <= ptol:
            return zeros_arr, zeros_arr, t
        mean[t] = (ub[t] + db[t]) / prec
        var[t] = 1.0 / prec
    return mean_arr, var_arr, -1


def walk_weight_sums(int64_t[::1] indptr, int64_t[::1] indices,
                     double[::1] weights, Py_ssize_t source,
                     Py_ssize_t max_len):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.zeros((max_len + 1, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    nodes_arr = np.empty(max_len + 1, dtype=np.int64)
    cur_arr = np.empty(max_len + 1, dtype=np.int64)
    prods_arr = np.empty(max_len + 1, dtype=np.float64)
    cdef int64_t[::1] nodes = nodes_arr
    cdef int64_t[::1] cur = cur_arr
    cdef double[::1] prods = prods_arr
    cdef Py_ssize_t depth = 0
    cdef Py_ssize_t e
    cdef int64_t v
    cdef double p
    nodes[0] = source
    prods[0] = 1.0
    cur[0] = indptr[source]
    out[0, source] += 1.0
    # iterative preorder DFS; pop order matches the recursive fallback
    while depth >= 0:
        if depth < max_len and cur[depth] < indptr[nodes[depth] + 1]:
            e = cur[depth]
            cur[depth] += 1
            v = indices[e]
            p = prods[depth] * weights[e]
            depth += 1
            nodes[depth] = v
            prods[depth] = p
            cur[depth] = indptr[v]
            out[depth, v] += p
        else:
            depth -= 1
    return out_arr
