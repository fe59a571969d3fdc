"""Pure NumPy implementations of the hot kernels.

These mirror the compiled extension in ``_speedups.pyx`` operation for
operation: reductions use the same accumulation order (``np.bincount``
adds sequentially in array order, matching the compiled loops), so both
backends produce bitwise-identical results.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def bp_round(diag, pot, src, dst, rev, in_offsets, coup, msg_a, msg_b, floor):
    """One synchronous message round over all directed edges.

    Directed edges must be sorted by (dst, src). ``rev[d]`` indexes the
    opposite direction of edge ``d``. Returns new per-edge aggregates and
    message coefficients plus the first edge whose aggregate precision fell
    to or below ``floor`` (-1 when healthy).
    """
    n = diag.shape[0]
    s_a = np.bincount(dst, weights=msg_a, minlength=n)
    s_b = np.bincount(dst, weights=msg_b, minlength=n)
    t_a = diag + s_a
    t_b = pot + s_b
    agg_a = t_a[src] - msg_a[rev]
    agg_b = t_b[src] - msg_b[rev]
    bad = np.flatnonzero(agg_a <= floor)
    first_bad = int(bad[0]) if bad.size else -1
    with np.errstate(divide="ignore", invalid="ignore"):
        new_a = -(coup * coup) / agg_a
        new_b = -(coup * agg_b) / agg_a
    return agg_a, agg_b, new_a, new_b, first_bad


def tree_marginals(diag, pot, parent, cpar, layer_offsets, ptol):
    """Exact marginal means/variances on a tree by a two-pass elimination.

    Nodes must be ordered so that layers (BFS depths) are contiguous and
    every node's parent sits in the previous layer; ``parent`` holds node
    indices in that order (-1 for roots) and ``cpar`` the coupling to the
    parent. Returns (mean, var, bad_node) where bad_node is the first node
    whose elimination pivot fell to or below ``ptol`` (-1 when healthy).
    """
    n = diag.shape[0]
    nlayers = layer_offsets.shape[0] - 1
    ua = diag.copy()
    ub = pot.copy()
    ma = np.zeros(n)
    mb = np.zeros(n)
    zeros = np.zeros(n)
    for lay in range(nlayers - 1, 0, -1):
        lo = int(layer_offsets[lay])
        hi = int(layer_offsets[lay + 1])
        piv = ua[lo:hi]
        bad = np.flatnonzero(piv <= ptol)
        if bad.size:
            return zeros, zeros, lo + int(bad[0])
        c = cpar[lo:hi]
        ma[lo:hi] = -(c * c) / piv
        mb[lo:hi] = -(c * ub[lo:hi]) / piv
        plo = int(layer_offsets[lay - 1])
        sa = np.bincount(parent[lo:hi] - plo, weights=ma[lo:hi], minlength=lo - plo)
        sb = np.bincount(parent[lo:hi] - plo, weights=mb[lo:hi], minlength=lo - plo)
        ua[plo:lo] = ua[plo:lo] + sa
        ub[plo:lo] = ub[plo:lo] + sb
    da = np.zeros(n)
    db = np.zeros(n)
    for lay in range(1, nlayers):
        lo = int(layer_offsets[lay])
        hi = int(layer_offsets[lay + 1])
        p = parent[lo:hi]
        fa = ua[p] + da[p]
        fb = ub[p] + db[p]
        ea = fa - ma[lo:hi]
        eb = fb - mb[lo:hi]
        bad = np.flatnonzero(ea <= ptol)
        if bad.size:
            return zeros, zeros, lo + int(bad[0])
        c = cpar[lo:hi]
        da[lo:hi] = -(c * c) / ea
        db[lo:hi] = -(c * eb) / ea
    prec = ua + da
    bad = np.flatnonzero(prec <= ptol)
    if bad.size:
        return zeros, zeros, int(bad[0])
    mean = (ub + db) / prec
    var = 1.0 / prec
    return mean, var, -1


def walk_weight_sums(indptr, indices, weights, source, max_len):
    """Walk-weight sums by explicit depth-first enumeration.

    Returns an array S of shape (max_len + 1, n) with S[l, j] equal to the
    sum of the weight products of all length-l walks from ``source`` to j.
    Walks are visited in preorder with neighbors ascending; this is the
    enumeration oracle, independent of any matrix-power computation.
    """
    n = indptr.shape[0] - 1
    sums = [[0.0] * n for _ in range(max_len + 1)]
    ip = indptr.tolist()
    nbr = indices.tolist()
    wts = weights.tolist()

    def visit(node, depth, prod):
        row = sums[depth]
        row[node] += prod
        if depth == max_len:
            return
        nxt = depth + 1
        for e in range(ip[node], ip[node + 1]):
            visit(nbr[e], nxt, prod * wts[e])

    visit(int(source), 0, 1.0)
    return np.array(sums, dtype=np.float64)
