"""Ground-truth solver: means and marginal variances by direct elimination.

The dense path runs an unpivoted LDL^T factorization (valid because the
matrices of interest are positive definite) and reports indefiniteness the
moment a pivot falls below a scaled threshold. Tree-structured models get
a linear-time two-pass elimination that scales to the large unwrapped
trees produced by :mod:`gbp.ctree`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import _kernels
from .errors import NotATree, NotPositiveDefinite
from .model import GaussianModel

__all__ = ["ExactSolution", "solve", "solve_tree", "DENSE_LIMIT"]

DENSE_LIMIT = 2000
_PIVOT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ExactSolution:
    """Exact marginals: mean vector, per-node variances, optional full
    covariance (dense models only)."""

    mean: np.ndarray
    marginal_variances: np.ndarray
    full_covariance: np.ndarray | None = None


def _pivot_tol(model: GaussianModel) -> float:
    return _PIVOT_RTOL * float(np.max(model.diag)) if model.n else 0.0


def _ldl(a: np.ndarray, ptol: float):
    """Unpivoted LDL^T of a symmetric matrix; raises on pivot <= ptol."""
    n = a.shape[0]
    work = a.copy()
    lower = np.zeros((n, n))
    d = np.empty(n)
    for k in range(n):
        piv = work[k, k]
        if piv <= ptol:
            raise NotPositiveDefinite(
                f"nonpositive pivot {piv:.3e} at node {k + 1}", node=k + 1, pivot=float(piv)
            )
        d[k] = piv
        col = work[k + 1 :, k] / piv
        lower[k + 1 :, k] = col
        work[k + 1 :, k + 1 :] -= np.outer(col, work[k + 1 :, k])
    np.fill_diagonal(lower, 1.0)
    return lower, d


def _solve_dense(model: GaussianModel, want_full: bool) -> ExactSolution:
    a = model.to_dense()
    lower, d = _ldl(a, _pivot_tol(model))
    z = sla.solve_triangular(lower, model.potentials, lower=True, unit_diagonal=True)
    mean = sla.solve_triangular(lower.T, z / d, lower=False, unit_diagonal=True)
    zi = sla.solve_triangular(lower, np.eye(model.n), lower=True, unit_diagonal=True)
    cov = sla.solve_triangular(lower.T, zi / d[:, None], lower=False, unit_diagonal=True)
    variances = cov.diagonal().copy()
    return ExactSolution(mean, variances, cov if want_full else None)


def _solve_sparse(model: GaussianModel) -> ExactSolution:
    # Beyond the dense limit: LU factorization, variances column by column.
    # Indefiniteness is detected after the fact from the computed variances.
    import scipy.sparse.linalg as spla

    a = model.to_sparse().tocsc()
    try:
        lu = spla.splu(a)
    except RuntimeError as exc:
        raise NotPositiveDefinite(f"sparse factorization failed: {exc}") from None
    mean = lu.solve(model.potentials)
    n = model.n
    variances = np.empty(n)
    chunk = 256
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        rhs = np.zeros((n, stop - start))
        rhs[np.arange(start, stop), np.arange(stop - start)] = 1.0
        cols = lu.solve(rhs)
        variances[start:stop] = cols[np.arange(start, stop), np.arange(stop - start)]
    if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(variances)):
        raise NotPositiveDefinite("sparse factorization produced non-finite values")
    if np.any(variances <= 0):
        bad = int(np.flatnonzero(variances <= 0)[0])
        raise NotPositiveDefinite(
            f"nonpositive marginal variance at node {bad + 1}", node=bad + 1
        )
    return ExactSolution(mean, variances, None)


def solve(
    model: GaussianModel, want_full_covariance: bool = False, dense_limit: int = DENSE_LIMIT
) -> ExactSolution:
    """Compute mean = A^-1 b and the marginal variances diag(A^-1).

    Full covariance is included only when requested and n <= dense_limit.
    Raises NotPositiveDefinite when elimination hits a nonpositive pivot.
    """
    if model.n <= dense_limit:
        return _solve_dense(model, want_full_covariance)
    return _solve_sparse(model)


def tree_structure(model: GaussianModel):
    """BFS structure of an acyclic model, vectorized level by level.

    Returns (order, parent, cpar, layer_offsets): ``order`` lists node
    indices sorted by BFS depth (ties by id), ``parent``/``cpar`` give each
    ordered node's parent position and coupling, and ``layer_offsets``
    delimit the depth layers. Raises NotATree when a cycle is found.
    """
    n = model.n
    indptr, indices, coup = model._csr
    visited = np.zeros(n, dtype=bool)
    depth = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    cpar = np.zeros(n)
    for root in range(n):
        if visited[root]:
            continue
        visited[root] = True
        depth[root] = 0
        frontier = np.array([root], dtype=np.int64)
        level = 0
        while frontier.size:
            cnt = indptr[frontier + 1] - indptr[frontier]
            tot = int(cnt.sum())
            if tot == 0:
                break
            starts = np.repeat(indptr[frontier], cnt)
            offsets = np.arange(tot, dtype=np.int64) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            flat = starts + offsets
            nb = indices[flat]
            w = coup[flat]
            owner = np.repeat(frontier, cnt)
            keep = nb != parent[owner]
            nb, w, owner = nb[keep], w[keep], owner[keep]
            if nb.size == 0:
                break
            if np.any(visited[nb]):
                raise NotATree("graph contains a cycle")
            uniq = np.unique(nb)
            if uniq.size != nb.size:
                raise NotATree("graph contains a cycle")
            visited[nb] = True
            parent[nb] = owner
            cpar[nb] = w
            level += 1
            depth[nb] = level
            frontier = uniq
    order = np.argsort(depth, kind="stable").astype(np.int64)
    counts = np.bincount(depth)
    layer_offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n, dtype=np.int64)
    par_ordered = parent[order]
    par_ordered = np.where(par_ordered >= 0, pos[np.maximum(par_ordered, 0)], -1)
    return order, par_ordered.astype(np.int64), cpar[order], layer_offsets


def solve_tree(model: GaussianModel) -> ExactSolution:
    """Exact marginals on an acyclic model by leaf-to-root elimination.

    Same contract as :func:`solve`; linear time and memory, so it scales to
    unwrapped computation trees. Raises NotATree on cyclic input.
    """
    order, parent, cpar, layer_offsets = tree_structure(model)
    mean_o, var_o, bad = _kernels.tree_marginals(
        model.diag[order], model.potentials[order], parent, cpar, layer_offsets, _pivot_tol(model)
    )
    if bad >= 0:
        node = int(order[bad]) + 1
        raise NotPositiveDefinite(f"nonpositive pivot at node {node}", node=node)
    mean = np.empty(model.n)
    var = np.empty(model.n)
    mean[order] = mean_o
    var[order] = var_o
    return ExactSolution(mean, var, None)
