"""Gaussian graphical models in information form.

A model pairs a sparse symmetric information matrix A with a potential
vector b over an undirected graph: one stored coupling per unordered edge
serves both a_ij and a_ji. Node ids are 1-based on every public surface
(files, CLI, walk/tree operations); array indices are private.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonpositiveDiagonal, ParseError, ValidationError

__all__ = [
    "GaussianModel",
    "NormalizedModel",
    "validate",
    "normalize",
    "load_model",
    "loads_model",
    "save_model",
    "dumps_model",
]


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Information-form model: per-node a_ii and b_i plus edge couplings.

    ``edge_i``/``edge_j``/``edge_a`` hold one row per unordered edge with
    i < j in canonical (i, j) order. Instances are immutable after
    construction and safe to share across threads.
    """

    diag: np.ndarray
    potentials: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", _freeze(np.asarray(self.diag, dtype=np.float64)))
        object.__setattr__(
            self, "potentials", _freeze(np.asarray(self.potentials, dtype=np.float64))
        )
        object.__setattr__(self, "edge_i", _freeze(np.asarray(self.edge_i, dtype=np.int64)))
        object.__setattr__(self, "edge_j", _freeze(np.asarray(self.edge_j, dtype=np.int64)))
        object.__setattr__(self, "edge_a", _freeze(np.asarray(self.edge_a, dtype=np.float64)))
        if self.diag.shape != self.potentials.shape:
            raise ValueError("diag and potentials must have the same length")
        if not (self.edge_i.shape == self.edge_j.shape == self.edge_a.shape):
            raise ValueError("edge arrays must have the same length")

    @classmethod
    def make(cls, diag, potentials, edges=()) -> "GaussianModel":
        """Build from per-node arrays and (i, j, a) triples; edges are
        canonicalized to i < j and sorted."""
        triples = [(int(i), int(j), float(a)) for i, j, a in edges]
        ei = np.array([min(i, j) if i != j else i for i, j, _ in triples], dtype=np.int64)
        ej = np.array([max(i, j) for i, j, _ in triples], dtype=np.int64)
        ea = np.array([a for _, _, a in triples], dtype=np.float64)
        return cls.from_arrays(diag, potentials, ei, ej, ea)

    @classmethod
    def from_arrays(cls, diag, potentials, edge_i, edge_j, edge_a) -> "GaussianModel":
        """Build from edge arrays, swapping and sorting into canonical order."""
        ei = np.asarray(edge_i, dtype=np.int64)
        ej = np.asarray(edge_j, dtype=np.int64)
        ea = np.asarray(edge_a, dtype=np.float64)
        swap = ei > ej
        if np.any(swap):
            ei, ej = np.where(swap, ej, ei), np.where(swap, ei, ej)
        order = np.lexsort((ej, ei))
        return cls(
            diag=np.asarray(diag, dtype=np.float64).copy(),
            potentials=np.asarray(potentials, dtype=np.float64).copy(),
            edge_i=ei[order],
            edge_j=ej[order],
            edge_a=ea[order],
        )

    @property
    def n(self) -> int:
        return int(self.diag.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.edge_i.shape[0])

    def edges(self):
        """Iterate (i, j, a) triples with 1-based ids, i < j."""
        for i, j, a in zip(self.edge_i, self.edge_j, self.edge_a):
            yield int(i), int(j), float(a)

    @cached_property
    def _csr(self):
        """Symmetric adjacency as (indptr, indices, couplings), neighbors
        ascending within each row; all indices 0-based."""
        n = self.n
        ei = self.edge_i - 1
        ej = self.edge_j - 1
        src = np.concatenate([ei, ej])
        dst = np.concatenate([ej, ei])
        w = np.concatenate([self.edge_a, self.edge_a])
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        indptr = np.searchsorted(src, np.arange(n + 1, dtype=np.int64)).astype(np.int64)
        return indptr, dst.astype(np.int64), w

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Sorted neighbor ids of node i (1-based)."""
        indptr, indices, _ = self._csr
        return tuple(int(v) + 1 for v in indices[indptr[i - 1] : indptr[i]])

    def degree(self, i: int) -> int:
        indptr, _, _ = self._csr
        return int(indptr[i] - indptr[i - 1])

    def to_dense(self) -> np.ndarray:
        """Dense information matrix A (for desk-scale oracles only)."""
        n = self.n
        a = np.zeros((n, n))
        a[np.arange(n), np.arange(n)] = self.diag
        ei = self.edge_i - 1
        ej = self.edge_j - 1
        a[ei, ej] = self.edge_a
        a[ej, ei] = self.edge_a
        return a

    def to_sparse(self):
        """Information matrix A in scipy CSR form."""
        import scipy.sparse as sp

        n = self.n
        ei = self.edge_i - 1
        ej = self.edge_j - 1
        rows = np.concatenate([np.arange(n, dtype=np.int64), ei, ej])
        cols = np.concatenate([np.arange(n, dtype=np.int64), ej, ei])
        vals = np.concatenate([self.diag, self.edge_a, self.edge_a])
        return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _freeze(a: np.ndarray) -> np.ndarray:
    a = a.copy() if not a.flags.owndata else a
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class NormalizedModel:
    """A model congruence-scaled to unit diagonal.

    ``base`` has a_ii = 1 exactly; ``scale`` records the original diagonal
    so estimates on the base model map back through
    mean_i / sqrt(scale_i) and var_i / scale_i.
    """

    base: GaussianModel
    scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scale", _freeze(np.asarray(self.scale, dtype=np.float64)))

    def denormalize_mean(self, mean) -> np.ndarray:
        return np.asarray(mean, dtype=np.float64) / np.sqrt(self.scale)

    def denormalize_variance(self, var) -> np.ndarray:
        return np.asarray(var, dtype=np.float64) / self.scale


def validate(model: GaussianModel) -> list[str]:
    """Return every violated model invariant; an empty list means valid.

    Diagnostic only: never raises, so malformed models can be inspected.
    """
    report: list[str] = []
    n = model.n
    if n < 1:
        report.append("node count must be positive")
    for idx in np.flatnonzero(~np.isfinite(model.diag)):
        report.append(f"non-finite diagonal at node {idx + 1}")
    finite_diag = np.isfinite(model.diag)
    for idx in np.flatnonzero(finite_diag & (model.diag <= 0)):
        report.append(f"nonpositive diagonal at node {idx + 1}")
    for idx in np.flatnonzero(~np.isfinite(model.potentials)):
        report.append(f"non-finite potential at node {idx + 1}")
    seen: set[tuple[int, int]] = set()
    for i, j, a in model.edges():
        lo, hi = (i, j) if i <= j else (j, i)
        if i == j:
            report.append(f"self-loop at node {i}")
            continue
        if lo < 1 or hi > n:
            report.append(f"edge {{{lo},{hi}}} out of range")
            continue
        if (lo, hi) in seen:
            report.append(f"duplicate edge {{{lo},{hi}}}")
            continue
        seen.add((lo, hi))
        if not math.isfinite(a):
            report.append(f"non-finite coupling on edge {{{lo},{hi}}}")
        elif a == 0.0:
            report.append(f"zero coupling on edge {{{lo},{hi}}}")
    return report


def normalize(model: GaussianModel) -> NormalizedModel:
    """Rescale to unit diagonal: couplings become a_ij / sqrt(a_ii a_jj),
    potentials b_i / sqrt(a_ii). Raises NonpositiveDiagonal if any a_ii <= 0."""
    bad = np.flatnonzero(~(model.diag > 0))
    if bad.size:
        raise NonpositiveDiagonal(f"nonpositive diagonal at node {int(bad[0]) + 1}")
    s = np.sqrt(model.diag)
    coup = model.edge_a / (s[model.edge_i - 1] * s[model.edge_j - 1])
    base = GaussianModel(
        diag=np.ones(model.n),
        potentials=model.potentials / s,
        edge_i=model.edge_i.copy(),
        edge_j=model.edge_j.copy(),
        edge_a=coup,
    )
    return NormalizedModel(base=base, scale=model.diag.copy())


# ---------------------------------------------------------------------------
# On-disk format: canonical JSON
#
# {
#   "nodes": [ {"id": 1, "a": 1.0, "b": 1.0}, ... ],
#   "edges": [ {"i": 1, "j": 2, "a": -0.2}, ... ]
# }
#
# ids contiguous 1..n ascending; edges require i < j; numbers are decimal
# literals. Writers emit exactly this shape with keys in this order, so a
# save/load round trip is the identity for all finite values.
# ---------------------------------------------------------------------------

_NODE_KEYS = ("id", "a", "b")
_EDGE_KEYS = ("i", "j", "a")


def _reject_nonfinite(token):
    raise ParseError(f"non-finite number literal {token!r} is not allowed")


def _require_number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number")
    return float(value)


def _require_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer")
    return value


def loads_model(text: str) -> GaussianModel:
    """Parse the canonical JSON model format."""
    try:
        obj = json.loads(text, parse_constant=_reject_nonfinite)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("top level: expected an object")
    extra = set(obj) - {"nodes", "edges"}
    if extra:
        raise ParseError(f"top level: unexpected key {sorted(extra)[0]!r}")
    for key in ("nodes", "edges"):
        if key not in obj or not isinstance(obj[key], list):
            raise ParseError(f"top level: missing or non-list {key!r}")

    diag, pot = [], []
    for idx, node in enumerate(obj["nodes"]):
        where = f"nodes[{idx}]"
        if not isinstance(node, dict):
            raise ParseError(f"{where}: expected an object")
        unknown = set(node) - set(_NODE_KEYS)
        if unknown:
            raise ParseError(f"{where}: unexpected key {sorted(unknown)[0]!r}")
        for key in _NODE_KEYS:
            if key not in node:
                raise ParseError(f"{where}: missing key {key!r}")
        nid = _require_int(node["id"], f"{where}.id")
        if nid != idx + 1:
            raise ParseError(f"{where}: expected id {idx + 1}, got {nid}")
        diag.append(_require_number(node["a"], f"{where}.a"))
        pot.append(_require_number(node["b"], f"{where}.b"))
    if not diag:
        raise ParseError("nodes: must contain at least one node")

    n = len(diag)
    seen: set[tuple[int, int]] = set()
    ei, ej, ea = [], [], []
    for idx, edge in enumerate(obj["edges"]):
        where = f"edges[{idx}]"
        if not isinstance(edge, dict):
            raise ParseError(f"{where}: expected an object")
        unknown = set(edge) - set(_EDGE_KEYS)
        if unknown:
            raise ParseError(f"{where}: unexpected key {sorted(unknown)[0]!r}")
        for key in _EDGE_KEYS:
            if key not in edge:
                raise ParseError(f"{where}: missing key {key!r}")
        i = _require_int(edge["i"], f"{where}.i")
        j = _require_int(edge["j"], f"{where}.j")
        a = _require_number(edge["a"], f"{where}.a")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"{where}: edge {{{i},{j}}} out of range 1..{n}")
        if i >= j:
            raise ParseError(f"{where}: require i < j, got ({i},{j})")
        if (i, j) in seen:
            raise ParseError(f"{where}: duplicate edge {{{i},{j}}}")
        seen.add((i, j))
        if a == 0.0:
            raise ParseError(f"{where}: zero coupling on edge {{{i},{j}}} (omit the edge)")
        ei.append(i)
        ej.append(j)
        ea.append(a)

    model = GaussianModel.from_arrays(diag, pot, ei, ej, ea)
    report = validate(model)
    if report:
        raise ValidationError(report)
    return model


def load_model(path) -> GaussianModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_model(fh.read())


def dumps_model(model: GaussianModel) -> str:
    """Serialize to the canonical JSON format (byte-stable)."""
    nodes = [
        {"id": k + 1, "a": float(model.diag[k]), "b": float(model.potentials[k])}
        for k in range(model.n)
    ]
    edges = [{"i": i, "j": j, "a": a} for i, j, a in model.edges()]
    return json.dumps({"nodes": nodes, "edges": edges}, indent=2) + "\n"


def save_model(model: GaussianModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))
