"""Weighted projected graph and node-to-simplex incidence."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
import scipy.sparse as sp

from .dataset import SimplexDataset

_WEIGHT_LIMIT = np.iinfo(np.int32).max


class TieStrength(IntEnum):
    ABSENT = 0
    WEAK = 1
    STRONG = 2

    @classmethod
    def of(cls, weight: int) -> "TieStrength":
        return cls(min(int(weight), 2))


def strength_bin(weights: np.ndarray) -> np.ndarray:
    """Vectorized {0, 1, 2+} binning of integer weights."""
    return np.minimum(np.asarray(weights), 2)


def incidence_matrix(ds: SimplexDataset) -> sp.csr_matrix:
    """Simplex-by-node 0/1 matrix (N x n)."""
    data = np.ones(len(ds.nodes), dtype=np.int64)
    return sp.csr_matrix((data, ds.nodes, ds.offsets), shape=(len(ds), ds.n_nodes))


class IncidenceIndex:
    """R(u): the sorted simplex indices containing each node."""

    def __init__(self, ds: SimplexDataset):
        bt = incidence_matrix(ds).T.tocsr()
        bt.sort_indices()
        self._indptr = bt.indptr
        self._indices = bt.indices.astype(np.int64)
        self.n = ds.n_nodes
        self.dataset = ds
        self._sets: dict[int, frozenset] = {}

    def __getitem__(self, u: int) -> np.ndarray:
        return self._indices[self._indptr[u] : self._indptr[u + 1]]

    def __len__(self) -> int:
        return self.n

    @property
    def degrees(self) -> np.ndarray:
        """Simplicial degree |R(u)| of every node."""
        return np.diff(self._indptr)

    def as_set(self, u: int) -> frozenset:
        if u not in self._sets:
            self._sets[u] = frozenset(self[u].tolist())
        return self._sets[u]

    def common(self, nodes) -> np.ndarray:
        """Simplices containing all of ``nodes`` (intersection, shortest first)."""
        lists = sorted((self[int(u)] for u in nodes), key=len)
        out = lists[0]
        for other in lists[1:]:
            if out.size == 0:
                break
            out = np.intersect1d(out, other, assume_unique=True)
        return out


def build_incidence(ds: SimplexDataset) -> IncidenceIndex:
    if "incidence" not in ds._cache:
        ds._cache["incidence"] = IncidenceIndex(ds)
    return ds._cache["incidence"]


@dataclass(eq=False)
class ProjectedGraph:
    """Projected graph with integer weights ``W[u, v] = |R(u) & R(v)|``.

    ``W`` is a symmetric CSR matrix with sorted column indices, so row ``u``
    doubles as the sorted neighbor list of ``u``.
    """

    W: sp.csr_matrix
    n: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        w = self.W
        self.d = np.diff(w.indptr)
        rows = np.repeat(np.arange(self.n), self.d)
        weak = w.data == 1
        self.d1 = np.bincount(rows[weak], minlength=self.n)
        self.d2 = np.bincount(rows[~weak], minlength=self.n)
        self.m1 = int(self.d1.sum()) // 2
        self.m2 = int(self.d2.sum()) // 2

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    @property
    def A(self) -> sp.csr_matrix:
        if "A" not in self._cache:
            a = self.W.copy()
            a.data = np.ones_like(a.data, dtype=np.float64)
            self._cache["A"] = a
        return self._cache["A"]

    def neighbors(self, u: int) -> np.ndarray:
        return self.W.indices[self.W.indptr[u] : self.W.indptr[u + 1]]

    def neighbor_set(self, u: int) -> frozenset:
        sets = self._cache.setdefault("nsets", {})
        if u not in sets:
            sets[u] = frozenset(self.neighbors(u).tolist())
        return sets[u]

    def weight(self, u: int, v: int) -> int:
        nbrs = self.neighbors(u)
        k = np.searchsorted(nbrs, v)
        if k < len(nbrs) and nbrs[k] == v:
            return int(self.W.data[self.W.indptr[u] + k])
        return 0

    def weights(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Vectorized ``W[u[i], v[i]]``."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if len(u) == 0:
            return np.zeros(0, dtype=np.int64)
        keys = self._edge_keys()
        q = u * self.n + v
        pos = np.minimum(np.searchsorted(keys, q), max(len(keys) - 1, 0))
        if len(keys) == 0:
            return np.zeros(len(u), dtype=np.int64)
        return np.where(keys[pos] == q, self.W.data[pos], 0).astype(np.int64)

    def _edge_keys(self) -> np.ndarray:
        if "keys" not in self._cache:
            rows = np.repeat(np.arange(self.n, dtype=np.int64), self.d)
            self._cache["keys"] = rows * self.n + self.W.indices.astype(np.int64)
        return self._cache["keys"]

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Upper-triangle edges ``(u, v, w)`` with ``u < v``, lexicographic."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.d)
        cols = self.W.indices.astype(np.int64)
        up = rows < cols
        return rows[up], cols[up], self.W.data[up].astype(np.int64)

    def edge_index(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Position of edge ``(min, max)`` in :meth:`edges` order; -1 if absent."""
        if "upkeys" not in self._cache:
            eu, ev, _ = self.edges()
            self._cache["upkeys"] = eu * self.n + ev
        keys = self._cache["upkeys"]
        a = np.minimum(u, v).astype(np.int64)
        b = np.maximum(u, v).astype(np.int64)
        q = a * self.n + b
        if len(keys) == 0:
            return np.full(len(q), -1, dtype=np.int64)
        pos = np.minimum(np.searchsorted(keys, q), len(keys) - 1)
        return np.where(keys[pos] == q, pos, -1)


def build_projected_graph(ds: SimplexDataset) -> ProjectedGraph:
    """Project the dataset: ``W[u, v]`` counts simplices containing both."""
    if "graph" in ds._cache:
        return ds._cache["graph"]
    b = incidence_matrix(ds)
    w = (b.T @ b).tocsr()
    w.setdiag(0)
    w.eliminate_zeros()
    w.sort_indices()
    if w.nnz and w.data.max() > _WEIGHT_LIMIT:
        raise OverflowError("projected-graph weight exceeds the 32-bit range")
    w.data = w.data.astype(np.int64)
    g = ProjectedGraph(w, ds.n_nodes)
    ds._cache["graph"] = g
    return g


def graph_metrics(g: ProjectedGraph) -> tuple[float, float]:
    """Edge density m / C(n, 2) and average degree 2m / n."""
    if g.n < 2:
        raise ValueError("graph metrics need at least two nodes")
    m = g.m
    return m / (g.n * (g.n - 1) / 2), 2 * m / g.n
