"""Triangle and 4-clique enumeration on the projected graph, open/closed status."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from ._subsets import subset_multiplicity
from .dataset import SimplexDataset
from .projection import IncidenceIndex, ProjectedGraph, build_projected_graph

_CHUNK = 1 << 21


class NoTrianglesError(ValueError):
    """The projected graph has no triangles, so an open fraction is undefined."""


@dataclass(frozen=True)
class TriangleRecord:
    nodes: tuple[int, int, int]
    weights: tuple[int, int, int]  # (W_uv, W_uw, W_vw)
    closed: bool | None = None


def _forward_adjacency(g: ProjectedGraph) -> sp.csr_matrix:
    """Edges oriented from lower to higher (degree, id) rank."""
    order = np.lexsort((np.arange(g.n), g.d))
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    u, v, _ = g.edges()
    swap = rank[u] > rank[v]
    lo = np.where(swap, v, u)
    hi = np.where(swap, u, v)
    fwd = sp.csr_matrix((np.ones(len(lo), dtype=np.int8), (lo, hi)), shape=(g.n, g.n))
    fwd.sort_indices()
    return fwd


def _expand(fwd: sp.csr_matrix, rows: np.ndarray, via: np.ndarray):
    """Yield ``(k, x)`` chunks: ``rows[k]`` paired with each forward neighbor x of ``via[k]``."""
    counts = np.diff(fwd.indptr)[via]
    ends = np.cumsum(counts)
    start = 0
    while start < len(rows):
        stop = int(np.searchsorted(ends, (ends[start - 1] if start else 0) + _CHUNK, side="right"))
        stop = max(stop, start + 1)
        sel = np.arange(start, stop)
        c = counts[sel]
        k = np.repeat(sel, c)
        excl = np.zeros(len(c), dtype=np.int64)
        np.cumsum(c[:-1], out=excl[1:])
        pos = np.repeat(fwd.indptr[via[sel]] - excl, c) + np.arange(int(c.sum()))
        yield k, fwd.indices[pos].astype(np.int64)
        start = stop


def _sorted_rows(x: np.ndarray) -> np.ndarray:
    if len(x) == 0:
        return x
    x = np.sort(x, axis=1)
    return x[np.lexsort(x.T[::-1])]


def triangle_array(g: ProjectedGraph) -> np.ndarray:
    """All triangles as a ``(T, 3)`` array of sorted triples in lexicographic order.

    Degree-ordered: each triangle is discovered once from its lowest-ranked
    vertex along forward edges only.
    """
    if "triangles" in g._cache:
        return g._cache["triangles"]
    fwd = _forward_adjacency(g)
    a = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(fwd.indptr))
    b = fwd.indices.astype(np.int64)
    found = []
    for k, c in _expand(fwd, a, b):
        hit = g.weights(a[k], c) > 0
        found.append(np.column_stack([a[k][hit], b[k][hit], c[hit]]))
    tri = np.concatenate(found) if found else np.zeros((0, 3), dtype=np.int64)
    tri = _sorted_rows(tri.astype(np.int64))
    g._cache["triangles"] = tri
    return tri


def clique4_array(g: ProjectedGraph) -> np.ndarray:
    """All 4-cliques as sorted rows, by forward extension of triangles."""
    if "cliques4" in g._cache:
        return g._cache["cliques4"]
    fwd = _forward_adjacency(g)
    order = np.lexsort((np.arange(g.n), g.d))
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    tri = triangle_array(g)
    # re-sort each triangle by rank so the last column is its highest vertex
    by_rank = np.take_along_axis(tri, np.argsort(rank[tri], axis=1), axis=1)
    found = []
    for k, d in _expand(fwd, by_rank[:, 0], by_rank[:, 2]):
        t = by_rank[k]
        hit = (g.weights(t[:, 0], d) > 0) & (g.weights(t[:, 1], d) > 0)
        found.append(np.column_stack([t[hit], d[hit]]))
    q = np.concatenate(found) if found else np.zeros((0, 4), dtype=np.int64)
    q = _sorted_rows(q.astype(np.int64))
    g._cache["cliques4"] = q
    return q


def triangle_weights(g: ProjectedGraph, tri: np.ndarray) -> np.ndarray:
    """``(T, 3)`` weights ``(W_uv, W_uw, W_vw)`` for sorted triples ``(u, v, w)``."""
    return np.column_stack([
        g.weights(tri[:, 0], tri[:, 1]),
        g.weights(tri[:, 0], tri[:, 2]),
        g.weights(tri[:, 1], tri[:, 2]),
    ])


def enumerate_triangles(g: ProjectedGraph) -> Iterator[TriangleRecord]:
    """Stream every triangle of the unweighted projected graph once."""
    tri = triangle_array(g)
    w = triangle_weights(g, tri)
    for t, ws in zip(tri.tolist(), w.tolist()):
        yield TriangleRecord(tuple(t), tuple(ws))


def classify_closed(t, inc: IncidenceIndex) -> bool:
    """True when some simplex contains all three nodes."""
    return inc.common(t).size > 0


def closed_mask(ds: SimplexDataset, tri: np.ndarray) -> np.ndarray:
    """Vectorized closure check for many sorted triples."""
    return subset_multiplicity(ds, 3).lookup(tri) > 0


def fraction_open(ds: SimplexDataset) -> tuple[int, int, float]:
    """``(open_count, closed_count, open / (open + closed))``.

    Every triple inside a simplex is a triangle, so the closed count is the
    number of distinct 3-subsets of simplices and only the total needs the
    graph.
    """
    g = build_projected_graph(ds)
    a = g.A
    total = int(round((a @ a).multiply(a).sum() / 6))
    if total == 0:
        raise NoTrianglesError("the projected graph has no triangles")
    closed = len(subset_multiplicity(ds, 3))
    return total - closed, closed, (total - closed) / total
