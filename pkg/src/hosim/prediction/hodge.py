"""Simplicial personalized PageRank on the normalized Hodge Laplacian of edges.

The complex consists of the projected-graph edges oriented ``(i, j)`` with
``i < j`` and the closed triangles oriented ``(i, j, k)`` with ``i < j < k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..dataset import SimplexDataset
from ..projection import build_projected_graph
from ..triangles import closed_mask, triangle_array
from .paths import IsolatedNodeError, SolverError

SOLVER_RTOL = 1e-12
LSQR_TOL = 1e-3


class MissingEdgeError(KeyError):
    pass


@dataclass(frozen=True)
class HodgeOperators:
    """Operators of the edge-level random walk.

    ``vertices`` lists the node ids with at least one edge; they index the
    columns of ``G``.
    """

    vertices: np.ndarray
    edges: np.ndarray  # (m, 2), i < j, lexicographic
    triangles: np.ndarray  # (t, 3), i < j < k, lexicographic
    G: sp.csr_matrix
    C: sp.csr_matrix
    D: sp.dia_matrix
    M: sp.dia_matrix
    L: sp.csr_matrix
    P: sp.csr_matrix

    def edge_id(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Row of edge ``{u, v}``; raises if any requested edge is absent."""
        return _edge_lookup(self.edges, u, v)


def _edge_lookup(edges: np.ndarray, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    a, b = np.minimum(u, v), np.maximum(u, v)
    n = int(max(edges.max(initial=0), b.max(initial=0))) + 1
    keys = edges[:, 0] * n + edges[:, 1]
    q = a * n + b
    if len(keys) == 0:
        bad = np.ones(len(q), dtype=bool)
        pos = np.zeros(len(q), dtype=np.int64)
    else:
        pos = np.minimum(np.searchsorted(keys, q), len(keys) - 1)
        bad = keys[pos] != q
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise MissingEdgeError(f"edge ({int(a[k])}, {int(b[k])}) is not in the complex")
    return pos


def hodge_operators(edges: np.ndarray, triangles: np.ndarray, vertices: np.ndarray | None = None
                    ) -> HodgeOperators:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if vertices is None:
        vertices = np.unique(edges)
    col = np.full(int(vertices.max()) + 1 if len(vertices) else 0, -1, dtype=np.int64)
    col[vertices] = np.arange(len(vertices))
    m, t = len(edges), len(triangles)
    rows = np.repeat(np.arange(m), 2)
    g = sp.csr_matrix(
        (np.tile([-1, 1], m), (rows, col[edges].ravel())), shape=(m, len(vertices)), dtype=np.int64
    )
    deg = np.asarray(abs(g).sum(axis=0)).ravel()
    if np.any(deg == 0):
        raise IsolatedNodeError(f"node {int(vertices[np.flatnonzero(deg == 0)[0]])} is isolated")

    if t:
        e_ij = _edge_lookup(edges, triangles[:, 0], triangles[:, 1])
        e_jk = _edge_lookup(edges, triangles[:, 1], triangles[:, 2])
        e_ik = _edge_lookup(edges, triangles[:, 0], triangles[:, 2])
        c = sp.csr_matrix(
            (np.tile([1, 1, -1], t), (np.repeat(np.arange(t), 3),
                                       np.column_stack([e_ij, e_jk, e_ik]).ravel())),
            shape=(t, m), dtype=np.int64,
        )
    else:
        c = sp.csr_matrix((0, m), dtype=np.int64)
    d = sp.diags(deg.astype(np.float64))
    mdiag = 2.0 + np.asarray(abs(c).sum(axis=0)).ravel()
    mm = sp.diags(mdiag)
    gf, cf = g.astype(np.float64), c.astype(np.float64)
    lap = ((gf @ sp.diags(1.0 / deg) @ gf.T + cf.T @ cf) @ sp.diags(1.0 / mdiag)).tocsr()
    p = (0.5 * (sp.identity(m, format="csr") - lap)).tocsr()
    return HodgeOperators(vertices, edges, triangles, g, c, d, mm, lap, p)


def build_hodge(ds: SimplexDataset) -> HodgeOperators:
    """Operators for the complex of projected edges and closed triangles of ``ds``."""
    g = build_projected_graph(ds)
    u, v, _ = g.edges()
    tri = triangle_array(g)
    return hodge_operators(np.column_stack([u, v]), tri[closed_mask(ds, tri)])


def sppr_columns(ops: HodgeOperators, cols: np.ndarray, alpha: float = 0.85,
                 rtol: float = SOLVER_RTOL) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(j, S[:, j])`` with ``S = (1 - alpha)(I - alpha P)^{-1}``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    m = ops.P.shape[0]
    op = (sp.identity(m, format="csr") - alpha * ops.P).tocsr()
    for j in np.asarray(cols, dtype=np.int64):
        e = np.zeros(m)
        e[j] = 1.0 - alpha
        s, info = spla.gmres(op, e, rtol=rtol, atol=0.0, restart=min(m, 50), maxiter=10 * m + 100)
        if info != 0:
            raise SolverError(f"GMRES failed on edge column {j} (info={info})")
        yield int(j), s


def simplicial_ppr(ds: SimplexDataset, alpha: float = 0.85) -> tuple[HodgeOperators, np.ndarray]:
    """Dense edge-to-edge score matrix ``S`` (small complexes only)."""
    ops = build_hodge(ds)
    m = len(ops.edges)
    s = np.zeros((m, m))
    for j, col in sppr_columns(ops, np.arange(m), alpha):
        s[:, j] = col
    return ops, s


def _lsqr(a: sp.csr_matrix, b: np.ndarray, tol: float) -> np.ndarray:
    if a.shape[0] == 0 or a.shape[1] == 0 or not np.any(b):
        return np.zeros(a.shape[1])
    res = spla.lsqr(a, b, atol=tol, btol=tol, iter_lim=max(10 * a.shape[1], 1000))
    x, istop, itn, r1norm = res[0], res[1], res[2], res[3]
    if istop == 7:
        raise SolverError(f"LSQR hit the iteration cap ({itn}); residual norm {r1norm:.3e}")
    return x


def hodge_decompose(s: np.ndarray, ops: HodgeOperators, tol: float = LSQR_TOL):
    """Split edge vectors (columns of ``s``) into gradient, curl and harmonic parts.

    ``grad = G x`` and ``curl = C^T y`` are least-squares fits; the harmonic
    part is the residual, so the three parts add up to ``s`` up to rounding.
    """
    s = np.asarray(s, dtype=np.float64)
    vec = s.ndim == 1
    s2 = s[:, None] if vec else s
    g = ops.G.astype(np.float64)
    ct = ops.C.T.astype(np.float64).tocsr()
    grad = np.zeros_like(s2)
    curl = np.zeros_like(s2)
    for k in range(s2.shape[1]):
        grad[:, k] = g @ _lsqr(g, s2[:, k], tol)
        curl[:, k] = ct @ _lsqr(ct, s2[:, k], tol)
    harm = s2 - grad - curl
    if vec:
        return grad[:, 0], curl[:, 0], harm[:, 0]
    return grad, curl, harm


def triple_edge_pairs(ops: HodgeOperators, triples: np.ndarray) -> np.ndarray:
    """``(T, 6, 2)`` ordered (row, column) edge pairs for the triple score.

    For ``i < j < k`` with edges ``a = (i, j)``, ``b = (i, k)``, ``c = (j, k)``
    the six distinct ordered pairs are used.
    """
    a = ops.edge_id(triples[:, 0], triples[:, 1])
    b = ops.edge_id(triples[:, 0], triples[:, 2])
    c = ops.edge_id(triples[:, 1], triples[:, 2])
    return np.stack([
        np.column_stack(p) for p in ((a, c), (c, a), (a, b), (b, a), (c, b), (b, c))
    ], axis=1)


def sppr_triple_scores(ops: HodgeOperators, triples: np.ndarray, alpha: float = 0.85,
                       component: str | None = None, tol: float = LSQR_TOL,
                       progress: Callable[[int, int], None] | None = None) -> np.ndarray:
    """Sum of ``|S[e, f]|`` over the six ordered edge pairs of each triple.

    ``component`` in {None, "grad", "curl", "harm"} scores with one Hodge part
    of each column of ``S`` instead.
    """
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    pairs = triple_edge_pairs(ops, triples).reshape(-1, 2)
    owner = np.repeat(np.arange(len(triples)), 6)
    order = np.argsort(pairs[:, 1], kind="stable")
    pairs, owner = pairs[order], owner[order]
    cols, starts = np.unique(pairs[:, 1], return_index=True)
    ends = np.append(starts[1:], len(pairs))
    scores = np.zeros(len(triples))
    for k, (j, col) in enumerate(sppr_columns(ops, cols, alpha)):
        if component is not None:
            grad, curl, harm = hodge_decompose(col, ops, tol)
            col = {"grad": grad, "curl": curl, "harm": harm}[component]
        sl = slice(starts[k], ends[k])
        np.add.at(scores, owner[sl], np.abs(col[pairs[sl, 0]]))
        if progress is not None:
            progress(k + 1, len(cols))
    return scores
