"""Katz and personalized PageRank pair scores via per-column Krylov solves.

Only the entries on the adjacency pattern are kept: a candidate triple is
an open triangle, so its three pairs are always edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..projection import ProjectedGraph

SOLVER_RTOL = 1e-12


class DivergenceError(ValueError):
    """The damping parameter is too large for the path series to converge."""


class IsolatedNodeError(ValueError):
    """A node without neighbors makes the degree matrix singular."""


class SolverError(RuntimeError):
    pass


def spectral_norm(m: sp.spmatrix, tol: float = 1e-6, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on ``m^T m``."""
    n = m.shape[0]
    if m.nnz == 0:
        return 0.0
    x = np.ones(n) / np.sqrt(n)
    sigma = 0.0
    for _ in range(max_iter):
        y = m @ x
        new = float(np.linalg.norm(y))
        z = m.T @ y
        nz = np.linalg.norm(z)
        if nz == 0:
            return new
        x = z / nz
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    raise SolverError("power iteration did not converge")


@dataclass(frozen=True)
class PairScores:
    """Score matrix restricted to the adjacency pattern; ``matrix[i, j]``."""

    matrix: sp.csr_matrix
    param: float

    def values(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        m = self.matrix
        n = m.shape[0]
        if m.nnz == 0:
            return np.zeros(len(i))
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(m.indptr))
        keys = rows * n + m.indices
        q = np.asarray(i, dtype=np.int64) * n + np.asarray(j, dtype=np.int64)
        pos = np.minimum(np.searchsorted(keys, q), len(keys) - 1)
        return np.where(keys[pos] == q, m.data[pos], 0.0)

    def triple_scores(self, triples: np.ndarray, both_directions: bool) -> np.ndarray:
        out = np.zeros(len(triples))
        for a, b in ((0, 1), (0, 2), (1, 2)):
            out += self.values(triples[:, a], triples[:, b])
            if both_directions:
                out += self.values(triples[:, b], triples[:, a])
        return out


def _matrix(g: ProjectedGraph, weighted: bool) -> sp.csr_matrix:
    return g.W.astype(np.float64) if weighted else g.A


def _pattern_matrix(m: sp.csr_matrix, columns: dict[int, np.ndarray]) -> sp.csr_matrix:
    """CSR matrix on the pattern of symmetric ``m`` with column ``j`` = ``columns[j][pattern]``."""
    data = np.zeros(m.nnz)
    for j, col in columns.items():
        lo, hi = m.indptr[j], m.indptr[j + 1]
        data[lo:hi] = col[m.indices[lo:hi]]
    out = sp.csc_matrix((data, m.indices.copy(), m.indptr.copy()), shape=m.shape).tocsr()
    out.sort_indices()
    return out


def katz_matrix(m: sp.csr_matrix, beta: float | None = None,
                rtol: float = SOLVER_RTOL) -> PairScores:
    """``K = (I - beta m)^{-1} - I`` on the pattern of ``m``, one MINRES solve per node."""
    sigma = spectral_norm(m)
    if beta is None:
        beta = 0.25 / sigma if sigma > 0 else 0.0
    if beta * sigma >= 1:
        raise DivergenceError(f"beta = {beta:g} >= 1 / sigma_1 = {1 / sigma:g}")
    n = m.shape[0]
    op = (sp.identity(n, format="csr") - beta * m).tocsr()
    cols = {}
    for j in np.flatnonzero(np.diff(m.indptr)):
        e = np.zeros(n)
        e[j] = 1.0
        k, info = spla.minres(op, e, rtol=rtol, maxiter=10 * n + 100)
        if info != 0:
            raise SolverError(f"MINRES failed on column {j} (info={info})")
        cols[int(j)] = k  # off-diagonal entries of K equal those of the inverse
    return PairScores(_pattern_matrix(m, cols), float(beta))


def katz_scores(g: ProjectedGraph, weighted: bool = False, beta: float | None = None) -> PairScores:
    return katz_matrix(_matrix(g, weighted), beta)


def ppr_matrix(m: sp.csr_matrix, alpha: float = 0.85, rtol: float = SOLVER_RTOL) -> PairScores:
    """``F = (1 - alpha)(I - alpha m D^{-1})^{-1}`` on the pattern of ``m``.

    ``F[j, i]`` is the score of ``j`` with respect to seed ``i``; each full
    column is a probability vector.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    deg = np.asarray(m.sum(axis=0)).ravel()
    if np.any(deg == 0):
        raise IsolatedNodeError(f"node {int(np.flatnonzero(deg == 0)[0])} is isolated")
    n = m.shape[0]
    op = (sp.identity(n, format="csr") - alpha * (m @ sp.diags(1.0 / deg))).tocsr()
    cols = {}
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0 - alpha
        f, info = spla.gmres(op, e, rtol=rtol, atol=0.0, restart=min(n, 50), maxiter=10 * n + 100)
        if info != 0:
            raise SolverError(f"GMRES failed on column {i} (info={info})")
        cols[i] = f
    return PairScores(_pattern_matrix(m, cols), float(alpha))


def ppr_scores(g: ProjectedGraph, weighted: bool = False, alpha: float = 0.85,
               skip_isolated: bool = False) -> PairScores:
    """PPR pair scores; with ``skip_isolated`` the solve runs on the non-isolated subgraph."""
    m = _matrix(g, weighted)
    if not skip_isolated:
        return ppr_matrix(m, alpha)
    keep = np.flatnonzero(g.d > 0)
    sub = ppr_matrix(m[keep][:, keep].tocsr(), alpha).matrix.tocoo()
    full = sp.csr_matrix((sub.data, (keep[sub.row], keep[sub.col])), shape=m.shape)
    full.sort_indices()
    return PairScores(full, float(alpha))
