"""Edge-weight and local-neighborhood scores for candidate triples.

All functions are vectorized over an ``(T, 3)`` array of sorted triples.
"""

from __future__ import annotations

import math

import numpy as np

from ..projection import IncidenceIndex, ProjectedGraph
from ..triangles import triangle_weights

_CHUNK = 50_000


def generalized_mean(weights: np.ndarray, p: float) -> np.ndarray:
    """Power mean ``[(a^p + b^p + c^p) / 3]^(1/p)`` of each row.

    ``p = 0`` is the geometric mean and ``p = +-inf`` the max / min.  Rows are
    scaled by their max (``p > 0``) or min (``p < 0``) so ``r^p <= 1``, and the
    mean is taken in log space so tiny ``|p|`` tends smoothly to the
    geometric mean.
    """
    w = np.asarray(weights, dtype=np.float64).reshape(-1, 3)
    if np.any(w <= 0):
        raise ValueError("generalized mean needs strictly positive weights (open triangles)")
    if p == math.inf:
        return w.max(axis=1)
    if p == -math.inf:
        return w.min(axis=1)
    ref = w.max(axis=1) if p >= 0 else w.min(axis=1)
    logr = np.log(w / ref[:, None])
    if p == 0:
        return ref * np.exp(logr.mean(axis=1))
    m = np.expm1(p * logr).mean(axis=1)
    return ref * np.exp(np.log1p(m) / p)


def weight_scores(g: ProjectedGraph, triples: np.ndarray, p: float) -> np.ndarray:
    return generalized_mean(triangle_weights(g, triples), p)


def neighborhood_counts(g: ProjectedGraph, triples: np.ndarray):
    """Per-triple set sizes used by the local scores.

    Returns ``(cn3, pair_cn, aa)``: the triple common-neighbor count, the
    three pairwise common-neighbor counts ``(ij, ik, jk)``, and the
    Adamic-Adar sum over the triple's common neighbors.
    """
    a = g.A
    deg = g.d
    inv_log = np.zeros(g.n)
    inv_log[deg > 1] = 1.0 / np.log(deg[deg > 1])
    cn3 = np.zeros(len(triples), dtype=np.int64)
    pair = np.zeros((len(triples), 3), dtype=np.int64)
    aa = np.zeros(len(triples))
    for s in range(0, len(triples), _CHUNK):
        t = triples[s : s + _CHUNK]
        ri, rj, rk = a[t[:, 0]], a[t[:, 1]], a[t[:, 2]]
        ij, ik, jk = ri.multiply(rj), ri.multiply(rk), rj.multiply(rk)
        common = ij.multiply(rk).tocsr()
        common.eliminate_zeros()
        cn3[s : s + _CHUNK] = np.diff(common.indptr)
        pair[s : s + _CHUNK] = np.column_stack(
            [np.asarray(m.sum(axis=1)).ravel() for m in (ij, ik, jk)]
        )
        # a common neighbor of three distinct nodes has degree >= 3
        if common.nnz and not np.all(deg[common.indices] >= 3):
            raise AssertionError("common neighbor with degree < 3")
        aa[s : s + _CHUNK] = common @ inv_log
    return cn3, pair, aa


def common_neighbors(g: ProjectedGraph, triples: np.ndarray) -> np.ndarray:
    return neighborhood_counts(g, triples)[0].astype(np.float64)


def jaccard(g: ProjectedGraph, triples: np.ndarray) -> np.ndarray:
    """``|N(i) & N(j) & N(k)| / |N(i) | N(j) | N(k)|`` by inclusion-exclusion."""
    cn3, pair, _ = neighborhood_counts(g, triples)
    union = g.d[triples].sum(axis=1) - pair.sum(axis=1) + cn3
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(union > 0, cn3 / np.maximum(union, 1), 0.0)


def adamic_adar(g: ProjectedGraph, triples: np.ndarray) -> np.ndarray:
    return neighborhood_counts(g, triples)[2]


def pref_attach_projected(g: ProjectedGraph, triples: np.ndarray) -> np.ndarray:
    return g.d[triples].astype(np.float64).prod(axis=1)


def pref_attach_simplicial(inc: IncidenceIndex, triples: np.ndarray) -> np.ndarray:
    return inc.degrees[triples].astype(np.float64).prod(axis=1)
