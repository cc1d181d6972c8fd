"""Exact 3-node and 4-node open-configuration censuses.

The fast counters enumerate only triangles and 4-cliques; every other
configuration count follows from degree sums by inclusion-exclusion.
Reference numbers (1-10 for three nodes, 1-27 for four) follow the usual
layout: empty, single edges, wedges, open triangles; then triangle plus
isolated node, triangle plus pendant edge, two triangles sharing an edge,
and open tetrahedral wireframes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from math import comb

import numpy as np

from ._subsets import KeyCounter, subset_multiplicity
from .dataset import SimplexDataset
from .projection import IncidenceIndex, ProjectedGraph, build_projected_graph, strength_bin
from .triangles import clique4_array, triangle_array, triangle_weights

CONFIG3_NAMES = ("empty", "eta1", "eta2", "w11", "w12", "w22", "o111", "o112", "o122", "o222")
PAIR_STRENGTHS = tuple(combinations_with_replacement(range(3), 2))
TETRA_STRENGTHS = tuple(combinations_with_replacement(range(3), 4))
CONFIG4_NAMES = (
    tuple(f"pi{s}" for s in range(3))
    + tuple(f"rho{s}" for s in range(3))
    + tuple("phi" + "".join(map(str, p)) for p in PAIR_STRENGTHS)
    + tuple("q" + "".join(map(str, t)) for t in TETRA_STRENGTHS)
)
BRUTE_FORCE_CAP = 40

# sorted 4-tuple of face strengths (base-3 code) -> index into TETRA_STRENGTHS
_TETRA_LUT = np.full(81, -1, dtype=np.int64)
for _k, _t in enumerate(TETRA_STRENGTHS):
    _TETRA_LUT[((_t[0] * 3 + _t[1]) * 3 + _t[2]) * 3 + _t[3]] = _k
_PAIR_LUT = np.full((3, 3), -1, dtype=np.int64)
for _k, (_i, _j) in enumerate(PAIR_STRENGTHS):
    _PAIR_LUT[_i, _j] = _PAIR_LUT[_j, _i] = _k
_FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
_QUAD_EDGES = tuple(combinations(range(4), 2))


class CensusConsistencyError(RuntimeError):
    """A census formula produced a negative count, which signals a counting bug."""


@dataclass(frozen=True)
class Config3Counts:
    """Census of 3-node configurations; ``t*`` are open plus closed triangles."""

    n: int
    empty: int
    eta1: int
    eta2: int
    w11: int
    w12: int
    w22: int
    o111: int
    o112: int
    o122: int
    o222: int
    t111: int
    t112: int
    t122: int
    t222: int

    def values(self) -> list[int]:
        """Open-configuration counts in reference order 1-10."""
        return [getattr(self, k) for k in CONFIG3_NAMES]

    def as_refs(self) -> dict[int, int]:
        return dict(enumerate(self.values(), 1))

    def total(self) -> int:
        """Should equal C(n, 3)."""
        return (self.empty + self.eta1 + self.eta2 + self.w11 + self.w12 + self.w22
                + self.t111 + self.t112 + self.t122 + self.t222)


@dataclass(frozen=True)
class Config4Counts:
    """Census of 4-node configurations with at least one triangle.

    ``pi[s]``, ``rho[s]`` are indexed by the triangle's simplicial strength;
    ``phi`` follows :data:`PAIR_STRENGTHS`; ``q`` (open) and ``tau`` (open
    plus closed) follow :data:`TETRA_STRENGTHS`.
    """

    n: int
    pi: tuple[int, ...]
    rho: tuple[int, ...]
    phi: tuple[int, ...]
    q: tuple[int, ...]
    tau: tuple[int, ...]

    def values(self) -> list[int]:
        """Open-configuration counts in reference order 1-27."""
        return [*self.pi, *self.rho, *self.phi, *self.q]

    def as_refs(self) -> dict[int, int]:
        return dict(enumerate(self.values(), 1))


def _check(name: str, value: int) -> int:
    if value < 0:
        raise CensusConsistencyError(f"{name} = {value} < 0")
    return int(value)


def _triangles_with_strength(g: ProjectedGraph, mult3: KeyCounter):
    tri = triangle_array(g)
    edge_s = strength_bin(triangle_weights(g, tri))
    n_strong = (edge_s == 2).sum(axis=1)
    simp_s = np.minimum(mult3.lookup(tri), 2)
    return tri, n_strong, simp_s


def count_configs3(g: ProjectedGraph, inc: IncidenceIndex) -> Config3Counts:
    """Enumeration-free 3-node census (only triangles are enumerated)."""
    mult3 = subset_multiplicity(inc.dataset, 3)
    _, n_strong, simp_s = _triangles_with_strength(g, mult3)
    t = [int(x) for x in np.bincount(n_strong, minlength=4)]
    o = [int(x) for x in np.bincount(n_strong[simp_s == 0], minlength=4)]
    t111, t112, t122, t222 = t
    d1 = g.d1.astype(object)
    d2 = g.d2.astype(object)
    n, m1, m2 = g.n, g.m1, g.m2

    w11 = _check("w11", sum(d1 * (d1 - 1) // 2) - 3 * t111 - t112)
    w22 = _check("w22", sum(d2 * (d2 - 1) // 2) - 3 * t222 - t122)
    w12 = _check("w12", sum(d1 * d2) - 2 * t112 - 2 * t122)
    eta1 = _check("eta1", m1 * (n - 2) - 2 * w11 - w12 - 3 * t111 - 2 * t112 - t122)
    eta2 = _check("eta2", m2 * (n - 2) - 2 * w22 - w12 - 3 * t222 - 2 * t122 - t112)
    empty = _check("empty", comb(n, 3) - eta1 - eta2 - w11 - w12 - w22 - sum(t))
    return Config3Counts(n, empty, eta1, eta2, w11, w12, w22, *o, *t)


def _face_strengths(quads: np.ndarray, mult3: KeyCounter) -> np.ndarray:
    """Simplicial strength (0, 1, 2) of the four faces of each 4-clique."""
    if len(quads) == 0:
        return np.zeros((0, 4), dtype=np.int64)
    return np.column_stack([np.minimum(mult3.lookup(quads[:, list(f)]), 2) for f in _FACES])


def _tetra_code(faces: np.ndarray) -> np.ndarray:
    srt = np.sort(faces, axis=1)
    return _TETRA_LUT[((srt[:, 0] * 3 + srt[:, 1]) * 3 + srt[:, 2]) * 3 + srt[:, 3]]


def _ints(x) -> tuple[int, ...]:
    return tuple(int(v) for v in x)


def count_configs4(g: ProjectedGraph, inc: IncidenceIndex) -> Config4Counts:
    """Enumeration-free 4-node census (triangles and 4-cliques are enumerated)."""
    ds = inc.dataset
    mult3 = subset_multiplicity(ds, 3)
    mult4 = subset_multiplicity(ds, 4)
    tri, _, simp_s = _triangles_with_strength(g, mult3)
    n_tri = [int(x) for x in np.bincount(simp_s, minlength=3)]

    # Y[s][e]: triangles of simplicial strength s on edge e
    m = g.m
    y = np.zeros((3, m), dtype=np.int64)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        e = g.edge_index(tri[:, a], tri[:, b])
        np.add.at(y, (simp_s, e), 1)
    phi_raw = []
    for i, j in PAIR_STRENGTHS:
        if i == j:
            phi_raw.append(int((y[i] * (y[i] - 1) // 2).sum()))
        else:
            phi_raw.append(int((y[i] * y[j]).sum()))

    quads = clique4_array(g)
    faces = _face_strengths(quads, mult3)
    code = _tetra_code(faces)
    closed4 = mult4.lookup(quads) > 0
    tau = [int(x) for x in np.bincount(code, minlength=15)]
    q = [int(x) for x in np.bincount(code[~closed4], minlength=15)]

    # every pair of faces of a tetrahedron shares one edge: remove those pairs
    tetra_pairs = np.zeros(6, dtype=np.int64)
    for f1, f2 in combinations(range(4), 2):
        tetra_pairs += np.bincount(_PAIR_LUT[faces[:, f1], faces[:, f2]], minlength=6)
    phi = [_check(f"phi{PAIR_STRENGTHS[k]}", phi_raw[k] - int(tetra_pairs[k])) for k in range(6)]

    a = [sum(((i == s) + (j == s)) * phi[k] for k, (i, j) in enumerate(PAIR_STRENGTHS))
         for s in range(3)]
    b = [sum(t.count(s) * tau[k] for k, t in enumerate(TETRA_STRENGTHS)) for s in range(3)]
    deg_sum = g.d[tri].sum(axis=1) - 6
    rho, pi = [], []
    for s in range(3):
        r = int(deg_sum[simp_s == s].sum()) - 2 * a[s] - 3 * b[s]
        rho.append(_check(f"rho{s}", r))
        pi.append(_check(f"pi{s}", n_tri[s] * (g.n - 3) - r - a[s] - b[s]))
    return Config4Counts(g.n, tuple(pi), tuple(rho), tuple(phi), tuple(q), tuple(tau))


# ----------------------------------------------------------------------
# direct per-subset classification (shared by the oracle and closure scans)


def config3_refs(g: ProjectedGraph, mult3: KeyCounter, triples: np.ndarray) -> np.ndarray:
    """Reference number 1-10 of each sorted triple; 0 for closed triangles."""
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    s = strength_bin(triangle_weights(g, triples))
    n_edges = (s > 0).sum(axis=1)
    n_strong = (s == 2).sum(axis=1)
    ref = np.select(
        [n_edges == 0, n_edges == 1, n_edges == 2],
        [1, 2 + n_strong, 4 + n_strong],
        7 + n_strong,
    )
    if len(triples):
        full = n_edges == 3
        closed = np.zeros(len(triples), dtype=bool)
        closed[full] = mult3.lookup(triples[full]) > 0
        ref[closed] = 0
    return ref


def config4_refs(g: ProjectedGraph, mult3: KeyCounter, mult4: KeyCounter,
                 quads: np.ndarray) -> np.ndarray:
    """Reference number 1-27 of each sorted 4-tuple.

    0 means no triangle in the induced subgraph; -1 means the four nodes
    already share a simplex.
    """
    quads = np.asarray(quads, dtype=np.int64).reshape(-1, 4)
    if len(quads) == 0:
        return np.zeros(0, dtype=np.int64)
    edge = np.column_stack([g.weights(quads[:, i], quads[:, j]) > 0 for i, j in _QUAD_EDGES])
    n_edges = edge.sum(axis=1)
    pos = {p: k for k, p in enumerate(_QUAD_EDGES)}
    is_tri = np.column_stack([
        edge[:, pos[(f[0], f[1])]] & edge[:, pos[(f[0], f[2])]] & edge[:, pos[(f[1], f[2])]]
        for f in _FACES
    ])
    strength = np.full((len(quads), 4), 3, dtype=np.int64)  # 3 marks "not a triangle"
    for k, f in enumerate(_FACES):
        rows = np.flatnonzero(is_tri[:, k])
        strength[rows, k] = np.minimum(mult3.lookup(quads[rows][:, list(f)]), 2)
    n_tri = is_tri.sum(axis=1)
    srt = np.sort(strength, axis=1)  # real strengths first

    ref = np.zeros(len(quads), dtype=np.int64)
    one = n_tri == 1
    ref[one & (n_edges == 3)] = 1 + srt[one & (n_edges == 3), 0]
    ref[one & (n_edges == 4)] = 4 + srt[one & (n_edges == 4), 0]
    two = n_tri == 2
    ref[two] = 7 + _PAIR_LUT[srt[two, 0], srt[two, 1]]
    four = n_tri == 4
    ref[four] = 13 + _tetra_code(srt[four])
    if four.any():
        closed = np.zeros(len(quads), dtype=bool)
        closed[four] = mult4.lookup(quads[four]) > 0
        ref[closed] = -1
    return ref


def _all_subsets(n: int, k: int) -> np.ndarray:
    return np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def brute_force_configs(ds: SimplexDataset, arity: int, cap: int = BRUTE_FORCE_CAP):
    """Classify every node subset of size ``arity`` directly (test oracle)."""
    if arity not in (3, 4):
        raise ValueError("arity must be 3 or 4")
    n = ds.n_nodes
    if n > cap:
        raise ValueError(f"brute force refused: n = {n} exceeds the cap of {cap}")
    g = build_projected_graph(ds)
    mult3 = subset_multiplicity(ds, 3)
    subsets = _all_subsets(n, arity)
    if arity == 3:
        refs = config3_refs(g, mult3, subsets)
        open_counts = np.bincount(refs, minlength=11)[1:]
        s = strength_bin(triangle_weights(g, subsets))
        full = (s > 0).all(axis=1)
        t = np.bincount((s[full] == 2).sum(axis=1), minlength=4)
        return Config3Counts(n, *(int(x) for x in open_counts), *(int(x) for x in t))

    mult4 = subset_multiplicity(ds, 4)
    refs = config4_refs(g, mult3, mult4, subsets)
    counts = np.bincount(refs[refs > 0], minlength=28)[1:]
    # tau: classify the closed 4-cliques as well
    closed_code = _tetra_code(_face_strengths(subsets[refs == -1], mult3))
    q = counts[12:27]
    tau = q + np.bincount(closed_code, minlength=15)
    return Config4Counts(n, _ints(counts[0:3]), _ints(counts[3:6]), _ints(counts[6:12]),
                         _ints(q), _ints(tau))
