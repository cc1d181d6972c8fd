"""Simplicial closure: lifecycles, closure probabilities, tests, temporal asynchrony."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from ._subsets import simplex_subsets, subset_multiplicity
from .census import (
    CONFIG3_NAMES,
    CONFIG4_NAMES,
    config3_refs,
    config4_refs,
    count_configs3,
    count_configs4,
)
from .dataset import DatasetSplit, SimplexDataset, prefix_filter, temporal_split
from .projection import build_incidence, build_projected_graph
from .triangles import closed_mask, triangle_array

SIGNIFICANCE = 1e-5
LOW_SUPPORT = 25


class LifecycleState(IntEnum):
    """States of a node triple; values 1-10 coincide with 3-node config refs."""

    EMPTY = 1
    EDGE_WEAK = 2
    EDGE_STRONG = 3
    WEDGE_11 = 4
    WEDGE_12 = 5
    WEDGE_22 = 6
    OPEN_111 = 7
    OPEN_112 = 8
    OPEN_122 = 9
    OPEN_222 = 10
    CLOSED = 11


def _state_of(weights: Sequence[int], closed: bool) -> LifecycleState:
    if closed:
        return LifecycleState.CLOSED
    s = [min(w, 2) for w in weights if w > 0]
    n_strong = s.count(2)
    base = {0: 1, 1: 2, 2: 4, 3: 7}[len(s)]
    return LifecycleState(base + n_strong)


def lifecycle_trace(triple: Iterable[int], ds: SimplexDataset) -> list[tuple[float, LifecycleState]]:
    """State changes of one triple as the simplices arrive in time order.

    The first entry is ``(-inf, EMPTY)``; the trace stops at ``CLOSED``.
    """
    u, v, w = sorted(int(x) for x in triple)
    pair_index = {(u, v): 0, (u, w): 1, (v, w): 2}
    hit = np.isin(ds.nodes, [u, v, w])
    touched = np.bincount(ds.simplex_index[hit], minlength=len(ds))
    weights = [0, 0, 0]
    trace = [(-math.inf, LifecycleState.EMPTY)]
    for i in np.flatnonzero(touched >= 2):
        members = sorted(set(ds.simplex(i).tolist()) & {u, v, w})
        closed = len(members) == 3
        if not closed:
            weights[pair_index[tuple(members)]] += 1
        state = _state_of(weights, closed)
        if state != trace[-1][1]:
            trace.append((float(ds.times[i]), state))
        if closed:
            break
    return trace


def lifecycle_transitions(ds: SimplexDataset, triples: Iterable[Iterable[int]]) -> Counter:
    """Counts of ``(from_state, to_state)`` steps over the given triples."""
    out: Counter = Counter()
    for t in triples:
        states = [s for _, s in lifecycle_trace(t, ds)]
        out.update(zip(states[:-1], states[1:]))
    return out


# ----------------------------------------------------------------------
# closure probabilities


@dataclass(frozen=True)
class ClosureTable:
    """Open instances ``n`` and test-set closures ``x`` per configuration ref."""

    arity: int
    n: np.ndarray
    x: np.ndarray

    @property
    def names(self) -> tuple[str, ...]:
        return CONFIG3_NAMES if self.arity == 3 else CONFIG4_NAMES

    @property
    def refs(self) -> np.ndarray:
        return np.arange(1, len(self.n) + 1)

    @property
    def probability(self) -> np.ndarray:
        """``x / n``; NaN where a configuration has no open instance."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.n > 0, self.x / np.maximum(self.n, 1), np.nan)

    def low_support(self, threshold: int = LOW_SUPPORT) -> np.ndarray:
        return self.n < threshold

    def counts(self, ref: int) -> tuple[int, int]:
        return int(self.x[ref - 1]), int(self.n[ref - 1])

    def rows(self) -> list[dict]:
        p = self.probability
        low = self.low_support()
        return [
            {"ref": int(r), "config": name, "n": int(n), "x": int(x),
             "probability": None if np.isnan(pr) else float(pr), "low_support": bool(lo)}
            for r, name, n, x, pr, lo in zip(self.refs, self.names, self.n, self.x, p, low)
        ]


def closure_probabilities(split: DatasetSplit, arity: int = 3) -> ClosureTable:
    """Probability that each open train configuration closes in the test set.

    Instance counts come from the census of the (re-densified) train data;
    closures from scanning the distinct ``arity``-subsets of test simplices,
    each credited once to its train configuration.  Subsets containing a node
    that never appears in train have no train configuration and are skipped.
    """
    if arity not in (3, 4):
        raise ValueError("arity must be 3 or 4")
    train, old_ids = split.train.compact()
    g = build_projected_graph(train)
    inc = build_incidence(train)
    census = count_configs3(g, inc) if arity == 3 else count_configs4(g, inc)
    n_c = np.asarray(census.values(), dtype=np.int64)

    remap = np.full(split.test.n_nodes, -1, dtype=np.int64)
    remap[old_ids] = np.arange(len(old_ids))
    rows, _ = simplex_subsets(split.test.offsets, split.test.nodes, arity)
    rows = remap[rows]
    rows = rows[(rows >= 0).all(axis=1)]
    # compact() preserves id order, so rows stay sorted
    rows = np.unique(rows, axis=0) if len(rows) else rows.reshape(0, arity)

    mult3 = subset_multiplicity(train, 3)
    if arity == 3:
        refs = config3_refs(g, mult3, rows)
    else:
        refs = config4_refs(g, mult3, subset_multiplicity(train, 4), rows)
    x_c = np.bincount(refs[refs > 0], minlength=len(n_c) + 1)[1:]
    if np.any(x_c > n_c):
        raise RuntimeError("closure count exceeds the open-instance count")
    return ClosureTable(arity, n_c, x_c)


def closure_over_time(ds: SimplexDataset, x_grid: Iterable[float], arity: int = 3,
                      quantile: float = 0.8) -> list[tuple[float, ClosureTable]]:
    """Closure tables on the first ``X`` fraction of the data, for each ``X``."""
    out = []
    for x in x_grid:
        sub = prefix_filter(ds, x)
        out.append((float(x), closure_probabilities(temporal_split(sub, quantile), arity)))
    return out


# ----------------------------------------------------------------------
# hypothesis tests


@dataclass(frozen=True)
class TestResult:
    """One-sided test of ``x_c / n_c < x_c' / n_c'``."""

    __test__ = False  # keep pytest from collecting this class

    c: int
    c_prime: int
    p_value: float
    method: str  # "fisher" or "z"

    def significant_at(self, alpha: float = SIGNIFICANCE) -> bool:
        return self.p_value < alpha


def fisher_less(x1, n1, x2, n2):
    """Exact one-sided p-value that the first rate is smaller.

    With all margins fixed, ``x1`` is hypergeometric; the p-value is its
    lower tail.  Array arguments broadcast and give an array back.
    """
    x1, n1, x2, n2 = (np.asarray(a) for a in (x1, n1, x2, n2))
    p = np.minimum(1.0, stats.hypergeom.cdf(x1, n1 + n2, x1 + x2, n1))
    return float(p) if p.ndim == 0 else p


def z_upper(x1: int, n1: int, x2: int, n2: int) -> float:
    """One-sample z-test with the first rate as the null value."""
    p0 = x1 / n1
    diff = x2 / n2 - p0
    sd = math.sqrt(p0 * (1 - p0) / n2)
    if sd == 0:
        return 0.0 if diff > 0 else (0.5 if diff == 0 else 1.0)
    return float(stats.norm.sf(diff / sd))


def compare_counts(x1: int, n1: int, x2: int, n2: int) -> tuple[float, str]:
    if n1 <= 0 or n2 <= 0:
        raise ValueError("both configurations need at least one open instance")
    if max(x1, x2) <= 5:
        return fisher_less(x1, n1, x2, n2), "fisher"
    return z_upper(x1, n1, x2, n2), "z"


def compare_closure(c: int, c_prime: int, table: ClosureTable) -> TestResult:
    """Test whether configuration ``c`` closes less often than ``c_prime``."""
    x1, n1 = table.counts(c)
    x2, n2 = table.counts(c_prime)
    if n1 == 0 or n2 == 0:
        raise ValueError(f"configuration {c if n1 == 0 else c_prime} has no open instances")
    p, method = compare_counts(x1, n1, x2, n2)
    return TestResult(c, c_prime, p, method)


# 3-node refs: 1 E, 2 eta1, 3 eta2, 4 w11, 5 w12, 6 w22, 7 o111, 8 o112, 9 o122, 10 o222
DENSITY_PAIRS = ((1, 2), (2, 4), (3, 5), (4, 7), (5, 8), (6, 9))
TIE_STRENGTH_PAIRS = ((2, 3), (4, 5), (5, 6), (7, 8), (8, 9), (9, 10))


def comparison_table(table: ClosureTable, pairs=DENSITY_PAIRS + TIE_STRENGTH_PAIRS,
                     min_support: int = LOW_SUPPORT) -> list[TestResult]:
    """Tests for each pair, skipping pairs with fewer than ``min_support`` instances."""
    out = []
    for c, c2 in pairs:
        if table.n[c - 1] >= min_support and table.n[c2 - 1] >= min_support:
            out.append(compare_closure(c, c2, table))
    return out


# ----------------------------------------------------------------------
# temporal asynchrony


@dataclass(frozen=True)
class ActiveInterval:
    lo: float
    hi: float

    def overlaps(self, other: "ActiveInterval") -> bool:
        return max(self.lo, other.lo) <= min(self.hi, other.hi)


def active_intervals(ds: SimplexDataset) -> tuple[np.ndarray, np.ndarray]:
    """First and last time each projected edge is witnessed, in ``ProjectedGraph.edges`` order."""
    g = build_projected_graph(ds)
    pairs, owner = simplex_subsets(ds.offsets, ds.nodes, 2)
    e = g.edge_index(pairs[:, 0], pairs[:, 1])
    t = ds.times[owner]
    lo = np.full(g.m, np.inf)
    hi = np.full(g.m, -np.inf)
    np.minimum.at(lo, e, t)
    np.maximum.at(hi, e, t)
    return lo, hi


@dataclass(frozen=True)
class OverlapCensus:
    n_open: int
    counts: tuple[int, int, int, int]

    @property
    def fractions(self) -> tuple[float, ...]:
        if self.n_open == 0:
            return (math.nan,) * 4
        return tuple(c / self.n_open for c in self.counts)

    def as_dict(self) -> dict:
        return {"open_triangles": self.n_open, "counts": list(self.counts),
                "fractions": list(self.fractions)}


def temporal_overlap_census(ds: SimplexDataset) -> OverlapCensus:
    """For each open triangle, how many of its three edge pairs have overlapping active intervals."""
    g = build_projected_graph(ds)
    tri = triangle_array(g)
    tri = tri[~closed_mask(ds, tri)]
    lo, hi = active_intervals(ds)
    e = np.column_stack([g.edge_index(tri[:, a], tri[:, b]) for a, b in ((0, 1), (0, 2), (1, 2))])
    elo, ehi = lo[e], hi[e]
    n_overlap = np.zeros(len(tri), dtype=np.int64)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        n_overlap += np.maximum(elo[:, a], elo[:, b]) <= np.minimum(ehi[:, a], ehi[:, b])
    full = n_overlap == 3
    # Helly in one dimension: pairwise-overlapping intervals share a point
    assert np.all(elo[full].max(axis=1, initial=-np.inf) <= ehi[full].min(axis=1, initial=np.inf))
    counts = np.bincount(n_overlap, minlength=4)
    return OverlapCensus(len(tri), tuple(int(c) for c in counts))
