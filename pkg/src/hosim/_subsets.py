"""Vectorized enumeration of k-subsets of simplices and integer set keys."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np


@lru_cache(maxsize=None)
def _position_template(size: int, k: int) -> np.ndarray:
    return np.array(list(combinations(range(size), k)), dtype=np.int64).reshape(-1, k)


def simplex_subsets(offsets: np.ndarray, nodes: np.ndarray, k: int,
                    which: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """All k-subsets of the chosen simplices.

    Nodes inside each simplex are sorted, so every row of the result is a
    sorted k-tuple.  Returns ``(rows, simplex_ids)``.
    """
    sizes = np.diff(offsets)
    ids = np.arange(len(sizes)) if which is None else np.asarray(which)
    ids = ids[sizes[ids] >= k]
    rows, owners = [], []
    for size in np.unique(sizes[ids]):
        grp = ids[sizes[ids] == size]
        block = nodes[offsets[grp][:, None] + np.arange(size)]
        tmpl = _position_template(int(size), k)
        rows.append(block[:, tmpl].reshape(-1, k))
        owners.append(np.repeat(grp, len(tmpl)))
    if not rows:
        return np.zeros((0, k), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(rows), np.concatenate(owners)


def encode(rows: np.ndarray, n: int) -> np.ndarray:
    """Pack sorted integer tuples into sortable keys.

    Mixed-radix int64 when it fits, otherwise a raw-bytes view (equality
    and sorting still work, numeric order does not).
    """
    k = rows.shape[1]
    if n > 1 and k * np.log2(n) >= 62:
        packed = np.ascontiguousarray(rows, dtype=np.int64)
        return packed.view(np.dtype((np.void, 8 * k))).ravel()
    key = np.zeros(len(rows), dtype=np.int64)
    for j in range(k):
        key = key * n + rows[:, j]
    return key


class KeyCounter:
    """Multiset of sorted k-tuples supporting vectorized count lookups."""

    def __init__(self, rows: np.ndarray, n: int, weights: np.ndarray | None = None):
        self.n = n
        keys = encode(rows, n)
        if weights is None:
            self.keys, self.counts = np.unique(keys, return_counts=True)
        else:
            order = np.argsort(keys, kind="stable")
            keys, weights = keys[order], np.asarray(weights)[order]
            self.keys, first = np.unique(keys, return_index=True)
            self.counts = np.add.reduceat(weights, first) if len(keys) else weights[:0]

    def __len__(self) -> int:
        return len(self.keys)

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        if len(self.keys) == 0 or len(rows) == 0:
            return np.zeros(len(rows), dtype=np.int64)
        q = encode(rows, self.n)
        pos = np.searchsorted(self.keys, q)
        pos = np.minimum(pos, len(self.keys) - 1)
        hit = self.keys[pos] == q
        return np.where(hit, self.counts[pos], 0)


def subset_multiplicity(ds, k: int) -> KeyCounter:
    """Number of simplices containing each k-subset that occurs in ``ds``.

    Repeated simplices are enumerated once and weighted by multiplicity.
    Cached on the dataset.
    """
    key = f"subset_mult_{k}"
    if key not in ds._cache:
        from .dataset import unique_simplices

        sets, counts = unique_simplices(ds)
        sizes = np.fromiter((len(s) for s in sets), dtype=np.int64, count=len(sets))
        offsets = np.zeros(len(sets) + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        flat = np.fromiter((v for s in sets for v in s), dtype=np.int64, count=int(offsets[-1]))
        rows, owner = simplex_subsets(offsets, flat, k)
        ds._cache[key] = KeyCounter(rows, max(ds.n_nodes, 1), counts[owner])
    return ds._cache[key]
