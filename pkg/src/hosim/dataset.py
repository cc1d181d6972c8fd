"""Timestamped simplex datasets: parsing, filtering and temporal splits.

A dataset is an ordered sequence of ``(nodes, time)`` records.  Internally
the node sets are stored in a flat CSR-style layout (``offsets`` into a
``nodes`` array) so that downstream modules can build sparse matrices
without Python-level loops.  All node ids are dense integers; the original
labels are kept in :attr:`SimplexDataset.labels`.

Derived datasets (filtered, split, prefix) share the id space of their
parent, so ``n_nodes`` is the size of the id universe rather than the
number of nodes that happen to appear.  Use :meth:`SimplexDataset.compact`
to re-densify.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO, Union

import numpy as np

TextSource = Union[str, TextIO, Iterable[str]]


class DatasetFormatError(ValueError):
    """Raised when the on-disk dataset files are malformed."""


class DegenerateSplitError(ValueError):
    """Raised when a temporal split would produce an empty side."""


@dataclass(frozen=True)
class TimestampedSimplex:
    nodes: tuple[int, ...]
    time: float


@dataclass(frozen=True, eq=False)
class SimplexDataset:
    """Immutable, time-sorted collection of simplices.

    Parameters
    ----------
    offsets : ndarray of int64, shape (N + 1,)
        ``nodes[offsets[i]:offsets[i + 1]]`` are the (sorted, unique) node
        ids of simplex ``i``.
    nodes : ndarray of int64
        Flat node-id array.
    times : ndarray of float64, shape (N,)
        Non-decreasing timestamps.
    n_nodes : int
        Size of the node-id universe.
    labels : ndarray, shape (n_nodes,)
        Original label of each internal id.
    n_duplicates : int
        Number of repeated node ids removed during ingestion.
    """

    offsets: np.ndarray
    nodes: np.ndarray
    times: np.ndarray
    n_nodes: int
    labels: np.ndarray
    n_duplicates: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_simplices(
        cls,
        records: Iterable[tuple[Iterable[int], float]],
        n_nodes: int | None = None,
        labels: Sequence | np.ndarray | None = None,
    ) -> "SimplexDataset":
        """Build a dataset from ``(nodes, time)`` pairs of internal ids.

        Node ids must already be non-negative integers.  Duplicates within
        a simplex are dropped (and counted); records are stably sorted by
        time.
        """
        sets, times = [], []
        n_dup = 0
        for nodes, t in records:
            raw = [int(v) for v in nodes]
            uniq = sorted(set(raw))
            if not uniq:
                raise ValueError("a simplex needs at least one node")
            if uniq[0] < 0:
                raise ValueError("node ids must be non-negative")
            n_dup += len(raw) - len(uniq)
            sets.append(uniq)
            times.append(float(t))
        return cls._assemble(sets, times, n_nodes, labels, n_dup)

    @classmethod
    def _assemble(cls, sets, times, n_nodes, labels, n_dup):
        times = np.asarray(times, dtype=np.float64)
        order = np.argsort(times, kind="stable")
        sizes = np.fromiter((len(sets[i]) for i in order), dtype=np.int64, count=len(order))
        offsets = np.zeros(len(order) + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        if len(order):
            flat = np.fromiter(
                (v for i in order for v in sets[i]), dtype=np.int64, count=int(offsets[-1])
            )
        else:
            flat = np.zeros(0, dtype=np.int64)
        seen = int(flat.max()) + 1 if flat.size else 0
        if n_nodes is None:
            n_nodes = seen
        elif n_nodes < seen:
            raise ValueError(f"n_nodes={n_nodes} but node id {seen - 1} appears")
        if labels is None:
            labels = np.arange(n_nodes)
        labels = np.asarray(labels)
        if len(labels) != n_nodes:
            raise ValueError("labels must have one entry per node")
        return cls(offsets, flat, times[order], int(n_nodes), labels, int(n_dup))

    # ------------------------------------------------------------------
    # basic access

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[TimestampedSimplex]:
        for i in range(len(self)):
            yield TimestampedSimplex(tuple(self.simplex(i).tolist()), float(self.times[i]))

    def simplex(self, i: int) -> np.ndarray:
        return self.nodes[self.offsets[i] : self.offsets[i + 1]]

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def simplex_index(self) -> np.ndarray:
        """Simplex index of every entry of :attr:`nodes`."""
        if "simplex_index" not in self._cache:
            self._cache["simplex_index"] = np.repeat(np.arange(len(self)), self.sizes)
        return self._cache["simplex_index"]

    def node_sets(self) -> list[tuple[int, ...]]:
        if "node_sets" not in self._cache:
            flat = self.nodes.tolist()
            off = self.offsets.tolist()
            self._cache["node_sets"] = [tuple(flat[off[i] : off[i + 1]]) for i in range(len(self))]
        return self._cache["node_sets"]

    def active_nodes(self) -> np.ndarray:
        """Sorted ids of the nodes appearing in at least one simplex."""
        return np.unique(self.nodes)

    def select(self, mask_or_index) -> "SimplexDataset":
        """Sub-dataset with the chosen simplices, same id space, order kept."""
        idx = np.asarray(mask_or_index)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        idx = np.sort(idx)
        sizes = self.sizes[idx]
        offsets = np.zeros(len(idx) + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        if len(idx):
            flat = self.nodes[_ragged_take(self.offsets, idx, sizes)]
        else:
            flat = np.zeros(0, dtype=np.int64)
        return SimplexDataset(offsets, flat, self.times[idx], self.n_nodes, self.labels, 0)

    def compact(self) -> tuple["SimplexDataset", np.ndarray]:
        """Re-densify ids to the nodes that actually appear.

        Returns the new dataset and ``old_ids`` with ``old_ids[new] = old``.
        """
        old_ids = self.active_nodes()
        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[old_ids] = np.arange(len(old_ids))
        ds = SimplexDataset(
            self.offsets.copy(),
            remap[self.nodes],
            self.times.copy(),
            len(old_ids),
            self.labels[old_ids],
            self.n_duplicates,
        )
        return ds, old_ids

    def relabel(self, new_ids: np.ndarray, n_nodes: int, labels=None) -> "SimplexDataset":
        """Dataset with node ``u`` renamed to ``new_ids[u]`` (must be injective)."""
        nodes = np.asarray(new_ids)[self.nodes]
        return SimplexDataset._from_flat(self.offsets, nodes, self.times, n_nodes, labels)

    @classmethod
    def _from_flat(cls, offsets, nodes, times, n_nodes, labels=None):
        # sorts nodes within each simplex; times assumed already sorted
        out = nodes.copy()
        sizes = np.diff(offsets)
        if len(sizes) and sizes.max() > 1:
            seg = np.repeat(np.arange(len(sizes)), sizes)
            order = np.lexsort((out, seg))
            out = out[order]
        if labels is None:
            labels = np.arange(n_nodes)
        return cls(np.asarray(offsets, dtype=np.int64), out, np.asarray(times, dtype=np.float64),
                   int(n_nodes), np.asarray(labels))

    def restrict_nodes(self, keep: np.ndarray, min_size: int = 1) -> "SimplexDataset":
        """Intersect every simplex with the node set ``keep``.

        Simplices whose intersection has fewer than ``min_size`` nodes are
        dropped.  The id space is unchanged.
        """
        member = np.zeros(self.n_nodes, dtype=bool)
        member[np.asarray(keep, dtype=np.int64)] = True
        hit = member[self.nodes]
        counts = np.bincount(self.simplex_index[hit], minlength=len(self))
        keep_simplex = counts >= min_size
        entry_keep = hit & keep_simplex[self.simplex_index]
        sizes = counts[keep_simplex]
        offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        return SimplexDataset(offsets, self.nodes[entry_keep], self.times[keep_simplex],
                              self.n_nodes, self.labels, 0)


def _ragged_take(offsets, idx, sizes):
    """Flat positions of the entries of the simplices ``idx`` (in that order)."""
    sizes = np.asarray(sizes, dtype=np.int64)
    excl = np.zeros(len(sizes), dtype=np.int64)
    np.cumsum(sizes[:-1], out=excl[1:])
    return np.repeat(offsets[idx] - excl, sizes) + np.arange(int(sizes.sum()))


# ----------------------------------------------------------------------
# parsing


def _lines(src: TextSource) -> list[str]:
    if isinstance(src, str):
        if "\n" not in src and os.path.exists(src):
            with open(src) as fh:
                return fh.read().split()
        return src.split()
    if hasattr(src, "read"):
        return src.read().split()
    return [tok for line in src for tok in str(line).split()]


def _to_ints(tokens: list[str], what: str) -> np.ndarray:
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        for k, t in enumerate(tokens, 1):
            try:
                int(t)
            except ValueError:
                raise DatasetFormatError(f"{what}: line {k}: non-integer token {t!r}") from None
        raise


def _to_floats(tokens: list[str], what: str) -> np.ndarray:
    out = np.empty(len(tokens), dtype=np.float64)
    for k, t in enumerate(tokens):
        try:
            out[k] = float(t)
        except ValueError:
            raise DatasetFormatError(f"{what}: line {k + 1}: non-numeric token {t!r}") from None
    return out


def parse_dataset(nverts_stream: TextSource, simplices_stream: TextSource,
                  times_stream: TextSource) -> SimplexDataset:
    """Parse the three-file text format.

    Line ``k`` of *nverts* is the size of simplex ``k``; *simplices* lists
    the node labels of all simplices one per line, in order; *times* gives
    one timestamp per simplex.  Original labels are mapped to dense ids in
    ascending label order.
    """
    nverts = _to_ints(_lines(nverts_stream), "nverts")
    labels_flat = _to_ints(_lines(simplices_stream), "simplices")
    times = _to_floats(_lines(times_stream), "times")

    if np.any(nverts < 1):
        bad = int(np.flatnonzero(nverts < 1)[0]) + 1
        raise DatasetFormatError(f"nverts: line {bad}: simplex size must be >= 1")
    if len(nverts) != len(times):
        first = min(len(nverts), len(times)) + 1
        raise DatasetFormatError(
            f"times: line {first}: {len(times)} timestamps for {len(nverts)} simplices"
        )
    total = int(nverts.sum())
    if total != len(labels_flat):
        ends = np.cumsum(nverts)
        k = int(np.searchsorted(ends, len(labels_flat), side="left"))
        if total < len(labels_flat):
            raise DatasetFormatError(
                f"simplices: line {total + 1}: nverts sums to {total} but simplices has "
                f"{len(labels_flat)} lines"
            )
        raise DatasetFormatError(
            f"nverts: line {k + 1}: simplex runs past the end of simplices "
            f"({len(labels_flat)} lines, nverts sums to {total})"
        )

    uniq, dense = np.unique(labels_flat, return_inverse=True)
    offsets = np.zeros(len(nverts) + 1, dtype=np.int64)
    np.cumsum(nverts, out=offsets[1:])
    return _from_raw(offsets, dense.astype(np.int64), times, uniq)


def _from_raw(offsets, dense, times, labels) -> SimplexDataset:
    """Sort by time, sort+dedupe within simplices, all vectorized."""
    n = len(times)
    sizes = np.diff(offsets)
    seg = np.repeat(np.arange(n), sizes)
    order = np.lexsort((dense, seg))
    vals, seg = dense[order], seg[order]
    keep = np.ones(len(vals), dtype=bool)
    keep[1:] = (vals[1:] != vals[:-1]) | (seg[1:] != seg[:-1])
    n_dup = int((~keep).sum())
    vals, seg = vals[keep], seg[keep]
    sizes = np.bincount(seg, minlength=n)

    t_order = np.argsort(times, kind="stable")
    if np.any(t_order != np.arange(n)):
        starts = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(sizes, out=starts[1:])
        new_sizes = sizes[t_order]
        take = _ragged_take(starts, t_order, new_sizes)
        vals = vals[take]
        sizes = new_sizes
        times = times[t_order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    return SimplexDataset(offsets, vals, np.asarray(times, dtype=np.float64),
                          len(labels), np.asarray(labels), n_dup)


def _prefix_paths(prefix: str) -> tuple[str, str, str]:
    if os.path.isdir(prefix):
        name = os.path.basename(os.path.normpath(prefix))
        prefix = os.path.join(prefix, name)
    return tuple(f"{prefix}-{kind}.txt" for kind in ("nverts", "simplices", "times"))


def load_dataset(path: str | os.PathLike) -> SimplexDataset:
    """Load a dataset from a three-file prefix, a directory, or a ``.jsonl`` file.

    ``data/email-Enron`` resolves to ``data/email-Enron/email-Enron-*.txt``
    when it is a directory and to ``data/email-Enron-*.txt`` otherwise.
    """
    path = os.fspath(path)
    if path.endswith(".jsonl") or path.endswith(".json"):
        with open(path) as fh:
            return read_jsonl(fh)
    files = _prefix_paths(path)
    missing = [f for f in files if not os.path.exists(f)]
    if missing:
        raise FileNotFoundError(f"dataset files not found: {', '.join(missing)}")
    with open(files[0]) as a, open(files[1]) as b, open(files[2]) as c:
        return parse_dataset(a, b, c)


def write_dataset(ds: SimplexDataset, prefix: str) -> None:
    """Write the three-file format using the original labels."""
    labels = ds.labels
    with open(f"{prefix}-nverts.txt", "w") as fh:
        fh.writelines(f"{k}\n" for k in ds.sizes.tolist())
    with open(f"{prefix}-simplices.txt", "w") as fh:
        fh.writelines(f"{v}\n" for v in labels[ds.nodes].tolist())
    with open(f"{prefix}-times.txt", "w") as fh:
        fh.writelines(f"{_fmt_time(t)}\n" for t in ds.times.tolist())


def _fmt_time(t: float) -> str:
    return str(int(t)) if float(t).is_integer() and abs(t) < 2**53 else repr(t)


def read_jsonl(src: TextSource) -> SimplexDataset:
    """One ``{"nodes": [...], "time": t}`` object per line."""
    if isinstance(src, str) and "\n" not in src and os.path.exists(src):
        with open(src) as fh:
            text = fh.read()
    elif isinstance(src, str):
        text = src
    elif hasattr(src, "read"):
        text = src.read()
    else:
        text = "\n".join(src)
    labels_flat, sizes, times = [], [], []
    for k, line in enumerate(io.StringIO(text), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            nodes = [int(v) for v in rec["nodes"]]
            t = float(rec["time"])
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetFormatError(f"line {k}: {exc}") from None
        if not nodes:
            raise DatasetFormatError(f"line {k}: empty simplex")
        labels_flat.extend(nodes)
        sizes.append(len(nodes))
        times.append(t)
    labels_flat = np.asarray(labels_flat, dtype=np.int64)
    uniq, dense = np.unique(labels_flat, return_inverse=True)
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(np.asarray(sizes, dtype=np.int64), out=offsets[1:])
    return _from_raw(offsets, dense.astype(np.int64), np.asarray(times, dtype=np.float64), uniq)


def write_jsonl(ds: SimplexDataset, fh: TextIO) -> None:
    for s in ds:
        fh.write(json.dumps({"nodes": ds.labels[list(s.nodes)].tolist(), "time": s.time}) + "\n")


# ----------------------------------------------------------------------
# filters and splits


def filter_max_size(ds: SimplexDataset, max_size: int = 25) -> SimplexDataset:
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    return ds.select(ds.sizes <= max_size)


def percentile_time(times: np.ndarray, quantile: float) -> float:
    """Smallest t such that at least ceil(quantile * N) timestamps are <= t."""
    n = len(times)
    if n == 0:
        raise ValueError("no timestamps")
    # round() guards against 0.7 * 10 == 7.000000000000001
    k = max(1, math.ceil(round(quantile * n, 9)))
    return float(np.sort(times)[k - 1])


@dataclass(frozen=True)
class DatasetSplit:
    train: SimplexDataset
    test: SimplexDataset
    split_time: float


def temporal_split(ds: SimplexDataset, quantile: float = 0.8) -> DatasetSplit:
    """Train = simplices with time <= the ``quantile`` timestamp percentile."""
    if not 0 < quantile < 1:
        raise ValueError("quantile must lie in (0, 1)")
    if len(ds) == 0:
        raise ValueError("cannot split an empty dataset")
    t_star = percentile_time(ds.times, quantile)
    in_train = ds.times <= t_star
    if in_train.all():
        if ds.times[0] == ds.times[-1]:
            raise DegenerateSplitError("all timestamps are identical; the test set would be empty")
        raise DegenerateSplitError(
            f"ties at the split time {t_star!r} leave the test set empty"
        )
    return DatasetSplit(ds.select(in_train), ds.select(~in_train), t_star)


def prefix_filter(ds: SimplexDataset, x_percent: float) -> SimplexDataset:
    """Keep the simplices at or before the ``x_percent`` timestamp percentile."""
    if not 0 < x_percent <= 1:
        raise ValueError("x_percent must lie in (0, 1]")
    if len(ds) == 0 or x_percent == 1:
        return ds
    return ds.select(ds.times <= percentile_time(ds.times, x_percent))


@dataclass
class DatasetStats:
    n_nodes: int
    n_simplices: int
    n_unique_simplices: int
    size_histogram: dict[int, int]
    n_duplicates_removed: int = 0

    def as_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "n_simplices": self.n_simplices,
            "n_unique_simplices": self.n_unique_simplices,
            "size_histogram": {str(k): v for k, v in sorted(self.size_histogram.items())},
            "n_duplicates_removed": self.n_duplicates_removed,
        }


def unique_simplices(ds: SimplexDataset) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Distinct node sets and how many times each occurs."""
    if "unique" not in ds._cache:
        counts: dict[tuple[int, ...], int] = {}
        for s in ds.node_sets():
            counts[s] = counts.get(s, 0) + 1
        ds._cache["unique"] = (list(counts), np.fromiter(counts.values(), dtype=np.int64,
                                                          count=len(counts)))
    return ds._cache["unique"]


def summary_stats(ds: SimplexDataset) -> DatasetStats:
    if len(ds) == 0:
        return DatasetStats(0, 0, 0, {}, ds.n_duplicates)
    sets, _ = unique_simplices(ds)
    sizes, counts = np.unique(ds.sizes, return_counts=True)
    return DatasetStats(
        n_nodes=len(ds.active_nodes()),
        n_simplices=len(ds),
        n_unique_simplices=len(sets),
        size_histogram={int(k): int(c) for k, c in zip(sizes, counts)},
        n_duplicates_removed=ds.n_duplicates,
    )
