"""Independent 3-node simplex model: expectations, sampling, patching, sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dataset import SimplexDataset, _ragged_take
from .projection import build_projected_graph, graph_metrics
from .triangles import NoTrianglesError, fraction_open

# triple-level Bernoulli pass when C(n, 3) is at most this, otherwise binomial + choice
_DENSE_LIMIT = 5_000_000


@dataclass(frozen=True)
class GenModelParams:
    n: int
    b: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("the model needs n >= 3")
        if not self.b > 0:
            raise ValueError("b must be positive")

    @property
    def p(self) -> float:
        return float(self.n) ** (-self.b)


def expected_open_indicator(n: int, b: float) -> float:
    """Large-n approximation ``(1 - (1 - n^-b)^n)^3`` of P(a triple is open)."""
    p = float(n) ** (-b)
    return (1.0 - (1.0 - p) ** n) ** 3


def exact_open_indicator(n: int, b: float) -> float:
    """Exact P(a given triple is open) at finite ``n``.

    The triple itself must be absent and each of its three pairs must be
    covered by one of the ``n - 3`` other triples through it; those sets
    are disjoint, hence independent.
    """
    p = float(n) ** (-b)
    return (1.0 - p) * (1.0 - (1.0 - p) ** (n - 3)) ** 3


def model_rng(params: GenModelParams) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``(seed, n, b)``."""
    key = np.random.SeedSequence([params.seed, params.n, int(round(params.b * 1000))])
    return np.random.Generator(np.random.Philox(key))


def unrank_triples(idx: np.ndarray, n: int) -> np.ndarray:
    """Colexicographic unranking: index ``r`` -> ``a < b < c`` with ``r = C(c,3) + C(b,2) + a``."""
    idx = np.asarray(idx, dtype=np.int64)
    x = np.arange(n + 1, dtype=np.int64)
    c3 = x * (x - 1) * (x - 2) // 6
    c2 = x * (x - 1) // 2
    c = np.searchsorted(c3, idx, side="right") - 1
    r = idx - c3[c]
    b = np.searchsorted(c2, r, side="right") - 1
    a = r - c2[b]
    return np.column_stack([a, b, c])


def sample_model(params: GenModelParams) -> SimplexDataset:
    """Each of the C(n, 3) triples becomes one simplex with probability ``n^-b``.

    Timestamps are the draw order.
    """
    rng = model_rng(params)
    n, p = params.n, params.p
    total = math.comb(n, 3)
    if total <= _DENSE_LIMIT:
        idx = np.flatnonzero(rng.random(total) < p)
    else:
        k = int(rng.binomial(total, p))
        idx = rng.choice(total, size=k, replace=False)
    tri = unrank_triples(idx, n)
    offsets = np.arange(0, 3 * len(tri) + 1, 3, dtype=np.int64)
    return SimplexDataset(offsets, tri.ravel(), np.arange(len(tri), dtype=np.float64),
                          n, np.arange(n))


def replicate_patch(ds: SimplexDataset, c: int) -> SimplexDataset:
    """Disjoint union of ``c`` relabeled copies (copy ``k`` shifts ids by ``k * n``)."""
    if c < 1:
        raise ValueError("c must be >= 1")
    n, size = ds.n_nodes, len(ds)
    nodes = np.concatenate([ds.nodes + k * n for k in range(c)])
    times = np.tile(ds.times, c)
    sizes = np.tile(ds.sizes, c)
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    # interleave copies so times stay sorted: simplex i of every copy, then i + 1, ...
    order = (np.arange(c)[None, :] * size + np.arange(size)[:, None]).ravel()
    new_sizes = sizes[order]
    flat = nodes[_ragged_take(offsets, order, new_sizes)] if len(order) else nodes
    new_offsets = np.zeros(len(order) + 1, dtype=np.int64)
    np.cumsum(new_sizes, out=new_offsets[1:])
    return SimplexDataset(new_offsets, flat, times[order], c * n, np.arange(c * n))


def offdiag_patched_density(rho: float, n: int, c: int) -> float:
    """Density of ``c`` patched copies as the closed form ``c rho (C(n,2)-n) / (C(nc,2)-nc)``.

    Kept for comparison; the exact value is :func:`patched_density`.
    """
    return c * rho * (math.comb(n, 2) - n) / (math.comb(n * c, 2) - n * c)


def patched_density(rho: float, n: int, c: int) -> float:
    """Exact density of ``c`` disjoint copies: ``c rho C(n,2) / C(nc,2)``, about ``rho / c``."""
    return c * rho * math.comb(n, 2) / math.comb(n * c, 2)


@dataclass(frozen=True)
class SweepRow:
    n: int
    b: float
    seed: int
    fraction_open: float
    density: float
    avg_degree: float
    n_simplices: int


def sample_row(params: GenModelParams) -> SweepRow:
    ds = sample_model(params)
    try:
        frac = fraction_open(ds)[2]
    except NoTrianglesError:
        frac = math.nan
    density, avg_deg = graph_metrics(build_projected_graph(ds))
    return SweepRow(params.n, params.b, params.seed, frac, density, avg_deg, len(ds))


def sweep(b_grid: Iterable[float], n_grid: Iterable[int], seeds: int | Iterable[int],
          threads: int = 1) -> list[SweepRow]:
    """One row per ``(n, b, seed)``; each row draws from its own RNG stream."""
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    grid = [GenModelParams(int(n), float(b), s) for n in n_grid for b in b_grid for s in seed_list]
    if not grid:
        raise ValueError("empty sweep grid")
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(sample_row, grid))
    return [sample_row(p) for p in grid]


def b_range(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive grid ``lo, lo + step, ..., hi`` rounded to the step's precision."""
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    digits = max(0, -int(math.floor(math.log10(step))) + 1)
    return [round(lo + k * step, digits) for k in range(count)]
