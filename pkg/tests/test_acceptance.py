"""The nine acceptance criteria, each reported as one PASS/FAIL/SKIP line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines as they happen;
they are also collected into the terminal summary of any pytest run.
"""

import math
import os
import random
import time
from itertools import combinations

import numpy as np
import pytest
import scipy.sparse as sp

import oracles
from conftest import ACCEPTANCE_LINES, FIG1, make_dataset, random_simplices
from test_census import as_names3, as_names4, census
from hosim.closure import fisher_less, temporal_overlap_census
from hosim.dataset import DatasetSplit, SimplexDataset, filter_max_size, load_dataset, summary_stats
from hosim.egonet import EgonetSample, softmax_loss, train_domain_classifier
from hosim.evaluation import auc_pr, expected_random_ap, relative_auc_pr
from hosim.generative import GenModelParams, exact_open_indicator, expected_open_indicator, sweep
from hosim.prediction import (
    generalized_mean,
    hodge_decompose,
    katz_matrix,
    logistic_loss,
    open_triangles,
    ppr_matrix,
    rank_candidates,
    simplicial_ppr,
)
from hosim.projection import build_projected_graph
from hosim.triangles import fraction_open


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def central_difference(f, x, h=1e-6):
    g = np.zeros_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


# ---------------------------------------------------------------- 1


def test_criterion_1_fig1_fixture():
    copies = [load_dataset(FIG1) for _ in range(21)]
    timings = []
    for ds in copies:
        t0 = time.perf_counter()
        result = fraction_open(ds)
        timings.append(time.perf_counter() - t0)
    ds = copies[0]
    n_open, closed, frac = result
    (tri,) = ds.labels[open_triangles(ds)].tolist()
    tri = sorted(tri)
    ms = 1e3 * float(np.median(timings))
    ok = (n_open, closed, frac) == (1, 7, 0.125) and tri == [1, 5, 8] and ms < 1.0
    report(1, ok, f"{closed} closed, {n_open} open {tri}, fraction_open={frac!r}, "
                  f"median {ms:.3f} ms on a fresh dataset")


# ---------------------------------------------------------------- 2


def test_criterion_2_census_oracle():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches, conservation = 0, 0
    for _ in range(100):
        sims, n = oracles.random_fixture(rng, n_max=30, max_weight=5)
        ds = make_dataset(sims, n_nodes=n)
        c3, c4 = census(ds, 3), census(ds, 4)
        want3 = {k: v for k, v in oracles.config3_census(sims, n).items() if v}
        want4 = {k: v for k, v in oracles.config4_census(sims, n).items() if v}
        mismatches += (as_names3(c3) != want3) + (as_names4(c4) != want4)
        # empty + edges + wedges + all triangles (open and closed)
        conservation += c3.total() != math.comb(n, 3)
    secs = time.perf_counter() - t0
    ok = mismatches == 0 and conservation == 0 and secs < 30
    report(2, ok, f"100 fixtures, {mismatches} census mismatches, {conservation} conservation "
                  f"failures, {secs:.1f} s")


# ---------------------------------------------------------------- 3


def _public(name):
    from hosim.fetch import FetchError, dataset_prefix, fetch_dataset, is_cached

    if not (is_cached(name) or os.environ.get("HOSIM_ONLINE")):
        return None
    try:
        return load_dataset(fetch_dataset(name, timeout=30))
    except FetchError as exc:
        return exc


@pytest.mark.network
def test_criterion_3_public_data():
    enron, school = _public("email-Enron"), _public("contact-primary-school")
    for ds in (enron, school):
        if not isinstance(ds, SimplexDataset):
            why = "not cached; set HOSIM_ONLINE=1 to download" if ds is None else str(ds)
            ACCEPTANCE_LINES.append(f"criterion 3: SKIP - {why}")
            pytest.skip(why)
    t0 = time.perf_counter()
    enron = filter_max_size(enron)
    st = summary_stats(enron)
    n_open = fraction_open(enron)[0]
    fr = temporal_overlap_census(enron).fractions
    school_open = fraction_open(filter_max_size(school))[0]
    secs = time.perf_counter() - t0
    table = (0.008, 0.130, 0.151, 0.711)
    ok = (st.n_nodes == 143 and st.n_unique_simplices == 1542 and n_open == 3317
          and all(abs(a - b) <= 0.001 for a, b in zip(fr, table))
          and school_open == 98621 and secs < 60)
    report(3, ok, f"email-Enron {st.n_nodes} nodes, {st.n_unique_simplices} unique simplices, "
                  f"{n_open} open, overlap {tuple(round(f, 3) for f in fr)}; "
                  f"contact-primary-school {school_open} open; {secs:.1f} s")


# ---------------------------------------------------------------- 4


def _random_adjacency(rng, n, weighted):
    upper = np.triu(rng.random((n, n)) < 0.15, 1)
    w = upper * (rng.integers(1, 6, (n, n)) if weighted else 1)
    w = w + w.T
    for u in range(n):
        if not w[u].any():
            w[u, (u + 1) % n] = w[(u + 1) % n, u] = 1
    return w.astype(float)


def test_criterion_4_linear_algebra():
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    katz_err = ppr_err = 0.0
    for n in (10, 30, 50):
        for weighted in (False, True):
            w = _random_adjacency(rng, n, weighted)
            pattern = w > 0
            beta = 1 / (4 * np.linalg.norm(w, 2))
            k = np.linalg.inv(np.eye(n) - beta * w) - np.eye(n)
            got = katz_matrix(sp.csr_matrix(w), beta).matrix.toarray()
            katz_err = max(katz_err, np.abs(got - k)[pattern].max())
            f = 0.15 * np.linalg.inv(np.eye(n) - 0.85 * w / w.sum(axis=0))
            got = ppr_matrix(sp.csr_matrix(w), 0.85).matrix.toarray()
            ppr_err = max(ppr_err, np.abs(got - f)[pattern].max())
    sppr_err = sum_err = 0.0
    cg_nonzero = 0
    for _ in range(3):
        ds = make_dataset(random_simplices(rng, 25, 50, sizes=(2, 3, 3, 4)))
        ops, s = simplicial_ppr(ds, 0.85)
        dense = 0.15 * np.linalg.inv(np.eye(len(ops.edges)) - 0.85 * ops.P.toarray())
        sppr_err = max(sppr_err, np.abs(s - dense).max())
        grad, curl, harm = hodge_decompose(s, ops)
        scale = np.abs(grad) + np.abs(curl) + np.abs(s)
        sum_err = max(sum_err, (np.abs(grad + curl + harm - s) / np.maximum(scale, 1e-300)).max())
        cg = ops.C @ ops.G
        assert cg.dtype.kind == "i"
        cg_nonzero += cg.count_nonzero()
    secs = time.perf_counter() - t0
    eps = np.finfo(float).eps
    ok = (katz_err <= 1e-8 and ppr_err <= 1e-8 and sppr_err <= 1e-6 and sum_err <= 4 * eps
          and cg_nonzero == 0 and secs < 10)
    report(4, ok, f"Katz {katz_err:.1e}, PPR {ppr_err:.1e}, sPPR {sppr_err:.1e}, "
                  f"component sum error {sum_err / eps:.1f} ulp, C@G nonzeros {cg_nonzero}, "
                  f"{secs:.1f} s")


# ---------------------------------------------------------------- 5


def test_criterion_5_evaluation_identities():
    perfect = auc_pr(np.array([True] * 30 + [False] * 70)).auc_pr
    # the exact expectation of random AP exceeds prevalence by about (1 - pi) H_N / N;
    # at this size that gap is about one standard error of a 1000-shuffle mean
    rng = np.random.default_rng(5)
    n, n_pos = 200_000, 100_000
    labels = np.zeros(n, dtype=bool)
    labels[:n_pos] = True
    aps = np.array([auc_pr(rng.permutation(labels)).auc_pr for _ in range(1000)])
    se = aps.std(ddof=1) / math.sqrt(len(aps))
    z_prev = (aps.mean() - n_pos / n) / se
    z_exact = (aps.mean() - expected_random_ap(n, n_pos)) / se
    w = rng.uniform(0.01, 100, size=(1000, 3))
    ps = np.sort(rng.uniform(-10, 10, size=(1000, 2)), axis=1)
    lo = np.array([generalized_mean(w[i], ps[i, 0])[0] for i in range(1000)])
    hi = np.array([generalized_mean(w[i], ps[i, 1])[0] for i in range(1000)])
    violations = int(np.sum(lo > hi))
    ok = perfect == 1.0 and abs(z_prev) <= 3 and abs(z_exact) <= 3 and violations == 0
    report(5, ok, f"perfect AP {perfect}, random mean {aps.mean():.6f} is {z_prev:+.2f} SE from "
                  f"prevalence and {z_exact:+.2f} SE from the exact expectation, "
                  f"{violations} power-mean violations in 1000 triples")


# ---------------------------------------------------------------- 6


def test_criterion_6_generative_model():
    n, seeds = 200, 20
    bs = [0.8, 1.0, 1.2, 1.4, 1.6, 1.8]
    t0 = time.perf_counter()
    rows = sweep(bs, [n], seeds, threads=os.cpu_count() or 1)
    total = math.comb(n, 3)
    frac, frac_se, open_rate = {}, {}, {}
    for b in bs:
        sel = [r for r in rows if r.b == b]
        f = np.array([r.fraction_open for r in sel])
        frac[b], frac_se[b] = f.mean(), f.std(ddof=1) / math.sqrt(seeds)
        # open triangles equal fraction_open * triangles; recount from the samples
        from hosim.generative import sample_model

        open_rate[b] = np.array([fraction_open(sample_model(GenModelParams(n, b, r.seed)))[0]
                                 for r in sel]) / total
    secs = time.perf_counter() - t0
    monotone = all(frac[b2] <= frac[b1] + 2 * math.hypot(frac_se[b1], frac_se[b2])
                   for b1, b2 in zip(bs, bs[1:]))
    # per-triple binomial bound: the seed mean of X_uvw averages ``seeds`` Bernoulli draws
    binom_ok, exact_ok = True, True
    worst_binom = worst_exact = 0.0
    for b in bs:
        e = expected_open_indicator(n, b)
        z = (open_rate[b].mean() - e) / math.sqrt(e * (1 - e) / seeds)
        worst_binom = max(worst_binom, abs(z))
        se = open_rate[b].std(ddof=1) / math.sqrt(seeds)
        zx = (open_rate[b].mean() - exact_open_indicator(n, b)) / max(se, 1e-300)
        worst_exact = max(worst_exact, abs(zx))
    binom_ok = worst_binom <= 3
    exact_ok = worst_exact <= 3
    ok = monotone and frac[0.8] >= 0.9 and frac[1.8] <= 0.1 and binom_ok and exact_ok and secs < 120
    report(6, ok, f"fraction_open {' '.join(f'{frac[b]:.3f}' for b in bs)} over b={bs}, "
                  f"monotone={monotone}; E[X] worst {worst_binom:.2f} binomial sd from the "
                  f"closed form, {worst_exact:.2f} seed SE from the exact form; {secs:.1f} s")


# ---------------------------------------------------------------- 7


def _fisher_grid(limit):
    cols = [[], [], [], []]
    for n1 in range(1, limit + 1):
        for n2 in range(1, limit + 1):
            x1, x2 = np.mgrid[0:n1 + 1, 0:n2 + 1].reshape(2, -1)
            for c, v in zip(cols, (x1, np.full(len(x1), n1), x2, np.full(len(x1), n2))):
                c.append(v)
    return [np.concatenate(c) for c in cols]


def _fisher_exact(x1, n1, x2, n2):
    """Lower hypergeometric tail by integer summation, one pass per (n1, n2, k)."""
    out = np.empty(len(x1))
    cache = {}
    for j, (a, m1, b, m2) in enumerate(zip(x1.tolist(), n1.tolist(), x2.tolist(), n2.tolist())):
        k = a + b
        key = (m1, m2, k)
        if key not in cache:
            lo = max(0, k - m2)
            terms = [math.comb(m1, i) * math.comb(m2, k - i) for i in range(lo, min(k, m1) + 1)]
            cum, run = [], 0
            for t in terms:
                run += t
                cum.append(run)
            cache[key] = (lo, cum, math.comb(m1 + m2, k))
        lo, cum, denom = cache[key]
        out[j] = cum[a - lo] / denom
    return out


def test_criterion_7_statistical_tests():
    x1, n1, x2, n2 = _fisher_grid(50)
    fisher_err = float(np.abs(fisher_less(x1, n1, x2, n2) - _fisher_exact(x1, n1, x2, n2)).max())
    rng = np.random.default_rng(7)
    x = rng.normal(size=(60, 5))
    y = (rng.random(60) < 0.4).astype(float)
    logit_err = 0.0
    for _ in range(20):
        p = rng.normal(size=6)
        g = logistic_loss(p, x, y, 1.0)[1]
        fd = central_difference(lambda q: logistic_loss(q, x, y, 1.0)[0], p)
        logit_err = max(logit_err, np.linalg.norm(g - fd) / np.linalg.norm(g))
    yk = rng.integers(0, 3, 60)
    soft_err = 0.0
    for _ in range(20):
        p = rng.normal(size=6 * 3)
        g = softmax_loss(p, x, yk, 3, 10.0)[1]
        fd = central_difference(lambda q: softmax_loss(q, x, yk, 3, 10.0)[0], p)
        soft_err = max(soft_err, np.linalg.norm(g - fd) / np.linalg.norm(g))
    ok = fisher_err <= 1e-12 and logit_err <= 1e-5 and soft_err <= 1e-5
    report(7, ok, f"Fisher max error {fisher_err:.1e} over {len(x1)} tables with margins <= 50; "
                  f"gradient relative error logistic {logit_err:.1e}, softmax {soft_err:.1e}")


# ---------------------------------------------------------------- 8


def planted_stream(seed, n=150, p_edge=0.1, p_strong=0.46):
    """Pairwise train stream; open triangles close in test at 0.5 if all ties are strong, else 0.05."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p_edge
    u, v = iu[keep], ju[keep]
    reps = np.where(rng.random(len(u)) < p_strong, rng.integers(2, 4, len(u)), 1)
    train = [[a, b] for a, b, r in zip(u.tolist(), v.tolist(), reps.tolist()) for _ in range(r)]
    rng.shuffle(train)
    tr = SimplexDataset.from_simplices(zip(train, np.sort(rng.random(len(train)))), n_nodes=n)
    g = build_projected_graph(tr)
    tri = open_triangles(tr)
    w = np.column_stack([g.weights(tri[:, a], tri[:, b]) for a, b in ((0, 1), (0, 2), (1, 2))])
    rate = np.where((w >= 2).all(axis=1), 0.5, 0.05)
    test = tri[rng.random(len(tri)) < rate].tolist()
    te = SimplexDataset.from_simplices(zip(test, 1 + np.sort(rng.random(len(test)))), n_nodes=n)
    return DatasetSplit(tr, te, 1.0)


def test_criterion_8_planted_prediction():
    rel, vs_exact = [], []
    for seed in range(10):
        ranked = rank_candidates(planted_stream(seed), "harmonic")
        curve = auc_pr(ranked)
        rel.append(relative_auc_pr(curve))
        vs_exact.append(curve.auc_pr / expected_random_ap(len(ranked), int(ranked.labels.sum())))
    ok = np.mean(rel) >= 3
    report(8, ok, f"harmonic relative AUC-PR mean {np.mean(rel):.2f} (min {min(rel):.2f}) over 10 "
                  f"seeds; {np.mean(vs_exact):.2f} against the exact random expectation")


# ---------------------------------------------------------------- 9


def test_criterion_9_egonet_classifier():
    rng = np.random.default_rng(9)
    samples = []
    for k in range(3):
        # every feature mean shifts by three spreads between consecutive classes
        for j, f in enumerate(rng.normal(3.0 * k, 1.0, size=(100, 3))):
            samples.append(EgonetSample(j, np.zeros(0, dtype=int), f, f"domain{k}", f"set{k}"))
    stats = train_domain_classifier(samples, train_per_dataset=80, trials=20, rng=9)
    ok = stats.mean_accuracy >= 0.95 and len(stats.per_trial) == 20
    report(9, ok, f"mean test accuracy {stats.mean_accuracy:.3f} +- {stats.std:.3f} over 20 trials "
                  f"(80 train / 20 test per class)")
