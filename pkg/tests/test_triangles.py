from itertools import combinations

import numpy as np
import pytest

from conftest import FIG1_SIMPLICES, make_dataset, random_simplices
from oracles import triangles as oracle_triangles
from hosim.projection import build_incidence, build_projected_graph
from hosim.triangles import (
    NoTrianglesError,
    classify_closed,
    closed_mask,
    enumerate_triangles,
    fraction_open,
    triangle_array,
)


def tri_set(ds):
    return {tuple(t.nodes) for t in enumerate_triangles(build_projected_graph(ds))}


def test_k4_and_path():
    assert len(tri_set(make_dataset([[0, 1, 2, 3]]))) == 4
    assert tri_set(make_dataset([[1, 2], [2, 3]])) == set()


def test_random_graph_against_brute_force(rng):
    pairs = [list(p) for p in combinations(range(25), 2) if rng.random() < 0.25]
    ds = make_dataset(pairs)
    g = build_projected_graph(ds)
    got = [tuple(t) for t in triangle_array(g).tolist()]
    assert len(got) == len(set(got))
    expect_open, expect_closed = oracle_triangles(pairs)
    assert set(got) == expect_open | expect_closed


def test_records_carry_weights(fig1):
    g = build_projected_graph(fig1)
    for rec in enumerate_triangles(g):
        u, v, w = rec.nodes
        assert tuple(rec.weights) == (g.weight(u, v), g.weight(u, w), g.weight(v, w))
        assert min(rec.weights) >= 1
        assert rec.closed is None


def test_classify_closed_small():
    ds = make_dataset([[1, 2, 3]])
    assert classify_closed((1, 2, 3), build_incidence(ds))
    ds = make_dataset([[1, 2], [1, 3], [2, 3]])
    assert not classify_closed((1, 2, 3), build_incidence(ds))


def test_fig1_closed_and_open_sets(fig1):
    g = build_projected_graph(fig1)
    inc = build_incidence(fig1)
    lab = fig1.labels
    closed, open_ = set(), set()
    for rec in enumerate_triangles(g):
        name = tuple(sorted(lab[list(rec.nodes)].tolist()))
        (closed if classify_closed(rec.nodes, inc) else open_).add(name)
    assert closed == {(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4), (1, 3, 5), (1, 2, 6), (1, 7, 8)}
    assert open_ == {(1, 5, 8)}
    assert fraction_open(fig1) == (1, 7, 0.125)


def test_fraction_open_edge_cases():
    assert fraction_open(make_dataset([[1, 2, 3]])) == (0, 1, 0.0)
    with pytest.raises(NoTrianglesError):
        fraction_open(make_dataset([[1, 2], [2, 3]]))


def test_counts_match_oracle(rng):
    for _ in range(10):
        sims = random_simplices(rng, 20, 40, sizes=(2, 2, 3, 4, 5))
        ds = make_dataset(sims)
        expect_open, expect_closed = oracle_triangles(sims)
        tri = triangle_array(build_projected_graph(ds))
        mask = closed_mask(ds, tri)
        assert {tuple(t) for t in tri[mask].tolist()} == expect_closed
        assert {tuple(t) for t in tri[~mask].tolist()} == expect_open
        if expect_open or expect_closed:
            n_open, n_closed, _ = fraction_open(ds)
            assert (n_open, n_closed) == (len(expect_open), len(expect_closed))


def test_k_simplex_forces_all_subtriples_closed():
    ds = make_dataset([list(range(6))])
    assert fraction_open(ds) == (0, 20, 0.0)


def test_three_node_restriction_adds_no_closed(rng):
    sims = random_simplices(rng, 15, 40, sizes=(2, 3, 4))
    ds = make_dataset(sims)
    sub = ds.select(ds.sizes == 3)
    tri = triangle_array(build_projected_graph(sub))
    full_closed = {tuple(t) for t in triangle_array(build_projected_graph(ds)).tolist()
                   if closed_mask(ds, np.array([t]))[0]}
    sub_closed = {tuple(t) for t in tri[closed_mask(sub, tri)].tolist()}
    assert sub_closed <= full_closed


def test_bundled_fixture_contents(fig1):
    lab = fig1.labels
    assert [sorted(lab[list(s)].tolist()) for s in fig1.node_sets()] == FIG1_SIMPLICES
    assert fig1.times.tolist() == list(range(1, 9))
