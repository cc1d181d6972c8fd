import math
import random
import time

import numpy as np
import pytest

from conftest import make_dataset
from oracles import config3_census, config4_census, random_fixture
from hosim.census import (
    CONFIG3_NAMES,
    CONFIG4_NAMES,
    CensusConsistencyError,
    brute_force_configs,
    count_configs3,
    count_configs4,
)
from hosim.projection import build_incidence, build_projected_graph


def census(ds, arity):
    g, inc = build_projected_graph(ds), build_incidence(ds)
    return count_configs3(g, inc) if arity == 3 else count_configs4(g, inc)


def as_names3(c) -> dict:
    d = dict(zip(CONFIG3_NAMES, c.values()))
    d.update(t111=c.t111, t112=c.t112, t122=c.t122, t222=c.t222)
    return {k: v for k, v in d.items() if v}


def as_names4(c) -> dict:
    d = dict(zip(CONFIG4_NAMES, c.values()))
    d.update({"tau" + name[1:]: t for name, t in zip(CONFIG4_NAMES[12:], c.tau)})
    return {k: v for k, v in d.items() if v}


def test_names_have_reference_order():
    assert len(CONFIG3_NAMES) == 10 and len(CONFIG4_NAMES) == 27
    assert CONFIG4_NAMES[:6] == ("pi0", "pi1", "pi2", "rho0", "rho1", "rho2")
    assert CONFIG4_NAMES[12] == "q0000" and CONFIG4_NAMES[-1] == "q2222"


def test_single_simplex_three():
    c = census(make_dataset([[0, 1, 2]]), 3)
    assert c.t111 == 1 and c.o111 == 0 and c.empty == 0
    assert sum(c.values()) == 0


def test_pairwise_triangle_three():
    c = census(make_dataset([[0, 1], [0, 2], [1, 2]]), 3)
    assert c.o111 == c.t111 == 1


def test_single_simplex_four():
    c = census(make_dataset([[0, 1, 2, 3]]), 4)
    assert sum(c.tau) == 1 and sum(c.q) == 0
    assert c.tau[CONFIG4_NAMES[12:].index("q1111")] == 1


def test_open_wireframe_four():
    c = census(make_dataset([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]), 4)
    assert as_names4(c) == {"q1111": 1, "tau1111": 1}


def test_brute_force_small_cases():
    c = brute_force_configs(make_dataset([], n_nodes=5), 3)
    assert c.empty == math.comb(5, 3) == 10
    c = brute_force_configs(make_dataset([[a, b] for a in range(4) for b in range(a + 1, 4)]), 3)
    assert c.o111 == 4
    with pytest.raises(ValueError):
        brute_force_configs(make_dataset([[0]], n_nodes=41), 3)


@pytest.mark.parametrize("seed", range(20))
def test_fast_equals_pure_python_oracle(seed):
    sims, n = random_fixture(random.Random(seed), n_max=20)
    ds = make_dataset(sims, n_nodes=n)
    assert as_names3(census(ds, 3)) == config3_census(sims, n)
    assert as_names4(census(ds, 4)) == config4_census(sims, n)


def test_conservation_and_bounds(pyrng):
    for _ in range(25):
        sims, n = random_fixture(pyrng)
        ds = make_dataset(sims, n_nodes=n)
        c3 = census(ds, 3)
        assert c3.total() == math.comb(n, 3)
        assert all(o <= t for o, t in zip((c3.o111, c3.o112, c3.o122, c3.o222),
                                          (c3.t111, c3.t112, c3.t122, c3.t222)))
        c4 = census(ds, 4)
        assert all(q <= t for q, t in zip(c4.q, c4.tau))
        assert min(c4.values()) >= 0 and min(c3.values()) >= 0


def test_weighted_graph_with_three_node_simplices(rng):
    n = 25
    sims = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.15:
                sims += [[a, b]] * int(rng.integers(1, 4))
    sims += [rng.choice(n, 3, replace=False).tolist() for _ in range(15)]
    ds = make_dataset(sims, n_nodes=n)
    assert as_names3(census(ds, 3)) == config3_census(sims, n)
    fast, brute = census(ds, 3), brute_force_configs(ds, 3)
    assert fast == brute


def test_append_keeps_census_consistent(pyrng):
    sims, n = random_fixture(pyrng, n_max=15)
    total = None
    for k in range(1, len(sims) + 1):
        ds = make_dataset(sims[:k], n_nodes=n)
        g = build_projected_graph(ds)
        w = int(g.W.sum())
        assert total is None or w >= total
        total = w
        assert census(ds, 3).total() == math.comb(n, 3)


def test_negative_intermediate_raises():
    from hosim.census import _check

    assert _check("w11", 0) == 0
    with pytest.raises(CensusConsistencyError, match="w11"):
        _check("w11", -1)
