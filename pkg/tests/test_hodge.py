import numpy as np
import pytest

from conftest import make_dataset, random_simplices
from hosim.prediction import (
    MissingEdgeError,
    build_hodge,
    hodge_decompose,
    hodge_operators,
    simplicial_ppr,
    sppr_triple_scores,
)
from hosim.prediction.hodge import sppr_columns, triple_edge_pairs
from hosim.prediction.paths import IsolatedNodeError


def dense_s(ops, alpha=0.85):
    m = len(ops.edges)
    return (1 - alpha) * np.linalg.inv(np.eye(m) - alpha * ops.P.toarray())


def test_single_closed_triangle_operators():
    ops = build_hodge(make_dataset([[0, 1, 2]]))
    assert ops.edges.tolist() == [[0, 1], [0, 2], [1, 2]]
    assert ops.C.toarray().tolist() == [[1, -1, 1]]
    assert ops.G.toarray().tolist() == [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]]
    assert not (ops.C @ ops.G).toarray().any()
    assert ops.M.diagonal().tolist() == [3.0, 3.0, 3.0]
    assert ops.D.diagonal().tolist() == [2.0, 2.0, 2.0]


def test_no_triangles_reduces_to_gradient_part():
    ops = build_hodge(make_dataset([[0, 1], [1, 2], [2, 3], [0, 3]]))
    g = ops.G.toarray().astype(float)
    d = np.diag(ops.D.diagonal())
    expect = g @ np.linalg.inv(d) @ g.T / 2.0
    assert ops.C.shape[0] == 0
    assert np.allclose(ops.M.diagonal(), 2.0)
    assert np.allclose(ops.L.toarray(), expect, atol=1e-15)
    assert np.allclose(ops.P.toarray(), 0.5 * (np.eye(len(g)) - expect), atol=1e-15)


def test_curl_of_gradient_vanishes(rng):
    for _ in range(5):
        ds = make_dataset(random_simplices(rng, 20, 40, sizes=(2, 3, 3, 4)))
        ops = build_hodge(ds)
        cg = ops.C @ ops.G
        assert cg.dtype.kind == "i" and cg.count_nonzero() == 0


def test_six_node_fixture_matches_dense_solve():
    ds = make_dataset([[0, 1, 2], [2, 3, 4], [0, 5], [4, 5], [1, 3], [0, 4]])
    ops, s = simplicial_ppr(ds, 0.85)
    assert len(ops.triangles) == 2
    assert np.abs(s - dense_s(ops)).max() <= 1e-6


def test_random_complex_matches_dense_solve(rng):
    ds = make_dataset(random_simplices(rng, 25, 50, sizes=(2, 3, 3, 4)))
    ops, s = simplicial_ppr(ds)
    assert np.abs(s - dense_s(ops)).max() <= 1e-6


def test_missing_edge_and_isolated_vertex():
    ops = build_hodge(make_dataset([[0, 1, 2], [2, 3]]))
    with pytest.raises(MissingEdgeError, match=r"\(0, 3\)"):
        ops.edge_id([0], [3])
    with pytest.raises(IsolatedNodeError):
        hodge_operators(np.array([[0, 1]]), np.zeros((0, 3)), vertices=np.array([0, 1, 2]))
    with pytest.raises(ValueError):
        next(sppr_columns(ops, [0], alpha=0.0))


def test_decomposition_sums_exactly_and_is_orthogonal(rng):
    ds = make_dataset(random_simplices(rng, 20, 45, sizes=(2, 3, 3, 4)))
    ops, s = simplicial_ppr(ds)
    grad, curl, harm = hodge_decompose(s, ops)
    # harm is the residual, so the sum is s up to the rounding of two additions
    scale = np.abs(grad) + np.abs(curl) + np.abs(s)
    assert np.all(np.abs(grad + curl + harm - s) <= 4 * np.finfo(float).eps * scale)
    for a, b in ((grad, curl), (grad, harm), (curl, harm)):
        for k in range(s.shape[1]):
            x, y = a[:, k], b[:, k]
            assert abs(x @ y) <= 1e-3 * np.linalg.norm(x) * np.linalg.norm(y) + 1e-12


def test_decomposition_range_cases(rng):
    ds = make_dataset([[0, 1, 2], [1, 2, 3], [3, 4], [4, 0], [2, 4]])
    ops = build_hodge(ds)
    g = ops.G.toarray().astype(float)
    ct = ops.C.T.toarray().astype(float)
    v = g @ rng.normal(size=g.shape[1])
    grad, curl, harm = hodge_decompose(v, ops)
    assert np.linalg.norm(curl) <= 1e-3 * np.linalg.norm(v)
    assert np.linalg.norm(harm) <= 1e-3 * np.linalg.norm(v)
    basis = np.hstack([g, ct])
    q, _ = np.linalg.qr(basis)
    w = rng.normal(size=len(v))
    w -= q @ (q.T @ w)
    assert np.linalg.norm(w) > 0.1
    grad, curl, harm = hodge_decompose(w, ops)
    assert np.linalg.norm(harm - w) <= 1e-3 * np.linalg.norm(w)


def test_triple_score_uses_six_ordered_pairs(rng):
    ds = make_dataset([[0, 1], [0, 2], [1, 2], [1, 2, 3], [0, 3]])
    ops, s = simplicial_ppr(ds)
    t = np.array([[0, 1, 2]])
    pairs = triple_edge_pairs(ops, t)[0]
    assert len({tuple(p) for p in pairs.tolist()}) == 6
    expect = sum(abs(s[e, f]) for e, f in pairs)
    assert sppr_triple_scores(ops, t)[0] == pytest.approx(expect, rel=1e-10)
    a = ops.edge_id([0], [1])[0]
    b = ops.edge_id([0], [2])[0]
    c = ops.edge_id([1], [2])[0]
    off = sum(abs(s[x, y]) for x in (a, b, c) for y in (a, b, c) if x != y)
    assert expect == pytest.approx(off, rel=1e-14)


def test_component_triple_scores(rng):
    ds = make_dataset([[0, 1], [0, 2], [1, 2], [1, 2, 3], [0, 3], [2, 3, 4], [0, 4]])
    ops, s = simplicial_ppr(ds)
    t = np.array([[0, 1, 2]])
    pairs = triple_edge_pairs(ops, t)[0]
    parts = dict(zip(("grad", "curl", "harm"), hodge_decompose(s, ops)))
    for name, part in parts.items():
        expect = sum(abs(part[e, f]) for e, f in pairs)
        got = sppr_triple_scores(ops, t, component=name)[0]
        assert got == pytest.approx(expect, rel=1e-6, abs=1e-9)
