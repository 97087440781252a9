import itertools

import numpy as np
import pytest

from brownian_replica.errors import DomainError, ResourceError, SizeError
from brownian_replica.graph import (
    Graph,
    canonicalize,
    check_budget,
    compose,
    count_graphs,
    embed_graph,
    enumerate_graphs,
    enumerate_raw,
    gauge_act,
    gauge_orbit,
    graph_from_matching,
    parse,
    serialize,
    sort_key,
    to_dense,
)


def _random_graph(n, rng):
    p = int(rng.integers(0, n + 1))
    tops = rng.permutation(n)[:p]
    bots = rng.permutation(n)[:p]
    return Graph(n, list(zip(tops, bots)), rng.permutation(n), rng.permutation(n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_raw_enumeration_deduplicates_to_counts(n):
    canon = {canonicalize(g) for g in enumerate_raw(n)}
    assert len(canon) == count_graphs(n)
    assert canon == set(enumerate_graphs(n))


def test_count_formula():
    assert [count_graphs(n) for n in range(1, 5)] == [2, 24, 720, 40320]
    assert [count_graphs(3, p) for p in range(4)] == [36, 324, 324, 36]


def test_canonical_is_gauge_minimum(rng):
    for _ in range(200):
        g = _random_graph(4, rng)
        orbit = gauge_orbit(g)
        assert canonicalize(g) == min(orbit, key=sort_key)
        assert all(canonicalize(h) == canonicalize(g) for h in orbit)


@pytest.mark.parametrize("D", [2, 3])
def test_gauge_invariance_of_dense(D, rng):
    for _ in range(20):
        g = _random_graph(3, rng)
        ref = to_dense(g, D)
        for tau in itertools.permutations(range(g.p)):
            assert np.array_equal(to_dense(gauge_act(g, tau), D), ref)


@pytest.mark.parametrize("n,D", [(1, 3), (2, 2), (3, 2)])
def test_identity_trace(n, D):
    assert np.trace(to_dense(Graph.identity(n), D)) == D ** (2 * n)


def test_distinct_graphs_have_distinct_dense_at_large_D():
    mats = {to_dense(g, 4).tobytes() for g in enumerate_graphs(2)}
    assert len(mats) == 24


def test_serialize_round_trip(rng):
    for g in enumerate_graphs(3)[::37]:
        assert parse(serialize(g)) == g
    assert serialize(Graph.identity(2)) == "0:[];s1:[1,2];s2:[1,2]"


def test_matching_round_trip():
    for g in enumerate_graphs(3):
        assert graph_from_matching(3, g.edges()) == g


@pytest.mark.parametrize("n,D", [(2, 2), (2, 3)])
def test_compose_matches_dense_product(n, D, rng):
    graphs = enumerate_graphs(n)
    for _ in range(60):
        g1, g2 = (graphs[int(k)] for k in rng.integers(0, len(graphs), 2))
        g3, loops = compose(g1, g2)
        assert np.array_equal(to_dense(g1, D) @ to_dense(g2, D), D**loops * to_dense(g3, D))


def test_compose_with_identity():
    for g in enumerate_graphs(2):
        assert compose(Graph.identity(2), g) == (g, 0)
        assert compose(g, Graph.identity(2)) == (g, 0)


def test_embed_graph_is_kron_with_identity():
    D = 2
    for g in enumerate_graphs(1):
        big = embed_graph(g, 2, 1)
        assert np.array_equal(to_dense(big, D), np.kron(np.eye(D * D), to_dense(g, D)))


def test_validation():
    with pytest.raises(DomainError):
        Graph(2, [(0, 0), (0, 1)], [0, 1], [0, 1])
    with pytest.raises(SizeError):
        Graph(2, [], [0, 1, 2], [0, 1])
    with pytest.raises(DomainError):
        parse("garbage")
    with pytest.raises(ResourceError):
        check_budget(4, 4, 4096)
    assert check_budget(3, 4, 4096) == 4096
