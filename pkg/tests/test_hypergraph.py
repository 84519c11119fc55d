import random

import numpy as np
import pytest

from cmslab.hashspace import Uniform, build_hypergraph, plan_cardinalities
from cmslab.hypergraph import (
    THRESHOLD_K2, THRESHOLD_K3, THRESHOLD_K4, THRESHOLD_MIXED_3_14, THRESHOLD_MIXED_3_21,
    HashHypergraph, is_peelable, load_factor, peel,
)


def naive_residual(n, edges):
    """Rescan all vertices until none has degree exactly one."""
    alive = set(range(len(edges)))
    changed = True
    while changed:
        changed = False
        for v in range(n):
            inc = [e for e in alive if v in edges[e]]
            if len(inc) == 1:
                alive.discard(inc[0])
                changed = True
    return alive


def random_order_residual(n, edges, rng):
    alive = set(range(len(edges)))
    while True:
        cands = [v for v in range(n) if sum(v in edges[e] for e in alive) == 1]
        if not cands:
            return alive
        v = rng.choice(cands)
        alive.discard(next(e for e in alive if v in edges[e]))


def random_graph(rng, n_max=50, m_max=60, k_max=4):
    n = rng.randint(1, n_max)
    m = rng.randint(0, m_max)
    edges = [tuple(sorted({rng.randrange(n) for _ in range(rng.randint(1, k_max))})) for _ in range(m)]
    return n, edges


def has_cycle(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if len(e) == 1:
            continue
        a, b = find(e[0]), find(e[1])
        if a == b:
            return True
        parent[a] = b
    return False


def test_empty_graph():
    r = peel(HashHypergraph.from_edges(3, []))
    assert r.residual == frozenset() and r.peel_order == () and r.peelable


def test_three_cycle():
    g = HashHypergraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert peel(g).residual == {0, 1, 2}
    assert not is_peelable(g)


def test_single_edge():
    assert is_peelable(HashHypergraph.from_edges(2, [(0, 1)]))


def test_tie_break_ascending():
    # vertices 0 and 3 both have degree one at the start; 0 goes first
    g = HashHypergraph.from_edges(4, [(1, 3), (0, 1, 2)])
    r = peel(g)
    assert r.peel_order == (1, 0)
    assert r.depth == {1: 0, 0: 1}


@pytest.mark.parametrize("n, m, expected", [(1000, 818, 0.818), (10, 0, 0.0), (4, 6, 1.5)])
def test_load_factor(n, m, expected):
    g = HashHypergraph.from_edges(n, [(0,)] * m)
    assert load_factor(g) == expected


def test_thresholds():
    assert (THRESHOLD_K2, THRESHOLD_K3, THRESHOLD_K4) == (0.5, 0.818, 0.772)
    assert THRESHOLD_MIXED_3_14 == 0.898 and THRESHOLD_MIXED_3_21 == 0.920


def test_report_invariants_and_naive_agreement():
    rng = random.Random(11)
    for _ in range(200):
        n, edges = random_graph(rng)
        r = peel(HashHypergraph.from_edges(n, edges))
        assert set(r.peel_order) | r.residual == set(range(len(edges)))
        assert not set(r.peel_order) & r.residual
        assert len(set(r.peel_order)) == len(r.peel_order)
        assert all(r.depth[e] == i for i, e in enumerate(r.peel_order))
        assert r.residual == naive_residual(n, edges)
        assert r.peelable == (not r.residual)


def test_residual_independent_of_order():
    rng = random.Random(5)
    for _ in range(200):
        n, edges = random_graph(rng, m_max=40)
        expected = peel(HashHypergraph.from_edges(n, edges)).residual
        assert random_order_residual(n, edges, rng) == expected


def test_adding_edge_never_shrinks_residual():
    rng = random.Random(8)
    for _ in range(200):
        n, edges = random_graph(rng, m_max=30)
        before = peel(HashHypergraph.from_edges(n, edges)).residual
        extra = tuple(sorted({rng.randrange(n) for _ in range(rng.randint(1, 3))}))
        after = peel(HashHypergraph.from_edges(n, edges + [extra])).residual
        assert before <= after


def test_two_uniform_residual_iff_cycle():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(2, 50)
        m = rng.randint(0, n)
        edges = []
        for _ in range(m):
            a, b = rng.sample(range(n), 2)
            edges.append((min(a, b), max(a, b)))
        # parallel edges form a 2-cycle
        assert bool(peel(HashHypergraph.from_edges(n, edges)).residual) == has_cycle(n, edges)


def _trials(k, lam, reps=10, n=1000):
    out = []
    for s in range(reps):
        g = build_hypergraph(n, plan_cardinalities(Uniform(k), round(lam * n)), seed=1000 + s)
        out.append(is_peelable(g))
    return out


def test_random_3_uniform_below_threshold_peels():
    assert sum(_trials(3, 0.5)) >= 9


def test_random_3_uniform_above_threshold_sticks():
    assert sum(not p for p in _trials(3, 1.0)) >= 9


def test_graph_validation():
    with pytest.raises(ValueError):
        HashHypergraph.from_edges(3, [(0, 3)])
    with pytest.raises(ValueError):
        HashHypergraph.from_edges(3, [()])
    with pytest.raises(ValueError):
        HashHypergraph.from_edges(0, [])


def test_graph_is_read_only():
    g = HashHypergraph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.indices[0] = 2


def test_dump_and_subgraph():
    g = HashHypergraph.from_edges(6, [(4, 1), (5,), (0, 2, 3)])
    assert g.dump() == "1 4\n5\n0 2 3\n"
    sub = g.subgraph([2, 0])
    assert sub.n == 6 and sub.edges == ((0, 2, 3), (1, 4))
    assert g.subgraph([]).m == 0
    assert np.array_equal(g.degrees(), [1, 1, 1, 1, 1, 1])
