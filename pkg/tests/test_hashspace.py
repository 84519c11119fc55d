import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmslab.hashspace import (
    EdgePlan, KSpecError, Mixed, PerClass, Uniform,
    build_hypergraph, parse_kspec, plan_cardinalities, round_half_up,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", Uniform(3)),
        (" 14 ", Uniform(14)),
        ("(3,14;0.885)", Mixed(3, 14, 0.885)),
        ("( 1 , 3 ; 0.8 )", Mixed(1, 3, 0.8)),
        ("(2,5;.2)", Mixed(2, 5, 0.2)),
        ("(2,5)", PerClass((("hot", 2), ("cold", 5)))),
    ],
)
def test_parse_kspec(text, expected):
    assert parse_kspec(text) == expected


@pytest.mark.parametrize(
    "text", ["", "  ", "(2,5;1.5)", "(2,5;-0.1)", "0", "(0,3;0.5)", "(2,0)", "(3,3;0.5)", "3,14", "(3,14;0.8", "x", "2.5"]
)
def test_parse_kspec_rejects(text):
    with pytest.raises(KSpecError):
        parse_kspec(text)


def test_kspec_labels_round_trip():
    for text in ["3", "(3,14;0.885)", "(1,3;0.8)", "(2,5)"]:
        assert str(parse_kspec(text)) == text
        assert parse_kspec(str(parse_kspec(text))) == parse_kspec(text)


def test_plan_uniform():
    assert plan_cardinalities(Uniform(2), 4).cardinalities.tolist() == [2, 2, 2, 2]


def test_plan_mixed_example():
    card = plan_cardinalities(Mixed(1, 3, 0.8), 10, seed=5).cardinalities
    assert (card == 1).sum() == 8 and (card == 3).sum() == 2


def test_plan_per_class_example():
    plan = plan_cardinalities(PerClass.of({"hot": 2, "cold": 5}), 3, ["hot", "cold", "cold"])
    assert plan.cardinalities.tolist() == [2, 5, 5]
    assert plan.class_of == ("hot", "cold", "cold")


def test_plan_per_class_errors():
    spec = PerClass.of({"hot": 2, "cold": 5})
    with pytest.raises(KSpecError):
        plan_cardinalities(spec, 2, ["hot", "warm"])
    with pytest.raises(KSpecError):
        plan_cardinalities(spec, 2)


def test_round_half_up():
    assert [round_half_up(x) for x in (0.5, 1.5, 2.5, 2.4999, 8.0)] == [1, 2, 3, 2, 8]


@given(
    m=st.integers(0, 500),
    k1=st.integers(1, 6),
    k2=st.integers(1, 6),
    alpha=st.floats(0, 1),
    seed=st.integers(0, 2**32),
)
def test_mixed_plan_exact_count(m, k1, k2, alpha, seed):
    if k1 == k2:
        k2 = k1 + 1
    card = plan_cardinalities(Mixed(k1, k2, alpha), m, seed=seed).cardinalities
    assert card.size == m
    assert (card == k1).sum() == round_half_up(alpha * m)
    assert set(card.tolist()) <= {k1, k2}


def test_mixed_plan_small_first():
    card = plan_cardinalities(Mixed(2, 5, 0.2), 10, small_first=True).cardinalities
    assert card.tolist() == [2, 2] + [5] * 8
    # k1 larger than k2: the smaller cardinality (k2) still goes first
    card = plan_cardinalities(Mixed(5, 2, 0.8), 10, small_first=True).cardinalities
    assert card.tolist() == [2, 2] + [5] * 8


def test_mixed_plan_positions_depend_on_seed():
    a = plan_cardinalities(Mixed(1, 3, 0.5), 100, seed=1).cardinalities
    b = plan_cardinalities(Mixed(1, 3, 0.5), 100, seed=2).cardinalities
    assert not np.array_equal(a, b)
    assert np.array_equal(a, plan_cardinalities(Mixed(1, 3, 0.5), 100, seed=1).cardinalities)


def test_build_single_vertex_edge():
    g = build_hypergraph(5, EdgePlan(np.array([1])), seed=3)
    assert g.m == 1 and len(g.edge(0)) == 1


def test_build_load():
    g = build_hypergraph(1000, plan_cardinalities(Uniform(3), 818), seed=0)
    assert g.m == 818 and g.load == pytest.approx(0.818)


def test_duplicate_draws_collapse():
    # enumerate seeds until both hash values of the single 2-edge hit vertex 0
    hits = []
    for seed in range(200):
        g = build_hypergraph(2, EdgePlan(np.array([2])), seed)
        draws = np.random.default_rng(seed).integers(0, 2, size=2)
        if (draws == 0).all():
            hits.append(seed)
            assert g.edges == ((0,),)
        else:
            assert g.edges == (tuple(sorted(set(draws.tolist()))),)
    assert hits


def test_build_rejects_bad_input():
    with pytest.raises(ValueError):
        build_hypergraph(0, EdgePlan(np.array([1])), 0)
    with pytest.raises(ValueError):
        build_hypergraph(2, EdgePlan(np.array([3])), 0)


@given(
    n=st.integers(1, 60),
    card=st.lists(st.integers(1, 6), max_size=40),
    seed=st.integers(0, 2**32),
)
def test_build_is_pure_and_well_formed(n, card, seed):
    card = [min(c, n) for c in card]
    plan = EdgePlan(np.array(card, dtype=np.int64))
    g = build_hypergraph(n, plan, seed)
    assert g.edges == build_hypergraph(n, plan, seed).edges
    assert g.m == len(card)
    for e, k in zip(g.edges, card):
        assert 1 <= len(e) <= k
        assert all(0 <= v < n for v in e)
        assert list(e) == sorted(set(e))


def test_plans_sharing_seed_share_leading_hashes():
    n, m = 1000, 300
    g1 = build_hypergraph(n, plan_cardinalities(Uniform(1), m), seed=9)
    g3 = build_hypergraph(n, plan_cardinalities(Uniform(3), m), seed=9)
    rng = np.random.default_rng(9).integers(0, n, size=(3, m))
    assert [e[0] for e in g1.edges] == rng[0].tolist()
    assert all(set(e) == set(rng[:, i].tolist()) for i, e in enumerate(g3.edges))
