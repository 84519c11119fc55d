import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmslab import metrics
from cmslab.hashspace import Uniform, build_hypergraph, plan_cardinalities
from cmslab.experiments import simulate
from cmslab.sketch import Sketch
from cmslab.streams import Uniform as UniformDist


def test_relative_error():
    assert metrics.relative_error(5, 5) == 0.0
    assert metrics.relative_error(7, 5) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        metrics.relative_error(3, 0)


def test_combined_error_examples():
    assert metrics.combined_error([1, 9, 4], [1, 9, 4]) == 0.0
    assert metrics.combined_error([4, 2], [2, 2], 4) == 0.5
    with pytest.raises(ValueError):
        metrics.combined_error([0, 0], [0, 0])
    with pytest.raises(ValueError):
        metrics.combined_error([4, 2], [2, 2], 5)


def test_unseen_elements_are_ignored():
    assert metrics.combined_error([4, 2, 50], [2, 2, 0]) == 0.5


pairs = st.lists(
    st.tuples(st.integers(0, 10**6), st.integers(0, 10**4)), min_size=1, max_size=200
).filter(lambda xs: any(o > 0 for _, o in xs))


@given(pairs)
def test_combined_error_is_weighted_relative_error(xs):
    occ = np.array([o for _, o in xs])
    est = occ + np.array([d for d, _ in xs])
    assert metrics.combined_error(est, occ) == pytest.approx(
        metrics.weighted_relative_error(est, occ), rel=0, abs=1e-9
    )
    assert metrics.combined_error(est, occ) >= 0


@given(pairs, st.data())
def test_class_errors_reconstitute_combined(xs, data):
    occ = np.array([o for _, o in xs])
    est = occ + np.array([d for d, _ in xs])
    labels = data.draw(st.lists(st.integers(0, 2), min_size=len(xs), max_size=len(xs)))
    total = occ.sum()
    acc = 0.0
    for c in set(labels):
        members = [i for i, l in enumerate(labels) if l == c]
        mass = occ[members].sum()
        if mass:
            acc += mass / total * metrics.class_error(est, occ, members)
    assert acc == pytest.approx(metrics.combined_error(est, occ), rel=0, abs=1e-9)


def test_class_error_examples():
    est, occ = np.array([5, 5, 9, 12]), np.array([5, 5, 3, 4])
    assert metrics.class_error(est, occ, range(4)) == metrics.combined_error(est, occ)
    assert metrics.class_error(est, occ, [0, 1]) == 0.0
    with pytest.raises(ValueError):
        metrics.class_error(est, np.array([0, 0, 3, 4]), [0, 1])
    with pytest.raises(ValueError):
        metrics.class_error(est, occ, [])


def test_rank_profile():
    prof = metrics.rank_profile([10, 30, 20], [1, 3, 2])
    assert prof.ids.tolist() == [1, 2, 0]
    assert prof.rows() == [(1, 3, 30), (2, 2, 20), (3, 1, 10)]
    tie = metrics.rank_profile([0, 0, 0, 0], [2, 5, 2, 5])
    assert tie.ids.tolist() == [1, 3, 0, 2]


def test_rank_counts():
    occ = [100, 80, 60, 40, 20]
    est = [100, 82, 70, 41, 40]
    assert metrics.near_exact_ranks(occ, est) == 3
    assert metrics.leading_exact_ranks(occ, est) == 2
    assert metrics.leading_exact_ranks([5, 4], [5, 4]) == 2
    assert metrics.near_exact_ranks([3, 0], [3, 9]) == 1


def test_summarize():
    s = metrics.summarize([6, 2, 3], [3, 2, 0], {"a": [0], "b": [1, 2]}, per_element=True)
    assert s.combined_error == pytest.approx(3 / 5)
    assert s.class_errors == {"a": 1.0, "b": 0.0}
    assert s.per_element == ((0, 3, 6, 1.0), (1, 2, 2, 0.0))


def test_counter_stats_examples():
    st0 = metrics.counter_stats(Sketch(5))
    assert (st0.mean, st0.zero_fraction, st0.coefficient_of_variation) == (0.0, 1.0, 0.0)
    s = Sketch(4)
    s.counters[:] = 7
    st7 = metrics.counter_stats(s)
    assert st7.coefficient_of_variation == 0.0 and st7.zero_fraction == 0.0 and st7.saturated
    s.counters[:] = [0, 1, 2, 3]
    st3 = metrics.counter_stats(s)
    assert st3.mean == 1.5
    assert st3.coefficient_of_variation == pytest.approx(math.sqrt(1.25) / 1.5)
    assert st3.zero_fraction == 0.25 and not st3.saturated


def test_dense_load_covers_every_counter():
    n, m = 1000, 10000
    g = build_hypergraph(n, plan_cardinalities(Uniform(3), m), seed=4)
    sketch, occ = simulate(g, UniformDist(m), 5000 * m, seed=5)
    st_ = metrics.counter_stats(sketch)
    assert st_.zero_fraction == 0.0
    assert st_.mean > 0
