"""Quick sanity checks over every module, runnable from the command line."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import hashspace, metrics, streams
from .hypergraph import HashHypergraph, is_peelable, load_factor, peel
from .sketch import Sketch, run_stream


def _raises(fn: Callable[[], object], exc=Exception) -> bool:
    try:
        fn()
    except exc:
        return True
    return False


def _checks() -> list[tuple[str, Callable[[], bool]]]:
    def conservative(counters, edge):
        s = Sketch(len(counters))
        s.counters[:] = counters
        s.insert(edge)
        return s.counters.tolist()

    def basic(counters, edge):
        s = Sketch(len(counters), "basic")
        s.counters[:] = counters
        s.insert(edge)
        return s.counters.tolist()

    cycle = HashHypergraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    disjoint = HashHypergraph.from_edges(4, [(0, 1), (2, 3)])

    def disjoint_exact():
        s = Sketch(4)
        occ = run_stream(s, disjoint, [0, 0, 1])
        return occ.tolist() == [2, 1] and s.estimates(disjoint).tolist() == [2, 1]

    def twice():
        s = Sketch(3)
        s.insert((0, 1))
        s.insert((0, 1))
        return s.estimate((0, 1)) == 2

    return [
        ("parse_kspec uniform", lambda: hashspace.parse_kspec("3") == hashspace.Uniform(3)),
        ("parse_kspec mixed", lambda: hashspace.parse_kspec("(3,14;0.885)") == hashspace.Mixed(3, 14, 0.885)),
        ("parse_kspec bad fraction", lambda: _raises(lambda: hashspace.parse_kspec("(2,5;1.5)"), ValueError)),
        ("plan uniform", lambda: hashspace.plan_cardinalities(hashspace.Uniform(2), 4).cardinalities.tolist() == [2, 2, 2, 2]),
        ("plan mixed count", lambda: sorted(hashspace.plan_cardinalities(hashspace.Mixed(1, 3, 0.8), 10, seed=1).cardinalities.tolist()) == [1] * 8 + [3] * 2),
        ("plan per-class", lambda: hashspace.plan_cardinalities(hashspace.PerClass.of({"hot": 2, "cold": 5}), 3, ["hot", "cold", "cold"]).cardinalities.tolist() == [2, 5, 5]),
        ("single-vertex edge", lambda: hashspace.build_hypergraph(5, hashspace.EdgePlan(np.array([1])), 0).sizes.tolist() == [1]),
        ("peel empty graph", lambda: peel(HashHypergraph.from_edges(3, [])).peel_order == () and not peel(HashHypergraph.from_edges(3, [])).residual),
        ("peel 3-cycle", lambda: peel(cycle).residual == {0, 1, 2}),
        ("single edge peelable", lambda: is_peelable(HashHypergraph.from_edges(2, [(0, 1)]))),
        ("3-cycle not peelable", lambda: not is_peelable(cycle)),
        ("load factor", lambda: load_factor(HashHypergraph.from_edges(4, [(0,)] * 6)) == 1.5 and load_factor(HashHypergraph.from_edges(10, [])) == 0.0),
        ("new sketch", lambda: Sketch(3).counters.tolist() == [0, 0, 0] and Sketch(1, "basic").counters.tolist() == [0]),
        ("new sketch n=0", lambda: _raises(lambda: Sketch(0), ValueError)),
        ("conservative ties", lambda: conservative([0, 0, 0], (0, 1)) == [1, 1, 0]),
        ("conservative min only", lambda: conservative([2, 1, 0], (0, 2)) == [2, 1, 1]),
        ("basic all", lambda: basic([2, 1, 0], (0, 2)) == [3, 1, 1]),
        ("estimate min", lambda: (lambda s: (s.counters.__setitem__(slice(None), [3, 1, 2]), s.estimate((0, 2)))[1] == 2)(Sketch(3))),
        ("estimate fresh", lambda: Sketch(5).estimate((1, 4)) == 0),
        ("estimate after two inserts", twice),
        ("empty stream", lambda: run_stream(Sketch(4), disjoint, []).tolist() == [0, 0]),
        ("disjoint edges exact", disjoint_exact),
        ("uniform probabilities", lambda: streams.probabilities(streams.Uniform(4)).tolist() == [0.25] * 4),
        ("step masses", lambda: math.isclose(streams.probabilities(streams.Step(100, 1000, 10))[:100].sum(), 0.5)),
        ("zipf beta 0 is uniform", lambda: np.allclose(streams.probabilities(streams.Zipf(7, 0.0)), 1 / 7)),
        ("empty stream sample", lambda: streams.sample_stream(streams.StreamSpec(streams.Uniform(3), 0, 1)).size == 0),
        ("relative error exact", lambda: metrics.relative_error(5, 5) == 0.0),
        ("relative error 0.4", lambda: math.isclose(metrics.relative_error(7, 5), 0.4)),
        ("relative error occ 0", lambda: _raises(lambda: metrics.relative_error(3, 0), ValueError)),
        ("combined error exact", lambda: metrics.combined_error([3, 4], [3, 4]) == 0.0),
        ("combined error arithmetic", lambda: metrics.combined_error([4, 2], [2, 2], 4) == 0.5),
        ("rank profile order", lambda: metrics.rank_profile([0, 0, 0], [1, 3, 2]).ids.tolist() == [1, 2, 0]),
        ("counter stats fresh", lambda: metrics.counter_stats(Sketch(4)) == metrics.CounterStats(0.0, 0.0, 1.0)),
    ]


def run_selftest() -> list[tuple[str, bool]]:
    results = []
    for name, check in _checks():
        try:
            ok = bool(check())
        except Exception:
            ok = False
        results.append((name, ok))
    return results
