"""Count-Min counter array with basic and conservative update.

Basic update increments every counter of the inserted element. Conservative
update increments only the counters equal to the current minimum over the
element's positions (all ties move together). The estimate of an element is
the minimum of its counters in both cases, so it never undershoots the true
count.
"""

from __future__ import annotations

import enum
from typing import Iterable

import numpy as np

from . import _kernels
from .hypergraph import HashHypergraph

_U64_MAX = np.iinfo(np.uint64).max


class Discipline(str, enum.Enum):
    BASIC = "basic"
    CONSERVATIVE = "conservative"


class Sketch:
    """``n`` unsigned 64-bit counters plus an update discipline.

    Single writer: the conservative rule depends on insertion order.
    """

    def __init__(self, n: int, discipline: Discipline | str = Discipline.CONSERVATIVE) -> None:
        if n < 1:
            raise ValueError(f"sketch needs at least one counter, got n={n}")
        self.n = n
        self.discipline = Discipline(discipline)
        self.counters = np.zeros(n, dtype=np.uint64)
        self.insertions_processed = 0

    def __repr__(self) -> str:
        return f"Sketch(n={self.n}, discipline={self.discipline.value}, N={self.insertions_processed})"

    def _positions(self, edge: Iterable[int]) -> np.ndarray:
        pos = np.unique(np.fromiter((int(v) for v in edge), dtype=np.int64))
        if pos.size == 0:
            raise ValueError("edge must be nonempty")
        if pos[0] < 0 or pos[-1] >= self.n:
            raise IndexError(f"counter index out of range [0, {self.n})")
        return pos

    def insert(self, edge: Iterable[int]) -> int:
        """Insert one occurrence of the element hashed to ``edge``.

        Returns how many counters were incremented.
        """
        pos = self._positions(edge)
        vals = self.counters[pos]
        if self.discipline is Discipline.CONSERVATIVE:
            pos = pos[vals == vals.min()]
            vals = self.counters[pos]
        if np.any(vals == _U64_MAX):
            raise OverflowError("counter overflow")
        self.counters[pos] += np.uint64(1)
        self.insertions_processed += 1
        return int(pos.size)

    def estimate(self, edge: Iterable[int]) -> int:
        return int(self.counters[self._positions(edge)].min())

    def estimates(self, graph: HashHypergraph) -> np.ndarray:
        """Estimate of every edge of ``graph`` as an int64 array."""
        out = np.zeros(graph.m, dtype=np.uint64)
        if graph.m:
            _kernels.edge_minima(self.counters, graph.indptr, graph.indices, out)
        return out.astype(np.int64)

    def feed(self, graph: HashHypergraph, stream: np.ndarray, occ: np.ndarray) -> None:
        """Insert ``graph`` edges for each id in ``stream``, tallying into ``occ``."""
        if graph.n != self.n:
            raise ValueError(f"graph has {graph.n} vertices, sketch has {self.n} counters")
        stream = np.ascontiguousarray(stream, dtype=np.int64)
        if stream.size == 0:
            return
        if stream.min() < 0 or stream.max() >= graph.m:
            raise IndexError(f"element id out of range [0, {graph.m})")
        kernel = (
            _kernels.feed_conservative
            if self.discipline is Discipline.CONSERVATIVE
            else _kernels.feed_basic
        )
        done = kernel(self.counters, graph.indptr, graph.indices, stream, occ)
        self.insertions_processed += int(done)
        if done < stream.size:
            raise OverflowError(f"counter overflow after {self.insertions_processed} insertions")

    def dump(self) -> str:
        return "".join(f"{i},{int(v)}\n" for i, v in enumerate(self.counters))


def new_sketch(n: int, discipline: Discipline | str = Discipline.CONSERVATIVE) -> Sketch:
    return Sketch(n, discipline)


def run_stream(
    sketch: Sketch, graph: HashHypergraph, stream: np.ndarray | Iterable[np.ndarray]
) -> np.ndarray:
    """Feed a whole stream (an id array or an iterable of id chunks).

    Returns the occurrence count of every element of ``graph``.
    """
    occ = np.zeros(graph.m, dtype=np.int64)
    if isinstance(stream, np.ndarray) or (
        isinstance(stream, (list, tuple)) and all(isinstance(x, (int, np.integer)) for x in stream)
    ):
        sketch.feed(graph, np.asarray(stream, dtype=np.int64), occ)
    else:
        for chunk in stream:
            sketch.feed(graph, chunk, occ)
    return occ
