"""Hash hypergraphs and the peeling process.

A Count-Min sketch with ``n`` counters and ``m`` distinct elements is viewed
as a hypergraph on ``n`` vertices (the counters) whose edges are the sets of
hash positions of each element. Peeling repeatedly deletes a vertex of degree
at most one together with its incident edge; the hypergraph is peelable when
nothing is left. Below the peelability threshold of the edge model the
conservative sketch has vanishing error under uniform input.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Peelability thresholds (critical load m/n) for random hypergraphs.
# Uniform values from Molloy's core analysis, mixed ones from Rink (SOFSEM 2013).
THRESHOLD_K2 = 0.5
THRESHOLD_K3 = 0.818
THRESHOLD_K4 = 0.772
THRESHOLD_MIXED_3_14 = 0.898  # k=(3,14;0.885)
THRESHOLD_MIXED_3_21 = 0.920  # k=(3,21;0.887)

PEELABILITY_THRESHOLDS = {
    "2": THRESHOLD_K2,
    "3": THRESHOLD_K3,
    "4": THRESHOLD_K4,
    "(3,14;0.885)": THRESHOLD_MIXED_3_14,
    "(3,21;0.887)": THRESHOLD_MIXED_3_21,
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HashHypergraph:
    """``n`` vertices and ``m`` edges stored in CSR form.

    Edge ``i`` is ``indices[indptr[i]:indptr[i + 1]]``, sorted ascending and
    duplicate free. Arrays are read-only, so instances can be shared freely.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    _edge_cache: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"hypergraph needs at least one vertex, got n={self.n}")
        indptr = _frozen(self.indptr)
        indices = _frozen(self.indices)
        if indptr.ndim != 1 or indptr.size < 1 or indptr[0] != 0 or indptr[-1] != indices.size:
            raise ValueError("malformed CSR index pointer")
        if np.any(np.diff(indptr) < 1):
            raise ValueError("every edge must be nonempty")
        if indices.size and (indices.min() < 0 or indices.max() >= self.n):
            raise ValueError(f"vertex index out of range [0, {self.n})")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "HashHypergraph":
        rows = [sorted(set(int(v) for v in e)) for e in edges]
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in rows], dtype=np.int64)
        indices = np.fromiter((v for r in rows for v in r), dtype=np.int64, count=int(indptr[-1]))
        return cls(n, indptr, indices)

    @property
    def m(self) -> int:
        return self.indptr.size - 1

    @property
    def load(self) -> float:
        return self.m / self.n

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.indices[self.indptr[i]:self.indptr[i + 1]])

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        if self._edge_cache is None:
            object.__setattr__(self, "_edge_cache", tuple(self.edge(i) for i in range(self.m)))
        return self._edge_cache

    def subgraph(self, edge_ids: Sequence[int]) -> "HashHypergraph":
        """Hypergraph on the same vertex set keeping only ``edge_ids`` (renumbered 0..)."""
        ids = np.asarray(edge_ids, dtype=np.int64)
        sizes = self.sizes[ids]
        indptr = np.zeros(ids.size + 1, dtype=np.int64)
        np.cumsum(sizes, out=indptr[1:])
        if ids.size:
            starts = np.repeat(self.indptr[ids], sizes)
            offsets = np.arange(indptr[-1]) - np.repeat(indptr[:-1], sizes)
            indices = self.indices[starts + offsets]
        else:
            indices = np.zeros(0, dtype=np.int64)
        return HashHypergraph(self.n, indptr, indices)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.n)

    def dump(self) -> str:
        """One edge per line, vertex indices ascending and space separated."""
        return "".join(" ".join(map(str, e)) + "\n" for e in self.edges)


def load_factor(graph: HashHypergraph) -> float:
    return graph.m / graph.n


@dataclass(frozen=True)
class PeelReport:
    peel_order: tuple[int, ...]
    residual: frozenset[int]
    depth: dict[int, int]

    @property
    def peelable(self) -> bool:
        return not self.residual


def _incidence(graph: HashHypergraph) -> tuple[np.ndarray, np.ndarray]:
    owner = np.repeat(np.arange(graph.m, dtype=np.int64), graph.sizes)
    order = np.argsort(graph.indices, kind="stable")
    inc_ptr = np.zeros(graph.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(graph.indices, minlength=graph.n), out=inc_ptr[1:])
    return inc_ptr, owner[order]


def peel(graph: HashHypergraph) -> PeelReport:
    """Peel ``graph`` with a FIFO queue of vertices of degree at most one.

    The queue starts with all such vertices in ascending index order; vertices
    whose degree drops to one are appended in ascending order within the removed
    edge. Each vertex is processed once, so the total work is O(sum of edge sizes).
    """
    n, m = graph.n, graph.m
    inc_ptr, inc_edges = _incidence(graph)
    inc_ptr_l = inc_ptr.tolist()
    inc_edges_l = inc_edges.tolist()
    indptr = graph.indptr.tolist()
    indices = graph.indices.tolist()
    degree = np.diff(inc_ptr).tolist()
    alive = [True] * m
    done = [False] * n

    queue = deque(v for v in range(n) if degree[v] <= 1)
    order: list[int] = []
    while queue:
        v = queue.popleft()
        if done[v]:
            continue
        done[v] = True
        if degree[v] == 0:
            continue
        e = next(x for x in inc_edges_l[inc_ptr_l[v]:inc_ptr_l[v + 1]] if alive[x])
        alive[e] = False
        order.append(e)
        for u in indices[indptr[e]:indptr[e + 1]]:
            degree[u] -= 1
            if degree[u] == 1 and not done[u]:
                queue.append(u)

    residual = frozenset(e for e in range(m) if alive[e])
    return PeelReport(tuple(order), residual, {e: i for i, e in enumerate(order)})


def is_peelable(graph: HashHypergraph) -> bool:
    return peel(graph).peelable
