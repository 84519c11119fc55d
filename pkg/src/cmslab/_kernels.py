"""Compiled inner loops. Each returns the number of insertions applied;
anything short of ``stream.size`` means a counter would have overflowed."""

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_MAX = np.uint64(np.iinfo(np.uint64).max)


@njit(nogil=True, cache=True)
def feed_conservative(counters, indptr, indices, stream, occ):
    for t in range(stream.size):
        e = stream[t]
        a = indptr[e]
        b = indptr[e + 1]
        v = counters[indices[a]]
        for j in range(a + 1, b):
            c = counters[indices[j]]
            if c < v:
                v = c
        if v == _MAX:
            return t
        for j in range(a, b):
            if counters[indices[j]] == v:
                counters[indices[j]] += _ONE
        occ[e] += 1
    return stream.size


@njit(nogil=True, cache=True)
def feed_basic(counters, indptr, indices, stream, occ):
    for t in range(stream.size):
        e = stream[t]
        a = indptr[e]
        b = indptr[e + 1]
        for j in range(a, b):
            if counters[indices[j]] == _MAX:
                return t
        for j in range(a, b):
            counters[indices[j]] += _ONE
        occ[e] += 1
    return stream.size


@njit(nogil=True, cache=True)
def edge_minima(counters, indptr, indices, out):
    for e in range(indptr.size - 1):
        v = counters[indices[indptr[e]]]
        for j in range(indptr[e] + 1, indptr[e + 1]):
            c = counters[indices[j]]
            if c < v:
                v = c
        out[e] = v
