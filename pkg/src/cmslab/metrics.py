"""Error and saturation measurements over a finished run.

Elements that never occurred are left out of every error: their relative
error is undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .sketch import Sketch

# Counter coefficient of variation below which a sketch with no empty
# counters is called saturated.
SATURATION_CV = 0.05


def relative_error(estimate: int, occ: int) -> float:
    if occ < 1:
        raise ValueError("relative error is undefined for an element that never occurred")
    return (estimate - occ) / occ


def _as_pair(estimates, occs) -> tuple[np.ndarray, np.ndarray]:
    est = np.asarray(estimates, dtype=np.int64)
    occ = np.asarray(occs, dtype=np.int64)
    if est.shape != occ.shape:
        raise ValueError("estimates and occurrence counts differ in length")
    return est, occ


def combined_error(estimates, occs, N: int | None = None) -> float:
    """(1/N) * sum over seen elements of (estimate - occ).

    The numerator is summed exactly in integers.
    """
    est, occ = _as_pair(estimates, occs)
    seen = occ > 0
    total = int(occ[seen].sum())
    if N is not None and N != total:
        raise ValueError(f"N={N} does not match the occurrence total {total}")
    if total == 0:
        raise ValueError("no element occurred; combined error is undefined")
    return int((est[seen] - occ[seen]).sum()) / total


def weighted_relative_error(estimates, occs) -> float:
    """Occurrence-weighted mean of per-element relative errors (compensated sum)."""
    est, occ = _as_pair(estimates, occs)
    seen = np.flatnonzero(occ > 0)
    if seen.size == 0:
        raise ValueError("no element occurred")
    total = math.fsum(int(occ[i]) for i in seen)
    return math.fsum(int(occ[i]) * relative_error(int(est[i]), int(occ[i])) for i in seen) / total


def class_error(estimates, occs, membership: Iterable[int]) -> float:
    """Combined error restricted to the element ids in ``membership``."""
    est, occ = _as_pair(estimates, occs)
    ids = np.fromiter((int(i) for i in membership), dtype=np.int64)
    if ids.size == 0 or not np.any(occ[ids] > 0):
        raise ValueError("class has no element that occurred")
    return combined_error(est[ids], occ[ids])


class RankProfile(NamedTuple):
    """Elements in frequency-rank order: ``ids[r-1]`` has rank ``r``."""

    ids: np.ndarray
    occ: np.ndarray
    estimate: np.ndarray

    def rows(self) -> list[tuple[int, int, int]]:
        return [(r + 1, int(o), int(e)) for r, (o, e) in enumerate(zip(self.occ, self.estimate))]


def rank_profile(estimates, occs) -> RankProfile:
    """Sort by descending occurrence count, ties by ascending id."""
    est, occ = _as_pair(estimates, occs)
    ids = np.lexsort((np.arange(occ.size), -occ))
    return RankProfile(ids, occ[ids], est[ids])


def near_exact_ranks(occ, estimate, tol: float = 0.05) -> int:
    """How many ranks have relative error below ``tol`` (ranks with occ 0 excluded)."""
    occ = np.asarray(occ, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    seen = occ > 0
    return int(np.count_nonzero((estimate[seen] - occ[seen]) / occ[seen] < tol))


def leading_exact_ranks(occ, estimate, tol: float = 0.05) -> int:
    """Length of the run of top ranks whose relative error stays below ``tol``."""
    occ = np.asarray(occ, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = (occ > 0) & ((estimate - occ) / occ < tol)
    bad = np.flatnonzero(~ok)
    return int(bad[0]) if bad.size else int(ok.size)


@dataclass(frozen=True)
class ErrorSummary:
    combined_error: float
    class_errors: Mapping[str, float]
    per_element: tuple[tuple[int, int, int, float], ...] | None = None


def summarize(
    estimates,
    occs,
    classes: Mapping[str, Iterable[int]] | None = None,
    per_element: bool = False,
) -> ErrorSummary:
    est, occ = _as_pair(estimates, occs)
    class_errors = {}
    for label, members in (classes or {}).items():
        class_errors[label] = class_error(est, occ, members)
    rows = None
    if per_element:
        rows = tuple(
            (int(i), int(occ[i]), int(est[i]), relative_error(int(est[i]), int(occ[i])))
            for i in np.flatnonzero(occ > 0)
        )
    return ErrorSummary(combined_error(est, occ), class_errors, rows)


@dataclass(frozen=True)
class CounterStats:
    mean: float
    coefficient_of_variation: float
    zero_fraction: float

    @property
    def saturated(self) -> bool:
        return self.zero_fraction == 0 and self.coefficient_of_variation < SATURATION_CV


def counter_stats(sketch: Sketch) -> CounterStats:
    c = sketch.counters.astype(np.float64)
    mean = float(c.mean())
    cv = float(c.std() / mean) if mean > 0 else 0.0
    return CounterStats(mean, cv, float(np.count_nonzero(sketch.counters == 0)) / c.size)
