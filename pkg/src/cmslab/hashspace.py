"""Hash-cardinality policies and simulated fully random hash functions.

A k-spec says how many hash functions each element gets:

* ``"3"``             every element uses 3 hash functions;
* ``"(3,14;0.885)"``  a fraction 0.885 of the elements uses 3, the rest 14;
* ``"(2,5)"``         per-class cardinalities, hot elements 2 and cold ones 5.

Elements are the ids ``0..m-1``. Their hash values are drawn once from a
seeded generator when the hypergraph is built.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .hypergraph import HashHypergraph

CLASS_LABELS = ("hot", "cold")


class KSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Uniform:
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise KSpecError(f"cardinality must be >= 1, got {self.k}")

    @property
    def max_k(self) -> int:
        return self.k

    def __str__(self) -> str:
        return str(self.k)


@dataclass(frozen=True)
class Mixed:
    k1: int
    k2: int
    alpha: float

    def __post_init__(self) -> None:
        if self.k1 < 1 or self.k2 < 1:
            raise KSpecError(f"cardinalities must be >= 1, got ({self.k1},{self.k2})")
        if self.k1 == self.k2:
            raise KSpecError("mixed spec needs two different cardinalities")
        if not 0.0 <= self.alpha <= 1.0:
            raise KSpecError(f"fraction must lie in [0,1], got {self.alpha}")

    @property
    def max_k(self) -> int:
        return max(self.k1, self.k2)

    def __str__(self) -> str:
        return f"({self.k1},{self.k2};{self.alpha:g})"


@dataclass(frozen=True)
class PerClass:
    """Cardinality per class label; ``items`` keeps declaration order."""

    items: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise KSpecError("per-class spec needs at least one class")
        for label, k in self.items:
            if k < 1:
                raise KSpecError(f"cardinality for {label!r} must be >= 1, got {k}")

    @classmethod
    def of(cls, mapping: Mapping[str, int]) -> "PerClass":
        return cls(tuple((str(lbl), int(k)) for lbl, k in mapping.items()))

    @property
    def mapping(self) -> dict[str, int]:
        return dict(self.items)

    @property
    def max_k(self) -> int:
        return max(k for _, k in self.items)

    def __str__(self) -> str:
        ks = [k for _, k in self.items]
        if tuple(lbl for lbl, _ in self.items) == CLASS_LABELS[: len(ks)]:
            return "(" + ",".join(map(str, ks)) + ")"
        return "{" + ",".join(f"{lbl}:{k}" for lbl, k in self.items) + "}"


KSpec = Union[Uniform, Mixed, PerClass]

_INT = r"\s*(\d+)\s*"
_FLOAT = r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*"
_UNIFORM_RE = re.compile(rf"^{_INT}$")
_MIXED_RE = re.compile(rf"^\s*\({_INT},{_INT};{_FLOAT}\)\s*$")
_PAIR_RE = re.compile(rf"^\s*\({_INT},{_INT}\)\s*$")


def parse_kspec(text: str) -> KSpec:
    """Parse ``INT``, ``(INT,INT;FLOAT)`` or ``(INT,INT)``.

    >>> parse_kspec("(3,14;0.885)")
    Mixed(k1=3, k2=14, alpha=0.885)
    """
    if not text or not text.strip():
        raise KSpecError("empty k-spec")
    if mt := _UNIFORM_RE.match(text):
        return Uniform(int(mt.group(1)))
    if mt := _MIXED_RE.match(text):
        return Mixed(int(mt.group(1)), int(mt.group(2)), float(mt.group(3)))
    if mt := _PAIR_RE.match(text):
        return PerClass(tuple(zip(CLASS_LABELS, (int(mt.group(1)), int(mt.group(2))))))
    raise KSpecError(f"malformed k-spec {text!r}")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class EdgePlan:
    cardinalities: np.ndarray
    class_of: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(self.cardinalities, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "cardinalities", c)
        if self.class_of is not None and len(self.class_of) != c.size:
            raise ValueError("class_of must have one label per element")

    @property
    def m(self) -> int:
        return self.cardinalities.size


def plan_cardinalities(
    spec: KSpec,
    m: int,
    classes: Sequence[str] | None = None,
    seed: int = 0,
    small_first: bool = False,
) -> EdgePlan:
    """Assign a cardinality to each of the ``m`` elements.

    For a mixed spec exactly ``round(alpha*m)`` elements get ``k1``, at
    positions picked by a seeded shuffle. With ``small_first`` the smaller
    cardinality instead goes to the lowest ids (the most frequent elements
    when ids follow rank order).
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    labels = tuple(classes) if classes is not None else None
    if labels is not None and len(labels) != m:
        raise ValueError(f"expected {m} class labels, got {len(labels)}")

    if isinstance(spec, Uniform):
        card = np.full(m, spec.k, dtype=np.int64)
    elif isinstance(spec, Mixed):
        n1 = round_half_up(spec.alpha * m)
        card = np.full(m, spec.k2, dtype=np.int64)
        if small_first:
            n_small = n1 if spec.k1 < spec.k2 else m - n1
            small, large = sorted((spec.k1, spec.k2))
            card[:] = large
            card[:n_small] = small
        else:
            pos = np.random.default_rng(seed).permutation(m)[:n1]
            card[pos] = spec.k1
    elif isinstance(spec, PerClass):
        if labels is None:
            raise KSpecError("per-class spec requires class labels")
        table = spec.mapping
        unknown = set(labels) - table.keys()
        if unknown:
            raise KSpecError(f"unknown class label(s): {sorted(unknown)}")
        card = np.fromiter((table[c] for c in labels), dtype=np.int64, count=m)
    else:
        raise TypeError(f"not a k-spec: {spec!r}")
    return EdgePlan(card, labels)


def build_hypergraph(n: int, plan: EdgePlan, seed: int) -> HashHypergraph:
    """Draw the hash values of every element and collapse duplicates.

    Hash function ``j`` of all elements is drawn before hash function ``j+1``,
    so two plans sharing a seed share the first hash values of each element.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    card = plan.cardinalities
    m = card.size
    if m and card.max() > n:
        raise ValueError(f"cardinality {card.max()} exceeds n={n}")
    if m == 0:
        return HashHypergraph(n, np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64))
    kmax = int(card.max())
    draws = np.random.default_rng(seed).integers(0, n, size=(kmax, m), dtype=np.int64).T.copy()
    draws[np.arange(kmax)[None, :] >= card[:, None]] = n  # sentinel past the end
    draws.sort(axis=1)
    keep = draws < n
    keep[:, 1:] &= draws[:, 1:] != draws[:, :-1]
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(keep.sum(axis=1), out=indptr[1:])
    return HashHypergraph(n, indptr, draws[keep])
