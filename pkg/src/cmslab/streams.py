"""Element distributions and i.i.d. stream sampling.

Element ids run from 0 to m-1. For the step distribution the hot elements are
ids ``[0, m_hot)``; for Zipf, id ``i - 1`` has rank ``i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

# Streams are produced in fixed-size chunks; the chunk size is part of the
# stream definition (changing it changes the sampled sequence).
CHUNK = 1 << 20


@dataclass(frozen=True)
class Uniform:
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")

    def __str__(self) -> str:
        return f"uniform:{self.m}"


@dataclass(frozen=True)
class Step:
    m_hot: int
    m_cold: int
    G: float

    def __post_init__(self) -> None:
        if self.m_hot < 1 or self.m_cold < 1:
            raise ValueError("step distribution needs at least one hot and one cold element")
        if not self.G > 1:
            raise ValueError(f"gap factor must exceed 1, got {self.G}")

    @property
    def m(self) -> int:
        return self.m_hot + self.m_cold

    @property
    def hot_mass(self) -> float:
        """Probability that a draw is hot: G*m_hot / (G*m_hot + m_cold)."""
        return self.G * self.m_hot / (self.G * self.m_hot + self.m_cold)

    def __str__(self) -> str:
        return f"step:{self.m_hot},{self.m_cold},{self.G:g}"


@dataclass(frozen=True)
class Zipf:
    m: int
    beta: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.beta < 0:
            raise ValueError(f"skewness must be >= 0, got {self.beta}")

    def __str__(self) -> str:
        return f"zipf:{self.m},{self.beta:g}"


Distribution = Union[Uniform, Step, Zipf]


def probabilities(dist: Distribution) -> np.ndarray:
    if isinstance(dist, Uniform):
        return np.full(dist.m, 1.0 / dist.m)
    if isinstance(dist, Step):
        q = 1.0 / (dist.G * dist.m_hot + dist.m_cold)
        p = np.full(dist.m, q)
        p[: dist.m_hot] = dist.G * q
        return p
    if isinstance(dist, Zipf):
        w = np.arange(1, dist.m + 1, dtype=np.float64) ** -dist.beta
        return w / w.sum()
    raise TypeError(f"not a distribution: {dist!r}")


def alias_table(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose's alias table: draw column i uniformly, keep it with prob[i], else alias[i]."""
    m = p.size
    scaled = np.asarray(p, dtype=np.float64) * m
    prob = np.ones(m)
    alias = np.arange(m, dtype=np.int64)
    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    scaled_l = scaled.tolist()
    while small and large:
        s = small.pop()
        g = large[-1]
        prob[s] = scaled_l[s]
        alias[s] = g
        scaled_l[g] = (scaled_l[g] + scaled_l[s]) - 1.0
        if scaled_l[g] < 1.0:
            small.append(large.pop())
    # leftovers are 1 up to rounding
    return prob, alias


@dataclass(frozen=True)
class StreamSpec:
    distribution: Distribution
    length: int
    seed: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError(f"stream length must be >= 0, got {self.length}")


def iter_stream(spec: StreamSpec) -> Iterator[np.ndarray]:
    """Yield the stream as int64 chunks of at most ``CHUNK`` ids."""
    dist = spec.distribution
    rng = np.random.default_rng(spec.seed)
    m = dist.m
    table = None if isinstance(dist, Uniform) else alias_table(probabilities(dist))
    left = spec.length
    while left > 0:
        size = min(left, CHUNK)
        left -= size
        if table is None:
            yield rng.integers(0, m, size=size, dtype=np.int64)
            continue
        prob, alias = table
        u = rng.random(size) * m
        col = u.astype(np.int64)
        np.minimum(col, m - 1, out=col)
        u -= col
        yield np.where(u < prob[col], col, alias[col])


def sample_stream(spec: StreamSpec) -> np.ndarray:
    chunks = list(iter_stream(spec))
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)


_DIST_RE = re.compile(r"^\s*(uniform|step|zipf)\s*:\s*(.+?)\s*$")


def parse_distribution(text: str) -> Distribution:
    """Parse ``uniform:m``, ``step:mh,mc,G`` or ``zipf:m,beta``."""
    mt = _DIST_RE.match(text or "")
    if not mt:
        raise ValueError(f"malformed distribution {text!r}")
    kind, args = mt.group(1), [a.strip() for a in mt.group(2).split(",")]
    try:
        if kind == "uniform" and len(args) == 1:
            return Uniform(int(args[0]))
        if kind == "step" and len(args) == 3:
            return Step(int(args[0]), int(args[1]), float(args[2]))
        if kind == "zipf" and len(args) == 2:
            return Zipf(int(args[0]), float(args[1]))
    except ValueError as exc:
        raise ValueError(f"malformed distribution {text!r}: {exc}") from None
    raise ValueError(f"malformed distribution {text!r}")
