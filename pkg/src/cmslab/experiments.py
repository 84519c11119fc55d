"""Parameter sweeps over load factors producing long-format result tables.

Every (k-spec, load, rep) cell builds its own hypergraph, stream and sketch
from a seed derived from the master seed, the load value and the rep index.
The k-spec does not enter the seed, so configurations compared at the same
cell share the stream and the leading hash values of each element.
"""

from __future__ import annotations

import csv
import enum
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import hashspace, metrics, streams
from .hashspace import CLASS_LABELS, KSpec, round_half_up
from .hypergraph import HashHypergraph, peel
from .sketch import Sketch

CSV_HEADER = (
    "experiment", "n", "kspec", "dist", "lambda", "lambda_h", "lambda_c",
    "G", "beta", "multiplier", "rep", "seed", "metric", "value",
)
# Rows averaging over reps carry this rep index.
AGGREGATE_REP = -1


class Kind(str, enum.Enum):
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL = "supercritical"
    MIXED_SUPER = "mixed-super"
    STEP = "step"
    CONVERGENCE = "convergence"
    ZIPF = "zipf"


@dataclass(frozen=True)
class ExperimentConfig:
    kind: Kind
    kspecs: tuple[KSpec, ...]
    lambda_grid: tuple[float, ...]
    n: int = 1000
    multiplier: int = 5000
    reps: int = 10
    seed: int = 42
    lambda_c: float | None = None
    G: float | None = None
    beta: float | None = None
    hot_fraction: float = 0.1
    small_k_top: bool = False
    rank_tol: float = 0.05

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "kspecs", tuple(self.kspecs))
        object.__setattr__(self, "lambda_grid", tuple(float(x) for x in self.lambda_grid))
        grid = self.lambda_grid
        if not grid:
            raise ValueError("empty load grid")
        if any(x <= 0 for x in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("load grid must be positive and strictly increasing")
        if not self.kspecs:
            raise ValueError("at least one k-spec is required")
        if self.n < 1 or self.reps < 1 or self.multiplier < 1:
            raise ValueError("n, reps and multiplier must all be >= 1")
        if self.seed < 0:
            raise ValueError("master seed must be non-negative")
        if self.kind is Kind.STEP and (self.lambda_c is None or self.G is None):
            raise ValueError("step sweep needs lambda_c and G")
        if self.kind is Kind.CONVERGENCE and self.G is None:
            raise ValueError("convergence sweep needs G")
        if self.kind is Kind.ZIPF and self.beta is None:
            raise ValueError("zipf sweep needs beta")


class Row(NamedTuple):
    experiment: str
    n: int
    kspec: str
    dist: str
    lam: float
    lambda_h: float | None
    lambda_c: float | None
    G: float | None
    beta: float | None
    multiplier: int
    rep: int
    seed: int
    metric: str
    value: float


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[Row] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([v if isinstance(v, str) else _fmt(v) for v in r])
        return buf.getvalue()

    def values(self, metric: str, kspec: KSpec | str | None = None, rep: int | None = AGGREGATE_REP) -> dict:
        """``{(kspec, x): value}`` for one metric (aggregate rows by default).

        ``x`` is the swept grid value: lambda_h for step sweeps, lambda otherwise.
        """
        ks = None if kspec is None else str(kspec)
        out = {}
        for r in self.rows:
            if r.metric == metric and (ks is None or r.kspec == ks) and (rep is None or r.rep == rep):
                x = r.lambda_h if r.experiment == Kind.STEP.value else r.lam
                key = (r.kspec, x) if rep is not None else (r.kspec, x, r.rep)
                out[key] = r.value
        return out

    def curve(self, metric: str, kspec: KSpec | str) -> list[tuple[float, float]]:
        return sorted((lam, v) for (_, lam), v in self.values(metric, kspec).items())


def cell_seed(master: int, lam: float, rep: int) -> int:
    """Seed of one (load, rep) cell; a fixed function of its arguments."""
    ss = np.random.SeedSequence([master, round_half_up(lam * 1e9), rep])
    hi, lo = (int(x) for x in ss.generate_state(2, dtype=np.uint32))
    return ((hi & 0x7FFFFFFF) << 32) | lo


def _sub_seeds(seed: int) -> tuple[int, int, int]:
    plan_seed, graph_seed, stream_seed = np.random.SeedSequence(seed).generate_state(3, dtype=np.uint64)
    return int(plan_seed), int(graph_seed), int(stream_seed)


def simulate(graph: HashHypergraph, dist: streams.Distribution, length: int, seed: int) -> tuple[Sketch, np.ndarray]:
    """Run a conservative sketch over an i.i.d. stream; returns (sketch, occ)."""
    if dist.m != graph.m:
        raise ValueError(f"distribution over {dist.m} elements, graph has {graph.m} edges")
    sketch = Sketch(graph.n)
    occ = np.zeros(graph.m, dtype=np.int64)
    for chunk in streams.iter_stream(streams.StreamSpec(dist, length, seed)):
        sketch.feed(graph, chunk, occ)
    return sketch, occ


class _Cell(NamedTuple):
    ki: int
    lam: float
    rep: int


@dataclass
class _CellOut:
    echo: dict
    seed: int
    metrics: list[tuple[str, float]]
    profile: tuple[np.ndarray, np.ndarray] | None = None


def _m(lam: float, n: int) -> int:
    return round_half_up(lam * n)


def _uniform_cell(cfg: ExperimentConfig, spec: KSpec, lam: float, seed: int, with_peel: bool) -> _CellOut:
    plan_seed, graph_seed, stream_seed = _sub_seeds(seed)
    m = _m(lam, cfg.n)
    if m < 1:
        raise ValueError(f"load {lam} gives no elements at n={cfg.n}")
    graph = hashspace.build_hypergraph(cfg.n, hashspace.plan_cardinalities(spec, m, seed=plan_seed), graph_seed)
    dist = streams.Uniform(m)
    sketch, occ = simulate(graph, dist, cfg.multiplier * m, stream_seed)
    est = sketch.estimates(graph)
    out = [("combined_error", metrics.combined_error(est, occ))]
    if with_peel:
        residual = len(peel(graph).residual)
        out += [("residual_edges", residual), ("residual_fraction", residual / m), ("peelable", int(residual == 0))]
    st = metrics.counter_stats(sketch)
    out += [
        ("counter_mean", st.mean),
        ("counter_cv", st.coefficient_of_variation),
        ("zero_fraction", st.zero_fraction),
        ("saturated", int(st.saturated)),
    ]
    return _CellOut({"dist": str(dist), "lambda_h": None, "lambda_c": None}, seed, out)


def _hot_cold_cell(
    cfg: ExperimentConfig, spec: KSpec, lam_h: float, lam_c: float, seed: int, baseline: bool
) -> _CellOut:
    plan_seed, graph_seed, stream_seed = _sub_seeds(seed)
    m_hot, m_cold = _m(lam_h, cfg.n), _m(lam_c, cfg.n)
    m = m_hot + m_cold
    classes = [CLASS_LABELS[0]] * m_hot + [CLASS_LABELS[1]] * m_cold
    plan = hashspace.plan_cardinalities(spec, m, classes=classes, seed=plan_seed)
    graph = hashspace.build_hypergraph(cfg.n, plan, graph_seed)
    dist = streams.Step(m_hot, m_cold, cfg.G)
    sketch, occ = simulate(graph, dist, cfg.multiplier * m, stream_seed)
    est = sketch.estimates(graph)
    hot, cold = range(m_hot), range(m_hot, m)
    mean_hot = float(est[:m_hot].mean())
    mean_cold = float(est[m_hot:].mean())
    out = [
        ("errhot", metrics.class_error(est, occ, hot)),
        ("errcold", metrics.class_error(est, occ, cold)),
        ("combined_error", metrics.combined_error(est, occ)),
        ("mean_est_hot", mean_hot),
        ("mean_est_cold", mean_cold),
        ("mean_occ_hot", float(occ[:m_hot].mean())),
        ("mean_occ_cold", float(occ[m_hot:].mean())),
        ("hot_cold_ratio", mean_hot / mean_cold if mean_cold > 0 else float("inf")),
    ]
    if baseline:
        # same hot edges, no cold elements at all
        hot_graph = graph.subgraph(np.arange(m_hot))
        b_sketch, b_occ = simulate(hot_graph, streams.Uniform(m_hot), cfg.multiplier * m_hot, stream_seed)
        out.append(("errhot_nocold", metrics.combined_error(b_sketch.estimates(hot_graph), b_occ)))
    st = metrics.counter_stats(sketch)
    out += [("counter_cv", st.coefficient_of_variation), ("zero_fraction", st.zero_fraction)]
    return _CellOut({"dist": str(dist), "lambda_h": lam_h, "lambda_c": lam_c}, seed, out)


def _zipf_cell(cfg: ExperimentConfig, spec: KSpec, lam: float, seed: int) -> _CellOut:
    plan_seed, graph_seed, stream_seed = _sub_seeds(seed)
    m = _m(lam, cfg.n)
    plan = hashspace.plan_cardinalities(spec, m, seed=plan_seed, small_first=cfg.small_k_top)
    graph = hashspace.build_hypergraph(cfg.n, plan, graph_seed)
    dist = streams.Zipf(m, cfg.beta)
    sketch, occ = simulate(graph, dist, cfg.multiplier * m, stream_seed)
    est = sketch.estimates(graph)
    prof = metrics.rank_profile(est, occ)
    out = [
        ("combined_error", metrics.combined_error(est, occ)),
        ("near_exact_ranks", metrics.near_exact_ranks(prof.occ, prof.estimate, cfg.rank_tol)),
        ("leading_exact_ranks", metrics.leading_exact_ranks(prof.occ, prof.estimate, cfg.rank_tol)),
    ]
    return _CellOut({"dist": str(dist), "lambda_h": None, "lambda_c": None}, seed, out, (prof.occ, prof.estimate))


def _run_cell(cfg: ExperimentConfig, cell: _Cell) -> _CellOut:
    spec = cfg.kspecs[cell.ki]
    seed = cell_seed(cfg.seed, cell.lam, cell.rep)
    kind = cfg.kind
    if kind is Kind.SUBCRITICAL:
        return _uniform_cell(cfg, spec, cell.lam, seed, with_peel=True)
    if kind in (Kind.SUPERCRITICAL, Kind.MIXED_SUPER):
        return _uniform_cell(cfg, spec, cell.lam, seed, with_peel=False)
    if kind is Kind.STEP:
        return _hot_cold_cell(cfg, spec, cell.lam, cfg.lambda_c, seed, baseline=True)
    if kind is Kind.CONVERGENCE:
        lam_h = cfg.hot_fraction * cell.lam
        return _hot_cold_cell(cfg, spec, lam_h, cell.lam - lam_h, seed, baseline=False)
    if kind is Kind.ZIPF:
        return _zipf_cell(cfg, spec, cell.lam, seed)
    raise ValueError(f"unknown experiment kind {kind!r}")


def _aggregate(cfg: ExperimentConfig, outs: Sequence[_CellOut]) -> list[tuple[str, float]]:
    names = [name for name, _ in outs[0].metrics]
    table = np.array([[v for _, v in o.metrics] for o in outs], dtype=np.float64)
    agg = list(zip(names, table.mean(axis=0).tolist()))
    if cfg.kind is Kind.CONVERGENCE:
        means = dict(agg)
        agg.append(("hot_cold_ratio_of_means", means["mean_est_hot"] / means["mean_est_cold"]))
    if cfg.kind is Kind.ZIPF:
        occ = np.mean([o.profile[0] for o in outs], axis=0)
        est = np.mean([o.profile[1] for o in outs], axis=0)
        agg.append(("profile_near_exact_ranks", metrics.near_exact_ranks(occ, est, cfg.rank_tol)))
        agg.append(("profile_leading_exact_ranks", metrics.leading_exact_ranks(occ, est, cfg.rank_tol)))
        agg += [(f"occ_rank_{r + 1}", float(v)) for r, v in enumerate(occ)]
        agg += [(f"est_rank_{r + 1}", float(v)) for r, v in enumerate(est)]
    return agg


def run(
    cfg: ExperimentConfig,
    threads: int = 1,
    progress: Callable[[str], None] | None = None,
) -> ExperimentResult:
    """Run every (k-spec, load, rep) cell; rows come out in a fixed order."""
    cells = [_Cell(ki, lam, rep) for ki in range(len(cfg.kspecs)) for lam in cfg.lambda_grid for rep in range(cfg.reps)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = dict(zip(cells, pool.map(lambda c: _run_cell(cfg, c), cells)))
    else:
        done = {c: _run_cell(cfg, c) for c in cells}

    result = ExperimentResult(cfg)
    for ki, spec in enumerate(cfg.kspecs):
        for lam in sorted(cfg.lambda_grid):
            outs = [done[_Cell(ki, lam, rep)] for rep in range(cfg.reps)]
            base = dict(
                experiment=cfg.kind.value, n=cfg.n, kspec=str(spec), lam=lam,
                G=cfg.G if cfg.kind in (Kind.STEP, Kind.CONVERGENCE) else None,
                beta=cfg.beta if cfg.kind is Kind.ZIPF else None,
                multiplier=cfg.multiplier,
            )
            for rep, o in enumerate(outs):
                echo = dict(base, dist=o.echo["dist"], lambda_h=o.echo["lambda_h"], lambda_c=o.echo["lambda_c"])
                if cfg.kind is Kind.STEP:
                    echo["lam"] = o.echo["lambda_h"] + o.echo["lambda_c"]
                for name, value in o.metrics:
                    result.rows.append(Row(**echo, rep=rep, seed=o.seed, metric=name, value=value))
            echo = dict(base, dist=outs[0].echo["dist"], lambda_h=outs[0].echo["lambda_h"], lambda_c=outs[0].echo["lambda_c"])
            if cfg.kind is Kind.STEP:
                echo["lam"] = outs[0].echo["lambda_h"] + outs[0].echo["lambda_c"]
            agg = _aggregate(cfg, outs)
            for name, value in agg:
                result.rows.append(Row(**echo, rep=AGGREGATE_REP, seed=cfg.seed, metric=name, value=value))
            if progress is not None:
                head = ", ".join(f"{k}={_fmt(v)}" for k, v in agg[:2])
                progress(f"[{cfg.kind.value}] k={spec} lambda={_fmt(lam)} reps={cfg.reps}: {head}")
    return result


def _expect(cfg: ExperimentConfig, *kinds: Kind) -> None:
    if cfg.kind not in kinds:
        raise ValueError(f"expected a {'/'.join(k.value for k in kinds)} config, got {cfg.kind.value}")


def run_subcritical(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    _expect(cfg, Kind.SUBCRITICAL)
    return run(cfg, threads)


def run_supercritical(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    _expect(cfg, Kind.SUPERCRITICAL, Kind.MIXED_SUPER)
    return run(cfg, threads)


def run_step(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    _expect(cfg, Kind.STEP)
    return run(cfg, threads)


def run_convergence(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    _expect(cfg, Kind.CONVERGENCE)
    return run(cfg, threads)


def run_zipf(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    _expect(cfg, Kind.ZIPF)
    return run(cfg, threads)


def crossover(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]]) -> float | None:
    """First load at which curve ``a`` stops being below curve ``b``.

    Both curves are ``(lambda, value)`` lists on the same grid; the crossing is
    linearly interpolated between the bracketing grid points.
    """
    diff = [(x, va - vb) for (x, va), (_, vb) in zip(sorted(a), sorted(b))]
    for (x0, d0), (x1, d1) in zip(diff, diff[1:]):
        if d0 < 0 <= d1:
            return x0 + (x1 - x0) * (-d0) / (d1 - d0)
    return None


def first_below(curve: Sequence[tuple[float, float]], level: float) -> float | None:
    for x, v in sorted(curve):
        if v < level:
            return x
    return None


def peel_check(n: int, spec: KSpec, lam: float, reps: int, seed: int) -> list[bool]:
    """Peelability of ``reps`` random hypergraphs at load ``lam``."""
    out = []
    m = _m(lam, n)
    for rep in range(reps):
        plan_seed, graph_seed, _ = _sub_seeds(cell_seed(seed, lam, rep))
        plan = hashspace.plan_cardinalities(spec, m, seed=plan_seed)
        out.append(peel(hashspace.build_hypergraph(n, plan, graph_seed)).peelable)
    return out



def stderr_progress(line: str) -> None:
    print(line, file=sys.stderr, flush=True)
