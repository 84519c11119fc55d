"""Command-line front end.

    cmslab subcritical --k 3 --k "(3,14;0.885)" --lambdas 0.1:1.0:0.05 --out transition.csv
    cmslab zipf --beta 0.7 --lambda 5 --k 2 --multiplier 10000 --out waterfall.csv --plot-script waterfall.py
    cmslab peel-check --n 50 --k 3 --lambda 0.5 --reps 100
    cmslab selftest

CSV goes to ``--out`` (written atomically) or to standard output; progress
lines go to standard error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

from . import experiments, streams
from .experiments import ExperimentConfig, Kind
from .hashspace import KSpecError, PerClass, parse_kspec
from .selftest import run_selftest

DEFAULT_SEED = 42
SEED_ENV = "CMSLAB_SEED"

_DEFAULTS = {
    Kind.SUBCRITICAL: dict(k=["3"], lambdas="0.1:1.0:0.05"),
    Kind.SUPERCRITICAL: dict(k=["1", "2"], lambdas="1:20:1"),
    Kind.MIXED_SUPER: dict(k=["1", "(1,3;0.8)"], lambdas="5:80:5"),
    Kind.STEP: dict(k=["3"], lambdas="0.05:1.0:0.05", lambda_c=5.0, G=20.0),
    Kind.CONVERGENCE: dict(k=["2", "3", "(2,5)"], lambdas="1:50:1", G=10.0),
    Kind.ZIPF: dict(k=["2"], lambdas="5", beta=0.7),
}

# which --dist families each experiment accepts
_DIST_FOR = {
    Kind.SUBCRITICAL: streams.Uniform,
    Kind.SUPERCRITICAL: streams.Uniform,
    Kind.MIXED_SUPER: streams.Uniform,
    Kind.STEP: streams.Step,
    Kind.ZIPF: streams.Zipf,
}


class UsageError(ValueError):
    pass


@dataclass
class CliInvocation:
    subcommand: str
    config: ExperimentConfig | None = None
    threads: int = 1
    out: str | None = None
    plot_script: str | None = None
    peel: dict = field(default_factory=dict)


def parse_grid(text: str) -> tuple[float, ...]:
    """``a:b:step`` (inclusive of b) or a comma-separated list."""
    text = text.strip()
    if not text:
        raise UsageError("empty load grid")
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise UsageError(f"grid range must be a:b:step, got {text!r}")
            a, b, step = parts
            if step <= 0 or b < a:
                raise UsageError(f"bad grid range {text!r}")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            grid = tuple(round(a + i * step, 12) for i in range(count))
        else:
            grid = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"malformed load grid {text!r}") from None
    if not grid:
        raise UsageError("empty load grid")
    return grid


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmslab", description="Conservative Count-Min error-regime experiments.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for kind in Kind:
        p = sub.add_parser(kind.value)
        p.add_argument("--n", type=int, default=1000, help="counter array size")
        p.add_argument("--k", action="append", help="k-spec; repeat to compare several")
        p.add_argument("--k-hot", type=int, help="cardinality for hot elements (with --k-cold)")
        p.add_argument("--k-cold", type=int)
        p.add_argument("--dist", help="uniform:m, step:mh,mc,G or zipf:m,beta")
        p.add_argument("--lambdas", help="grid as start:stop:step (inclusive) or a comma list")
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--lambda-c", type=float)
        p.add_argument("--G", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--multiplier", type=int, default=5000, help="stream length per distinct element")
        p.add_argument("--reps", type=int, default=10)
        p.add_argument("--seed", type=int, help="master seed (default $CMSLAB_SEED, else 42)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", help="CSV path (default stdout)")
        p.add_argument("--plot-script", help="also write a matplotlib script for --out")
        if kind is Kind.ZIPF:
            p.add_argument("--small-k-top", action="store_true",
                           help="give the smaller cardinality to the most frequent elements")
    pc = sub.add_parser("peel-check")
    pc.add_argument("--n", type=int, default=1000)
    pc.add_argument("--k", default="3")
    pc.add_argument("--lambda", dest="lam", type=float, required=True)
    pc.add_argument("--reps", type=int, default=10)
    pc.add_argument("--seed", type=int)
    sub.add_parser("selftest")
    return parser


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def parse_args(argv: list[str] | None = None) -> CliInvocation:
    ns = _build_parser().parse_args(argv)
    if ns.subcommand == "selftest":
        return CliInvocation("selftest")
    try:
        if ns.subcommand == "peel-check":
            return CliInvocation(
                "peel-check",
                peel=dict(n=ns.n, spec=parse_kspec(ns.k), lam=ns.lam, reps=ns.reps, seed=_seed(ns.seed)),
            )
        return _experiment_invocation(ns)
    except (KSpecError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from None


def _experiment_invocation(ns: argparse.Namespace) -> CliInvocation:
    kind = Kind(ns.subcommand)
    defaults = _DEFAULTS[kind]

    kspecs = [parse_kspec(t) for t in (ns.k or [])]
    if (ns.k_hot is None) != (ns.k_cold is None):
        raise UsageError("--k-hot and --k-cold go together")
    if ns.k_hot is not None:
        kspecs.append(PerClass((("hot", ns.k_hot), ("cold", ns.k_cold))))
    if not kspecs:
        kspecs = [parse_kspec(t) for t in defaults["k"]]

    if ns.lambdas is not None and ns.lam is not None:
        raise UsageError("give either --lambdas or --lambda")
    grid = None
    if ns.lambdas is not None:
        grid = parse_grid(ns.lambdas)
    elif ns.lam is not None:
        grid = (ns.lam,)

    lambda_c, G, beta = ns.lambda_c, ns.G, ns.beta
    if ns.dist is not None:
        dist = streams.parse_distribution(ns.dist)
        want = _DIST_FOR.get(kind)
        if want is None or not isinstance(dist, want):
            raise UsageError(f"--dist {ns.dist!r} does not fit the {kind.value} experiment")
        if grid is not None:
            raise UsageError("--dist fixes the load; drop --lambdas/--lambda")
        if isinstance(dist, streams.Step):
            if lambda_c is not None or G is not None:
                raise UsageError("--dist step:... already sets --lambda-c and --G")
            grid, lambda_c, G = (dist.m_hot / ns.n,), dist.m_cold / ns.n, dist.G
        elif isinstance(dist, streams.Zipf):
            if beta is not None:
                raise UsageError("--dist zipf:... already sets --beta")
            grid, beta = (dist.m / ns.n,), dist.beta
        else:
            grid = (dist.m / ns.n,)
    if grid is None:
        grid = parse_grid(defaults["lambdas"])

    if kind is Kind.STEP:
        lambda_c = defaults["lambda_c"] if lambda_c is None else lambda_c
    elif lambda_c is not None:
        raise UsageError(f"--lambda-c does not apply to {kind.value}")
    if kind in (Kind.STEP, Kind.CONVERGENCE):
        G = defaults["G"] if G is None else G
    elif G is not None:
        raise UsageError(f"--G does not apply to {kind.value}")
    if kind is Kind.ZIPF:
        beta = defaults["beta"] if beta is None else beta
    elif beta is not None:
        raise UsageError(f"--beta does not apply to {kind.value}")
    if ns.threads < 1:
        raise UsageError("--threads must be >= 1")

    config = ExperimentConfig(
        kind=kind,
        kspecs=tuple(kspecs),
        lambda_grid=grid,
        n=ns.n,
        multiplier=ns.multiplier,
        reps=ns.reps,
        seed=_seed(ns.seed),
        lambda_c=lambda_c,
        G=G,
        beta=beta,
        small_k_top=getattr(ns, "small_k_top", False),
    )
    return CliInvocation(kind.value, config, ns.threads, ns.out, ns.plot_script)


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".cmslab-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_PLOT_METRICS = {
    Kind.SUBCRITICAL: ["combined_error"],
    Kind.SUPERCRITICAL: ["combined_error"],
    Kind.MIXED_SUPER: ["combined_error"],
    Kind.STEP: ["errhot", "errhot_nocold"],
    Kind.CONVERGENCE: ["mean_est_hot", "mean_est_cold"],
    Kind.ZIPF: ["occ_rank", "est_rank"],
}

_PLOT_TEMPLATE = '''\
"""Plot {csv_name} (written by cmslab {kind}). Run with: python {script_name}"""
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV = os.path.join(HERE, {csv_rel!r})
METRICS = {metrics!r}
RANKS = {ranks!r}

series = defaultdict(list)
with open(CSV, newline="") as fh:
    for row in csv.DictReader(fh):
        if row["rep"] != "-1":
            continue
        metric = row["metric"]
        if RANKS:
            base, _, rank = metric.rpartition("_")
            if base in METRICS:
                series[(row["kspec"], row["lambda"], base)].append((int(rank), float(row["value"])))
        elif metric in METRICS:
            x = float(row["lambda_h"] or row["lambda"])
            series[(row["kspec"], metric)].append((x, float(row["value"])))

fig, ax = plt.subplots()
for key, pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="" if RANKS else ".", label=" ".join(key))
if RANKS:
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("frequency rank")
else:
    ax.set_xlabel({xlabel!r})
ax.legend()
fig.savefig(os.path.splitext(CSV)[0] + ".png", dpi=150)
'''


def plot_script(kind: Kind, csv_path: str, script_path: str) -> str:
    csv_rel = os.path.relpath(os.path.abspath(csv_path), os.path.dirname(os.path.abspath(script_path)))
    return _PLOT_TEMPLATE.format(
        csv_name=os.path.basename(csv_path),
        script_name=os.path.basename(script_path),
        kind=kind.value,
        csv_rel=csv_rel,
        metrics=_PLOT_METRICS[kind],
        ranks=kind is Kind.ZIPF,
        xlabel="lambda_h" if kind is Kind.STEP else "lambda",
    )


def _err(msg: str) -> None:
    print(f"cmslab: {msg}", file=sys.stderr)


def execute(inv: CliInvocation) -> int:
    if inv.subcommand == "selftest":
        results = run_selftest()
        for name, ok in results:
            print(f"{'PASS' if ok else 'FAIL'} {name}")
        failed = sum(not ok for _, ok in results)
        print(f"{len(results) - failed}/{len(results)} checks passed")
        return 1 if failed else 0
    if inv.subcommand == "peel-check":
        p = inv.peel
        flags = experiments.peel_check(p["n"], p["spec"], p["lam"], p["reps"], p["seed"])
        print(f"k={p['spec']} n={p['n']} lambda={p['lam']:g} reps={p['reps']} "
              f"peelable_fraction={sum(flags) / len(flags):.9g}")
        return 0

    if inv.plot_script and not inv.out:
        _err("--plot-script needs --out")
        return 2
    result = experiments.run(inv.config, threads=inv.threads, progress=experiments.stderr_progress)
    text = result.to_csv()
    try:
        if inv.out:
            write_atomic(inv.out, text)
            if inv.plot_script:
                write_atomic(inv.plot_script, plot_script(inv.config.kind, inv.out, inv.plot_script))
        else:
            sys.stdout.write(text)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        inv = parse_args(argv)
    except UsageError as exc:
        _err(str(exc))
        return 2
    return execute(inv)


if __name__ == "__main__":
    sys.exit(main())
