"""Conservative Count-Min sketches with a variable number of hash functions.

Modules: ``hashspace`` (k-specs, simulated hashing), ``hypergraph`` (peeling),
``sketch`` (counter array), ``streams`` (input models), ``metrics`` (errors,
saturation) and ``experiments`` (parameter sweeps).
"""

from .hashspace import EdgePlan, KSpec, Mixed, PerClass, Uniform, build_hypergraph, parse_kspec, plan_cardinalities
from .hypergraph import HashHypergraph, PeelReport, is_peelable, load_factor, peel
from .sketch import Discipline, Sketch, new_sketch, run_stream

__version__ = "0.1.0"

__all__ = [
    "Discipline", "EdgePlan", "HashHypergraph", "KSpec", "Mixed", "PeelReport", "PerClass",
    "Sketch", "Uniform", "build_hypergraph", "is_peelable", "load_factor", "new_sketch",
    "parse_kspec", "peel", "plan_cardinalities", "run_stream",
]
