"""Exact and heuristic solvers for the flying-sidekick TSP: one truck and one
drone serving all customers while minimizing completion time, in both the
wait and no-wait drone variants."""

from .instance import Instance, SortieCatalog, generate_instance, read_instance, sortie_catalog, write_instance
from .model import Variant, build, check_against_model, compute_big_m, emit_lp, extract_schedule
from .oracle import OracleResult, solve_exhaustive
from .schedule import Schedule, Sortie, Timeline, WaitMode, evaluate, objective
from .solver import SolveLimits, SolveReport, root_relaxation_gap, simplex_solve, solve_bnc

__version__ = "0.1.0"

__all__ = [
    "Instance", "SortieCatalog", "generate_instance", "read_instance",
    "sortie_catalog", "write_instance",
    "Variant", "build", "check_against_model", "compute_big_m", "emit_lp",
    "extract_schedule",
    "OracleResult", "solve_exhaustive",
    "Schedule", "Sortie", "Timeline", "WaitMode", "evaluate", "objective",
    "SolveLimits", "SolveReport", "root_relaxation_gap", "simplex_solve", "solve_bnc",
    "__version__",
]
