"""Team coordination on graphs with risky edges: models, exact solvers and baselines."""

from .bench import BenchConfig, BenchRecord, load_config, run_bench, summarize
from .ces import ces_solve, hces_solve
from .generators import GenSpec, GenSpecError, generate
from .hjsg import dynamic_hjsg_search, neighbors_2agent, solve_hjsg
from .jsg import build_full_jsg, solve_full_jsg, solve_jsg
from .matching import MatchingInstance, joint_edge_cost, max_weight_matching
from .model import (CoordinationEvent, EnvironmentGraph, InstanceParseError,
                    InstanceValidationError, ProblemInstance, RiskyEdge, SearchStats, Solution,
                    check_solution, dump_instance, load_instance, validate_instance)
from .oracle import OracleCapError, oracle_solve
from .simplify import SimplifiedGraph, all_pairs_spc, build_simplified

__all__ = [
    "BenchConfig", "BenchRecord", "CoordinationEvent", "EnvironmentGraph", "GenSpec",
    "GenSpecError", "InstanceParseError", "InstanceValidationError", "MatchingInstance",
    "OracleCapError", "ProblemInstance", "RiskyEdge", "SearchStats", "SimplifiedGraph",
    "Solution", "all_pairs_spc", "build_full_jsg", "build_simplified", "ces_solve",
    "check_solution", "dump_instance", "dynamic_hjsg_search", "generate", "hces_solve",
    "joint_edge_cost", "load_config", "load_instance", "max_weight_matching",
    "neighbors_2agent", "oracle_solve", "run_bench", "solve_full_jsg", "solve_hjsg",
    "solve_jsg", "summarize", "validate_instance",
]
