"""Benchmark harness: generate instances, run solvers with timeouts, write CSV."""

from __future__ import annotations

import csv
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Dict, Iterable, List, Optional, TextIO, Tuple

from .ces import ces_solve, hces_solve
from .generators import FAMILIES, GenSpec, generate
from .hjsg import solve_hjsg
from .jsg import BudgetExceededError, solve_full_jsg
from .model import TOL, ProblemInstance, SearchStats, Solution, no_path
from .oracle import OracleCapError, oracle_solve

log = logging.getLogger(__name__)


def _oracle(inst: ProblemInstance, timeout: float) -> Solution:
    return oracle_solve(inst, timeout=timeout)


SOLVERS: Dict[str, Callable[[ProblemInstance, float], Solution]] = {
    "hjsg": lambda inst, timeout: solve_hjsg(inst, timeout),
    "jsg": lambda inst, timeout: solve_full_jsg(inst, timeout),
    "ces": lambda inst, timeout: ces_solve(inst, timeout),
    "hces": lambda inst, timeout: hces_solve(inst, timeout),
    "oracle": _oracle,
}
# solvers whose answer is a proven optimum, so any disagreement is a defect
OPTIMAL_SOLVERS = ("hjsg", "jsg", "oracle")


class ConfigError(ValueError):
    pass


@dataclass
class BenchRecord:
    instance_id: str
    family: str
    node_count: int
    agent_count: int
    solver: str
    total_cost: Optional[float]
    wall_time: float
    timed_out: bool
    visited_joint_states: int
    expanded_joint_edges: int
    seed: int


CSV_COLUMNS = [f.name for f in fields(BenchRecord)]


@dataclass
class BenchConfig:
    solvers: List[str]
    families: List[str] = field(default_factory=lambda: ["random"])
    node_counts: List[int] = field(default_factory=lambda: [6])
    agent_counts: List[int] = field(default_factory=lambda: [2])
    repeats: int = 3
    timeout: float = 60.0
    seed: int = 12
    risky_ratio: float = 0.2
    supports_per_risky: int = 1
    edge_density: float = 0.3
    workers: int = 1

    def check(self) -> None:
        if not self.solvers:
            raise ConfigError("solver list is empty")
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solvers {unknown}; choose from {sorted(SOLVERS)}")
        bad = [f for f in self.families if f not in FAMILIES]
        if bad:
            raise ConfigError(f"unknown families {bad}")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.timeout < 0:
            raise ConfigError("timeout must be >= 0")

    def cells(self) -> Iterable[Tuple[str, GenSpec]]:
        for family in self.families:
            for n in self.node_counts:
                for a in self.agent_counts:
                    for r in range(self.repeats):
                        spec = GenSpec(family, n, a, self.risky_ratio, self.supports_per_risky,
                                       self.seed + r, self.edge_density)
                        yield f"{family}-n{n}-a{a}-s{spec.seed}", spec


_ALIASES = {"family": "families", "node_count": "node_counts", "agent_count": "agent_counts",
            "solver": "solvers"}


def load_config(text: str) -> BenchConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    kwargs = {}
    known = {f.name for f in fields(BenchConfig)}
    for key, value in doc.items():
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"unknown config field {key!r}")
        if key in ("families", "node_counts", "agent_counts", "solvers") and not isinstance(value, list):
            value = [value]
        kwargs[key] = value
    if "solvers" not in kwargs:
        raise ConfigError("config needs a solver list")
    cfg = BenchConfig(**kwargs)
    cfg.check()
    return cfg


def run_cell(instance_id: str, spec: GenSpec, solver: str, timeout: float) -> BenchRecord:
    inst = generate(spec)
    try:
        sol = SOLVERS[solver](inst, timeout)
    except (BudgetExceededError, OracleCapError) as exc:
        log.warning("%s on %s skipped: %s", solver, instance_id, exc)
        sol = no_path(SearchStats())
    st = sol.stats
    timed_out = st.timed_out or st.wall_time >= timeout
    return BenchRecord(
        instance_id=instance_id, family=spec.family, node_count=spec.node_count,
        agent_count=spec.agent_count, solver=solver,
        total_cost=None if timed_out else sol.total_cost,
        wall_time=max(st.wall_time, timeout) if timed_out else st.wall_time,
        timed_out=timed_out, visited_joint_states=st.visited_joint_states,
        expanded_joint_edges=st.expanded_joint_edges, seed=spec.seed,
    )


def _run_packed(args) -> BenchRecord:
    return run_cell(*args)


@dataclass
class BenchSummary:
    per_solver: Dict[str, dict]
    per_agent_count: Dict[str, Dict[int, dict]]
    cost_violations: List[dict]

    @property
    def ok(self) -> bool:
        return not self.cost_violations

    def to_dict(self) -> dict:
        return asdict(self)

    def format(self) -> str:
        lines = [f"{'solver':8} {'runs':>5} {'done':>5} {'rate':>7} {'median_s':>10}"]
        for name, row in self.per_solver.items():
            med = "-" if row["median_wall_time"] is None else f"{row['median_wall_time']:.4f}"
            lines.append(f"{name:8} {row['runs']:>5} {row['completed']:>5} "
                         f"{row['completion_rate']:>7.1%} {med:>10}")
        lines.append("")
        lines.append("median wall time (s) by agent count, completed runs only")
        for name, by_n in self.per_agent_count.items():
            cells = "  ".join(
                f"N={n}: {'-' if r['median_wall_time'] is None else format(r['median_wall_time'], '.4f')}"
                f" ({r['completed']}/{r['runs']})"
                for n, r in sorted(by_n.items()))
            lines.append(f"{name:8} {cells}")
        lines.append("")
        lines.append(f"cost-equality violations: {len(self.cost_violations)}")
        for v in self.cost_violations:
            lines.append(f"  {v['instance_id']}: {v['solver_a']}={v['cost_a']} "
                         f"vs {v['solver_b']}={v['cost_b']}")
        return "\n".join(lines)


def _median(xs: List[float]) -> Optional[float]:
    return statistics.median(xs) if xs else None


def summarize(records: List[BenchRecord]) -> BenchSummary:
    per_solver: Dict[str, dict] = {}
    per_agent: Dict[str, Dict[int, dict]] = {}
    for rec in records:
        row = per_solver.setdefault(rec.solver, {"runs": 0, "completed": 0, "_times": []})
        cell = per_agent.setdefault(rec.solver, {}).setdefault(
            rec.agent_count, {"runs": 0, "completed": 0, "_times": []})
        for r in (row, cell):
            r["runs"] += 1
            if rec.total_cost is not None:
                r["completed"] += 1
                r["_times"].append(rec.wall_time)
    for r in list(per_solver.values()) + [c for d in per_agent.values() for c in d.values()]:
        r["completion_rate"] = r["completed"] / r["runs"]
        r["median_wall_time"] = _median(r.pop("_times"))

    by_instance: Dict[str, Dict[str, float]] = {}
    for rec in records:
        if rec.solver in OPTIMAL_SOLVERS and rec.total_cost is not None:
            by_instance.setdefault(rec.instance_id, {})[rec.solver] = rec.total_cost
    violations = []
    for iid, costs in by_instance.items():
        names = sorted(costs)
        for x in range(len(names)):
            for y in range(x + 1, len(names)):
                a, b = names[x], names[y]
                if abs(costs[a] - costs[b]) > TOL:
                    violations.append({"instance_id": iid, "solver_a": a, "cost_a": costs[a],
                                       "solver_b": b, "cost_b": costs[b]})
    return BenchSummary(per_solver, per_agent, violations)


def write_header(out: TextIO) -> csv.writer:
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    return writer


def run_bench(config: BenchConfig, out: Optional[TextIO] = None) -> Tuple[List[BenchRecord], BenchSummary]:
    """Run every (instance, solver) cell; rows are flushed to ``out`` as they finish."""
    config.check()
    jobs = [(iid, spec, solver, config.timeout)
            for iid, spec in config.cells() for solver in config.solvers]
    writer = write_header(out) if out is not None else None
    records: List[BenchRecord] = []

    def emit(rec: BenchRecord) -> None:
        records.append(rec)
        if writer is not None:
            writer.writerow([getattr(rec, c) if c != "total_cost" else
                             ("" if rec.total_cost is None else repr(rec.total_cost))
                             for c in CSV_COLUMNS])
            out.flush()

    try:
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                for rec in pool.map(_run_packed, jobs):
                    emit(rec)
        else:
            for job in jobs:
                emit(run_cell(*job))
    except KeyboardInterrupt:
        log.warning("interrupted after %d of %d records", len(records), len(jobs))
        raise
    return records, summarize(records)


def read_records(text: TextIO) -> List[BenchRecord]:
    out = []
    for row in csv.DictReader(text):
        out.append(BenchRecord(
            instance_id=row["instance_id"], family=row["family"],
            node_count=int(row["node_count"]), agent_count=int(row["agent_count"]),
            solver=row["solver"],
            total_cost=float(row["total_cost"]) if row["total_cost"] else None,
            wall_time=float(row["wall_time"]), timed_out=row["timed_out"] == "True",
            visited_joint_states=int(row["visited_joint_states"]),
            expanded_joint_edges=int(row["expanded_joint_edges"]), seed=int(row["seed"]),
        ))
    return out
