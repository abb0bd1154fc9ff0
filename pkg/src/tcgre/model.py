"""Environment graphs, problem instances, solutions and their JSON forms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

TOL = 1e-9

EdgeKey = Tuple[int, int]
ValidationReport = List[str]


def edge_key(i: int, j: int) -> EdgeKey:
    return (i, j) if i <= j else (j, i)


class InstanceParseError(ValueError):
    pass


class InstanceValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__(self.violations[0] if self.violations else "invalid instance")


@dataclass(frozen=True)
class RiskyEdge:
    u: int
    v: int
    reduced: float
    support: Tuple[int, ...]

    @property
    def key(self) -> EdgeKey:
        return edge_key(self.u, self.v)


@dataclass(frozen=True)
class EnvironmentGraph:
    n_nodes: int
    edges: Tuple[Tuple[int, int, float], ...]
    risky: Tuple[RiskyEdge, ...] = ()
    coord_cost: float = 0.0

    @property
    def nodes(self) -> range:
        return range(self.n_nodes)

    @cached_property
    def cost(self) -> Dict[EdgeKey, float]:
        """Base cost per undirected edge key."""
        return {edge_key(i, j): float(c) for i, j, c in self.edges}

    @cached_property
    def risky_by_key(self) -> Dict[EdgeKey, RiskyEdge]:
        return {r.key: r for r in self.risky}

    @cached_property
    def adjacency(self) -> List[List[Tuple[int, float]]]:
        adj: List[List[Tuple[int, float]]] = [[] for _ in range(self.n_nodes)]
        for (i, j), c in sorted(self.cost.items()):
            if i == j:
                continue
            adj[i].append((j, c))
            adj[j].append((i, c))
        for lst in adj:
            lst.sort()
        return adj

    def neighbors(self, i: int) -> List[Tuple[int, float]]:
        return self.adjacency[i]

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self.cost

    def supported_cost(self, i: int, j: int) -> float:
        """Receiver's cost for a supported traversal, with c' reassigned to it."""
        return self.risky_by_key[edge_key(i, j)].reduced + self.coord_cost


@dataclass(frozen=True)
class ProblemInstance:
    graph: EnvironmentGraph
    starts: Tuple[int, ...]
    goals: Tuple[int, ...]
    horizon: Optional[int] = None

    @property
    def n_robots(self) -> int:
        return len(self.starts)


@dataclass
class SearchStats:
    visited_joint_states: int = 0
    expanded_joint_edges: int = 0
    wall_time: float = 0.0
    timed_out: bool = False


@dataclass(frozen=True)
class CoordinationEvent:
    t: int
    receiver: int
    supporter: int
    edge: EdgeKey
    support_node: int


@dataclass
class Solution:
    """Time-stepped team schedule.

    ``per_robot_paths[n][t]`` is ``(node, cost accumulated by robot n up to t)``.
    All paths share one clock, so hop ``t -> t+1`` of every robot happens at
    time order ``t`` and events refer to that index.
    """

    per_robot_paths: List[List[Tuple[int, float]]] = field(default_factory=list)
    coordination_events: List[CoordinationEvent] = field(default_factory=list)
    per_robot_costs: List[float] = field(default_factory=list)
    total_cost: Optional[float] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def found(self) -> bool:
        return self.total_cost is not None

    def node_paths(self) -> List[List[int]]:
        return [[v for v, _ in p] for p in self.per_robot_paths]


def no_path(stats: SearchStats) -> Solution:
    return Solution(stats=stats)


# --------------------------------------------------------------------------
# validation


def validate_instance(inst: ProblemInstance) -> ValidationReport:
    g = inst.graph
    out: ValidationReport = []
    n = g.n_nodes
    if n < 1:
        out.append("graph has no nodes")

    def ok(v: Any) -> bool:
        return isinstance(v, int) and 0 <= v < n

    seen = set()
    for i, j, c in g.edges:
        if not (ok(i) and ok(j)):
            out.append(f"edge ({i},{j}) endpoint out of range")
            continue
        if i == j:
            out.append(f"self-loop edge ({i},{j})")
        k = edge_key(i, j)
        if k in seen:
            out.append(f"duplicate edge {k}")
        seen.add(k)
        if not (isinstance(c, (int, float)) and math.isfinite(c) and c >= 0):
            out.append(f"edge {k} has invalid cost {c!r}")

    if not (math.isfinite(g.coord_cost) and g.coord_cost >= 0):
        out.append(f"invalid coordination cost {g.coord_cost!r}")

    risky_seen = set()
    for r in g.risky:
        k = r.key
        if k in risky_seen:
            out.append(f"duplicate risky edge {k}")
        risky_seen.add(k)
        if k not in seen:
            out.append(f"risky edge {k} is not in the edge list")
        elif r.reduced > g.cost[k] + TOL:
            out.append(f"risky edge {k}: reduced cost exceeds base cost")
        if not (math.isfinite(r.reduced) and r.reduced >= 0):
            out.append(f"risky edge {k}: invalid reduced cost {r.reduced!r}")
        if not r.support:
            out.append(f"risky edge {k}: empty support list")
        for s in r.support:
            if not ok(s):
                out.append(f"risky edge {k}: support node out of range ({s})")

    if len(inst.starts) < 1:
        out.append("no robots")
    if len(inst.starts) != len(inst.goals):
        out.append("starts and goals differ in length")
    for name, seq in (("start", inst.starts), ("goal", inst.goals)):
        for idx, v in enumerate(seq):
            if not ok(v):
                out.append(f"robot {idx} {name} node out of range ({v})")
    if inst.horizon is not None and (not isinstance(inst.horizon, int) or inst.horizon < 0):
        out.append(f"invalid horizon {inst.horizon!r}")
    return out


def check_solution(inst: ProblemInstance, sol: Solution) -> ValidationReport:
    """Replay a schedule against the instance and recompute all costs."""
    g = inst.graph
    out: ValidationReport = []
    n_robots = inst.n_robots
    if sol.total_cost is None:
        return ["solution has no cost"]
    paths = sol.node_paths()
    if len(paths) != n_robots:
        return [f"expected {n_robots} paths, got {len(paths)}"]
    if any(not p for p in paths):
        return ["empty path"]
    length = len(paths[0])
    if any(len(p) != length for p in paths):
        out.append("paths have different lengths")
        return out

    for n, p in enumerate(paths):
        if p[0] != inst.starts[n]:
            out.append(f"robot {n} does not start at its start node")
        if p[-1] != inst.goals[n]:
            out.append(f"robot {n} does not end at its goal node")
        for t in range(length - 1):
            a, b = p[t], p[t + 1]
            if not (0 <= a < g.n_nodes and 0 <= b < g.n_nodes):
                out.append(f"robot {n} visits invalid node at t={t}")
                return out
            if a != b and not g.has_edge(a, b):
                out.append(f"robot {n} hop ({a},{b}) at t={t} is not an edge")

    role: Dict[Tuple[int, int], str] = {}
    receiving: Dict[Tuple[int, int], CoordinationEvent] = {}
    for ev in sol.coordination_events:
        t = ev.t
        if not 0 <= t < length - 1:
            out.append(f"event at t={t} outside the schedule")
            continue
        if ev.receiver == ev.supporter:
            out.append(f"robot {ev.receiver} supports itself at t={t}")
            continue
        for r, name in ((ev.receiver, "receiver"), (ev.supporter, "supporter")):
            if not 0 <= r < n_robots:
                out.append(f"event at t={t} names unknown robot {r}")
                break
            if (t, r) in role:
                out.append(f"robot {r} in more than one coordination at t={t}")
            role[(t, r)] = name
        else:
            rk = g.risky_by_key.get(edge_key(*ev.edge))
            hop = (paths[ev.receiver][t], paths[ev.receiver][t + 1])
            if rk is None:
                out.append(f"event edge {ev.edge} at t={t} is not risky")
            elif ev.support_node not in rk.support:
                out.append(f"node {ev.support_node} does not support edge {ev.edge}")
            if edge_key(*hop) != edge_key(*ev.edge) or hop[0] == hop[1]:
                out.append(f"receiver {ev.receiver} not traversing {ev.edge} at t={t}")
            sp = paths[ev.supporter]
            if sp[t] != ev.support_node or sp[t + 1] != ev.support_node:
                out.append(f"supporter not on support node at t={t}")
            receiving[(t, ev.receiver)] = ev
    if out:
        return out

    costs = []
    for n, p in enumerate(paths):
        total = 0.0
        for t in range(length - 1):
            a, b = p[t], p[t + 1]
            if a == b or role.get((t, n)) == "supporter":
                continue
            if (t, n) in receiving:
                total += g.supported_cost(a, b)
            else:
                total += g.cost[edge_key(a, b)]
        costs.append(total)
    if len(sol.per_robot_costs) != n_robots:
        out.append("per-robot cost list has wrong length")
    else:
        for n, (want, got) in enumerate(zip(costs, sol.per_robot_costs)):
            if abs(want - got) > TOL:
                out.append(f"cost mismatch for robot {n}: recomputed {want}, reported {got}")
    if abs(sum(costs) - sol.total_cost) > TOL:
        out.append(f"cost mismatch: recomputed total {sum(costs)}, reported {sol.total_cost}")
    return out


# --------------------------------------------------------------------------
# JSON documents


def instance_to_dict(inst: ProblemInstance) -> Dict[str, Any]:
    g = inst.graph
    doc: Dict[str, Any] = {
        "nodes": g.n_nodes,
        "edges": [[i, j, c] for i, j, c in g.edges],
        "risky": [
            {"edge": [r.u, r.v], "reduced": r.reduced, "support": list(r.support)}
            for r in g.risky
        ],
        "coord_cost": g.coord_cost,
        "robots": [{"start": s, "goal": t} for s, t in zip(inst.starts, inst.goals)],
    }
    if inst.horizon is not None:
        doc["horizon"] = inst.horizon
    return doc


def dump_instance(inst: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1)


def _num(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceParseError(f"{where}: expected a number, got {v!r}")
    return v


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceParseError(f"{where}: expected an integer, got {v!r}")
    return v


def instance_from_dict(doc: Any) -> ProblemInstance:
    if not isinstance(doc, dict):
        raise InstanceParseError("top level: expected a JSON object")
    for key in ("nodes", "edges", "robots"):
        if key not in doc:
            raise InstanceParseError(f"missing field {key!r}")
    edges = []
    for idx, e in enumerate(doc["edges"]):
        if not isinstance(e, list) or len(e) != 3:
            raise InstanceParseError(f"edges[{idx}]: expected [i, j, cost]")
        edges.append((_int(e[0], f"edges[{idx}][0]"), _int(e[1], f"edges[{idx}][1]"),
                      _num(e[2], f"edges[{idx}][2]")))
    risky = []
    for idx, r in enumerate(doc.get("risky", [])):
        where = f"risky[{idx}]"
        try:
            u, v = r["edge"]
            risky.append(RiskyEdge(
                _int(u, where + ".edge"), _int(v, where + ".edge"),
                _num(r["reduced"], where + ".reduced"),
                tuple(_int(s, where + ".support") for s in r["support"]),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InstanceParseError):
                raise
            raise InstanceParseError(f"{where}: malformed risky entry ({exc})") from None
    starts, goals = [], []
    for idx, rb in enumerate(doc["robots"]):
        if not isinstance(rb, dict) or "start" not in rb or "goal" not in rb:
            raise InstanceParseError(f"robots[{idx}]: expected {{start, goal}}")
        starts.append(_int(rb["start"], f"robots[{idx}].start"))
        goals.append(_int(rb["goal"], f"robots[{idx}].goal"))
    horizon = doc.get("horizon")
    if horizon is not None:
        horizon = _int(horizon, "horizon")
    graph = EnvironmentGraph(
        n_nodes=_int(doc["nodes"], "nodes"),
        edges=tuple(edges),
        risky=tuple(risky),
        coord_cost=_num(doc.get("coord_cost", 0.0), "coord_cost"),
    )
    return ProblemInstance(graph, tuple(starts), tuple(goals), horizon)


def load_instance(text: str) -> ProblemInstance:
    if not text.strip():
        raise InstanceParseError("empty document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    inst = instance_from_dict(doc)
    violations = validate_instance(inst)
    if violations:
        raise InstanceValidationError(violations)
    return inst


def solution_to_dict(sol: Solution) -> Dict[str, Any]:
    return {
        "per_robot_paths": [[[v, c] for v, c in p] for p in sol.per_robot_paths],
        "coordination_events": [
            {"t": e.t, "receiver": e.receiver, "supporter": e.supporter,
             "edge": list(e.edge), "support_node": e.support_node}
            for e in sol.coordination_events
        ],
        "per_robot_costs": list(sol.per_robot_costs),
        "total_cost": sol.total_cost,
        "stats": {
            "visited_joint_states": sol.stats.visited_joint_states,
            "expanded_joint_edges": sol.stats.expanded_joint_edges,
            "wall_time": sol.stats.wall_time,
            "timed_out": sol.stats.timed_out,
        },
    }


def solution_from_dict(doc: Dict[str, Any]) -> Solution:
    return Solution(
        per_robot_paths=[[(int(v), float(c)) for v, c in p] for p in doc["per_robot_paths"]],
        coordination_events=[
            CoordinationEvent(e["t"], e["receiver"], e["supporter"], tuple(e["edge"]),
                              e["support_node"])
            for e in doc["coordination_events"]
        ],
        per_robot_costs=[float(c) for c in doc["per_robot_costs"]],
        total_cost=doc["total_cost"],
        stats=SearchStats(**doc.get("stats", {})),
    )


def inst_a() -> ProblemInstance:
    """Four-node reference instance used throughout the docs and tests."""
    graph = EnvironmentGraph(
        n_nodes=4,
        edges=((0, 1, 10.0), (0, 2, 1.0), (1, 2, 8.0), (2, 3, 1.0)),
        risky=(RiskyEdge(0, 1, 2.0, (2,)),),
        coord_cost=1.0,
    )
    return ProblemInstance(graph, (0, 3), (1, 3))
