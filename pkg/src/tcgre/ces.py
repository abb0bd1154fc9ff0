"""Coordination-exhaustive search (CES) and its precomputed-distance variant (HCES).

Both enumerate ordered sequences of distinct support pairs and, for each
pair, a (receiver, supporter) robot pair. Each robot then walks its agenda
of waypoints along shortest paths. CES answers every shortest-path query
with a fresh Dijkstra run; HCES reads a Floyd-Warshall table built once.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .model import TOL, EnvironmentGraph, ProblemInstance, SearchStats, Solution, no_path
from .schedule import ScheduleBuilder
from .simplify import (SimplifiedGraph, SupportPair, UnreachableGoalError, all_pairs_spc,
                       build_simplified, enumerate_support_pairs, shortest_path)

INF = math.inf


@dataclass(frozen=True)
class PlannedEvent:
    pair: SupportPair
    receiver: int
    supporter: int


@dataclass
class CoordinationPlan:
    sequence: Tuple[PlannedEvent, ...]
    cost: float
    # per robot: list of (kind, data) waypoints, plus the chosen traversal directions
    agendas: List[List[tuple]]
    directions: List[List[Tuple[int, int]]]


def dijkstra_cost(g: EnvironmentGraph, a: int, b: int) -> float:
    if a == b:
        return 0.0
    dist = {a: 0.0}
    heap = [(0.0, a)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == b:
            return d
        if d > dist[u]:
            continue
        for v, c in g.neighbors(u):
            nd = d + c
            if nd < dist.get(v, INF):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return INF


def route_cost(agenda: Sequence[tuple], start: int, goal: int,
               spc: Callable[[int, int], float]):
    """Cheapest walk start -> agenda waypoints -> goal.

    Waypoints are ``("visit", k)`` or ``("cross", i, j, c_hat)``; a crossing
    may go either way. Returns ``(cost, directions)``.
    """
    # frontier: node -> (cost, directions so far)
    frontier: Dict[int, Tuple[float, Tuple[Tuple[int, int], ...]]] = {start: (0.0, ())}
    for item in agenda:
        nxt: Dict[int, Tuple[float, Tuple[Tuple[int, int], ...]]] = {}
        if item[0] == "visit":
            k = item[1]
            best = min(((c + spc(v, k), dirs) for v, (c, dirs) in sorted(frontier.items())),
                       key=lambda x: x[0])
            nxt[k] = best
        else:
            _, i, j, hat = item
            for a, b in ((i, j), (j, i)):
                best = min(((c + spc(v, a) + hat, dirs + ((a, b),))
                            for v, (c, dirs) in sorted(frontier.items())),
                           key=lambda x: x[0])
                if b not in nxt or best[0] < nxt[b][0] - TOL:
                    nxt[b] = best
        frontier = nxt
    return min(((c + spc(v, goal), dirs) for v, (c, dirs) in sorted(frontier.items())),
               key=lambda x: x[0])


class _Search:
    def __init__(self, sg: SimplifiedGraph, inst: ProblemInstance,
                 spc: Callable[[int, int], float], deadline_at: float, max_len: Optional[int]):
        self.sg = sg
        self.inst = inst
        self.spc = spc
        self.deadline_at = deadline_at
        self.pairs = enumerate_support_pairs(sg)
        self.hat = {e.key: e.supported_cost for e in sg.risky_edges}
        cap = len(self.pairs) if max_len is None else min(max_len, len(self.pairs))
        self.cap = cap
        g = inst.graph
        # the most one extra event can save, by the triangle inequality
        self.gain = [max(0.0, spc(*p.risky_edge) - self.hat[p.risky_edge]) for p in self.pairs]
        self.n = inst.n_robots
        self.stats = SearchStats()
        self.best: Optional[Tuple[float, tuple]] = None

    def robot_cost(self, n: int, agenda) -> Tuple[float, tuple]:
        return route_cost(agenda, self.inst.starts[n], self.inst.goals[n], self.spc)

    def run(self) -> None:
        agendas = [[] for _ in range(self.n)]
        routes = [self.robot_cost(n, []) for n in range(self.n)]
        self._dfs((), agendas, routes, [False] * len(self.pairs))

    def _dfs(self, seq, agendas, routes, used) -> None:
        if time.perf_counter() > self.deadline_at:
            self.stats.timed_out = True
            return
        self.stats.visited_joint_states += 1
        cost = sum(c for c, _ in routes)
        if self.best is None or cost < self.best[0] - TOL:
            self.best = (cost, seq, [list(a) for a in agendas], [d for _, d in routes])
        if len(seq) >= self.cap:
            return
        room = self.cap - len(seq)
        gains = sorted((g for g, u in zip(self.gain, used) if not u), reverse=True)[:room]
        if self.best is not None and cost - sum(gains) >= self.best[0] - TOL:
            return
        for p_idx, pair in enumerate(self.pairs):
            if used[p_idx]:
                continue
            i, j = pair.risky_edge
            hat = self.hat[pair.risky_edge]
            for r in range(self.n):
                for s in range(self.n):
                    if r == s:
                        continue
                    if self.stats.timed_out:
                        return
                    self.stats.expanded_joint_edges += 1
                    agendas[r].append(("cross", i, j, hat))
                    agendas[s].append(("visit", pair.support_node))
                    old_r, old_s = routes[r], routes[s]
                    routes[r] = self.robot_cost(r, agendas[r])
                    routes[s] = self.robot_cost(s, agendas[s])
                    used[p_idx] = True
                    if math.isfinite(routes[r][0]) and math.isfinite(routes[s][0]):
                        self._dfs(seq + (PlannedEvent(pair, r, s),), agendas, routes, used)
                    used[p_idx] = False
                    routes[r], routes[s] = old_r, old_s
                    agendas[r].pop()
                    agendas[s].pop()


def _realize(inst: ProblemInstance, plan_seq, directions, stats: SearchStats) -> Solution:
    """Walk every robot through the plan's events in order on a shared clock."""
    g = inst.graph
    sb = ScheduleBuilder(inst)
    next_dir = [0] * inst.n_robots

    def walk(n: int, target: int) -> Tuple[int, ...]:
        _, path = shortest_path(g, sb.position(n), target)
        return path

    for ev in plan_seq:
        r, s = ev.receiver, ev.supporter
        a, b = directions[r][next_dir[r]]
        next_dir[r] += 1
        to_a, to_k = walk(r, a), walk(s, ev.pair.support_node)
        # approach legs first, both arrive before the crossing tick
        sb.step({r: to_a, s: to_k})
        sb.step({r: (a, b), s: (ev.pair.support_node, ev.pair.support_node)},
                [(r, s, ev.pair.risky_edge, ev.pair.support_node)])
    sb.step({n: walk(n, inst.goals[n]) for n in range(inst.n_robots)})
    return sb.finish(stats)


def _solve(inst: ProblemInstance, timeout: float, sg: Optional[SimplifiedGraph],
           use_table: bool, max_len: Optional[int]) -> Solution:
    t0 = time.perf_counter()
    deadline_at = t0 + timeout
    try:
        if sg is None:
            sg = build_simplified(inst)
    except UnreachableGoalError:
        return no_path(SearchStats(wall_time=time.perf_counter() - t0))
    g = inst.graph
    if use_table:
        table = all_pairs_spc(g)

        def spc(a: int, b: int) -> float:
            return float(table[a, b])
    else:
        def spc(a: int, b: int) -> float:
            return dijkstra_cost(g, a, b)

    search = _Search(sg, inst, spc, deadline_at, max_len)
    search.run()
    stats = search.stats
    if stats.timed_out or search.best is None or not math.isfinite(search.best[0]):
        stats.wall_time = time.perf_counter() - t0
        return no_path(stats)
    _, seq, _, directions = search.best
    sol = _realize(inst, seq, directions, stats)
    sol.stats.wall_time = time.perf_counter() - t0
    return sol


def ces_solve(inst: ProblemInstance, timeout: float = 60.0,
              sg: Optional[SimplifiedGraph] = None, max_len: Optional[int] = None) -> Solution:
    return _solve(inst, timeout, sg, use_table=False, max_len=max_len)


def hces_solve(inst: ProblemInstance, timeout: float = 60.0,
               sg: Optional[SimplifiedGraph] = None, max_len: Optional[int] = None) -> Solution:
    return _solve(inst, timeout, sg, use_table=True, max_len=max_len)


def best_plan(inst: ProblemInstance, sg: Optional[SimplifiedGraph] = None,
              use_table: bool = True, timeout: float = 60.0) -> Optional[CoordinationPlan]:
    """The winning plan itself, for inspection."""
    sg = sg or build_simplified(inst)
    table = all_pairs_spc(inst.graph)
    spc = (lambda a, b: float(table[a, b])) if use_table else (
        lambda a, b: dijkstra_cost(inst.graph, a, b))
    search = _Search(sg, inst, spc, time.perf_counter() + timeout, None)
    search.run()
    if search.best is None:
        return None
    cost, seq, agendas, directions = search.best
    return CoordinationPlan(seq, cost, agendas, directions)
