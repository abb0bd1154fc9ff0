"""Full joint-state graph over the simplified graph, solved with Dijkstra.

This is the unrestricted baseline: any number of robots may move in one
joint edge. States for robots that share a goal are merged, since the
robots are interchangeable.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from array import array
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .matching import joint_edge_cost
from .model import ProblemInstance, SearchStats, Solution, no_path
from .schedule import Event, expand_joint_path
from .simplify import SimplifiedGraph, UnreachableGoalError, build_simplified

DEFAULT_NODE_BUDGET = 2_000_000


class BudgetExceededError(RuntimeError):
    pass


class SearchTimeout(Exception):
    pass


@dataclass(frozen=True)
class JointState:
    positions: Tuple[int, ...]
    goals: Tuple[int, ...]

    @property
    def canonical_key(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted(zip(self.positions, self.goals)))


class Canonicalizer:
    """Sorts positions within each group of robots that share a goal."""

    def __init__(self, goals: Sequence[int]):
        by_goal: Dict[int, List[int]] = {}
        for n, g in enumerate(goals):
            by_goal.setdefault(g, []).append(n)
        self.groups = [slots for slots in by_goal.values() if len(slots) > 1]

    def __call__(self, t: Tuple[int, ...]) -> Tuple[int, ...]:
        if not self.groups:
            return t
        out = list(t)
        for slots in self.groups:
            for s, v in zip(slots, sorted(t[i] for i in slots)):
                out[s] = v
        return tuple(out)

    def permutation(self, t: Sequence[int]) -> List[int]:
        """``perm[new_slot] = old_slot`` for the sort performed by ``__call__``."""
        perm = list(range(len(t)))
        for slots in self.groups:
            for s, old in zip(slots, sorted(slots, key=lambda i: (t[i], i))):
                perm[s] = old
        return perm


def remap_robots(canon: Canonicalizer, robot_of_slot: List[int], raw: Sequence[int]) -> List[int]:
    perm = canon.permutation(raw)
    return [robot_of_slot[perm[j]] for j in range(len(raw))]


def to_robot_order(robot_of_slot: Sequence[int], slot_values: Sequence[int]) -> List[int]:
    out = [0] * len(slot_values)
    for slot, robot in enumerate(robot_of_slot):
        out[robot] = slot_values[slot]
    return out


def joint_moves(sg: SimplifiedGraph, state: Tuple[int, ...]) -> Iterator[Tuple[Tuple[int, ...], float, List[Event]]]:
    """Every simultaneous move where each robot stays or takes one super edge."""
    adj = sg.adjacency
    support = sg.support_node_set
    options = [[(p, None)] + [(u, e) for u, e in adj[p]] for p in state]
    for combo in itertools.product(*options):
        raw = tuple(u for u, _ in combo)
        if raw == state:
            continue
        cost = 0.0
        risky_move = False
        for u, e in combo:
            if e is not None:
                cost += e.base_cost
                risky_move = risky_move or e.risky
        if risky_move and any(a == b and a in support for a, b in zip(state, raw)):
            cost, events = joint_edge_cost(sg, state, raw)
            yield raw, cost, events
        else:
            yield raw, cost, []


@dataclass
class JointStateGraph:
    sg: SimplifiedGraph
    inst: ProblemInstance
    canon: Canonicalizer
    states: List[Tuple[int, ...]]
    index: Dict[Tuple[int, ...], int]
    targets: List[array] = field(repr=False)
    costs: List[array] = field(repr=False)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_edges(self) -> int:
        return sum(len(t) for t in self.targets)


def build_full_jsg(sg: SimplifiedGraph, inst: ProblemInstance,
                   node_budget: int = DEFAULT_NODE_BUDGET,
                   deadline_at: Optional[float] = None) -> JointStateGraph:
    n = inst.n_robots
    if n < 1:
        raise ValueError("need at least one robot")
    size = len(sg.super_nodes) ** n
    if size > node_budget:
        raise BudgetExceededError(
            f"full joint-state graph needs {len(sg.super_nodes)}^{n} = {size} states, "
            f"budget is {node_budget}")
    canon = Canonicalizer(inst.goals)
    states = sorted({canon(p) for p in itertools.product(sg.super_nodes, repeat=n)})
    index = {s: i for i, s in enumerate(states)}
    targets, costs = [], []
    for s in states:
        if deadline_at is not None and time.perf_counter() > deadline_at:
            raise SearchTimeout
        best: Dict[int, float] = {}
        for raw, c, _ in joint_moves(sg, s):
            j = index[canon(raw)]
            if c < best.get(j, math.inf):
                best[j] = c
        order = sorted(best)
        targets.append(array("i", order))
        costs.append(array("d", (best[j] for j in order)))
    return JointStateGraph(sg, inst, canon, states, index, targets, costs)


def solve_jsg(jsg: JointStateGraph, start: Optional[JointState] = None,
              goal: Optional[JointState] = None,
              deadline_at: Optional[float] = None,
              stats: Optional[SearchStats] = None) -> Solution:
    inst = jsg.inst
    stats = stats or SearchStats()
    t0 = time.perf_counter()
    start_pos = tuple(start.positions) if start else tuple(inst.starts)
    goal_pos = tuple(goal.positions) if goal else tuple(inst.goals)
    canon = jsg.canon
    s_idx = jsg.index[canon(start_pos)]
    g_idx = jsg.index[canon(goal_pos)]

    dist = {s_idx: 0.0}
    prev: Dict[int, int] = {}
    done = set()
    heap = [(0.0, jsg.states[s_idx], s_idx)]
    found = False
    while heap:
        if deadline_at is not None and time.perf_counter() > deadline_at:
            stats.timed_out = True
            break
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        stats.visited_joint_states += 1
        if u == g_idx:
            found = True
            break
        for v, c in zip(jsg.targets[u], jsg.costs[u]):
            if v in done:
                continue
            stats.expanded_joint_edges += 1
            nd = d + c
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, jsg.states[v], v))
    stats.wall_time += time.perf_counter() - t0
    if not found:
        return no_path(stats)

    chain = [g_idx]
    while chain[-1] != s_idx:
        chain.append(prev[chain[-1]])
    chain.reverse()
    transitions = _robot_transitions(jsg, start_pos, chain, dist)
    return expand_joint_path(jsg.sg, inst, transitions, stats)


def _robot_transitions(jsg: JointStateGraph, start_pos, chain, dist):
    canon = jsg.canon
    robot_of_slot = remap_robots(canon, list(range(len(start_pos))), start_pos)
    out = []
    for u, v in zip(chain, chain[1:]):
        src = jsg.states[u]
        want = dist[v] - dist[u]
        pick = None
        for raw, c, events in joint_moves(jsg.sg, src):
            if canon(raw) != jsg.states[v]:
                continue
            if pick is None or c < pick[1]:
                pick = (raw, c, events)
        if pick is None or pick[1] > want + 1e-6:
            raise RuntimeError("joint path reconstruction lost a transition")
        raw, _, events = pick
        src_r = to_robot_order(robot_of_slot, src)
        dst_r = to_robot_order(robot_of_slot, raw)
        ev_r = [(robot_of_slot[r], robot_of_slot[s], key, k) for r, s, key, k in events]
        out.append((src_r, dst_r, ev_r))
        robot_of_slot = remap_robots(canon, robot_of_slot, raw)
    return out


def solve_full_jsg(inst: ProblemInstance, timeout: float = 60.0,
                   node_budget: int = DEFAULT_NODE_BUDGET,
                   sg: Optional[SimplifiedGraph] = None) -> Solution:
    """Simplify, materialize the whole joint-state graph, then run Dijkstra."""
    t0 = time.perf_counter()
    deadline_at = t0 + timeout
    stats = SearchStats()
    try:
        if sg is None:
            sg = build_simplified(inst)
        if time.perf_counter() > deadline_at:
            raise SearchTimeout
        jsg = build_full_jsg(sg, inst, node_budget, deadline_at)
        sol = solve_jsg(jsg, deadline_at=deadline_at, stats=stats)
    except SearchTimeout:
        stats.timed_out = True
        sol = no_path(stats)
    except UnreachableGoalError:
        sol = no_path(stats)
    sol.stats.wall_time = time.perf_counter() - t0
    return sol
