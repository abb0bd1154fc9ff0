"""Exhaustive time-expanded solver on the original graph.

Enumerates every joint move per time step together with every admissible
set of coordinations, charging receivers c~ and supporters c'. Only meant
for tiny instances; it is the ground truth the other solvers are checked
against.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .model import ProblemInstance, SearchStats, Solution, edge_key, no_path
from .schedule import ScheduleBuilder

MAX_ROBOTS = 3
MAX_NODES = 6
MAX_HORIZON = 18


class OracleCapError(ValueError):
    pass


@dataclass(frozen=True)
class TimedConfiguration:
    t: int
    positions: Tuple[int, ...]


def _coordination_options(g, src: Sequence[int], dst: Sequence[int]):
    """All sets of disjoint (receiver, supporter) pairs for one joint step.

    A supporter must stay on a support node of the receiver's risky edge for
    the whole step. Yields ``(cost delta, pairs)`` with the empty set first.
    """
    movers = []
    for n, (a, b) in enumerate(zip(src, dst)):
        if a != b:
            r = g.risky_by_key.get(edge_key(a, b))
            if r is not None:
                movers.append((n, r))
    stayers = [n for n, (a, b) in enumerate(zip(src, dst)) if a == b]
    yield 0.0, ()
    if not movers or not stayers:
        return

    def rec(i: int, used: frozenset, delta: float, pairs: tuple):
        if i == len(movers):
            if pairs:
                yield delta, pairs
            return
        yield from rec(i + 1, used, delta, pairs)
        n, r = movers[i]
        for m in stayers:
            if m not in used and src[m] in r.support:
                d = r.reduced + g.coord_cost - g.cost[r.key]
                yield from rec(i + 1, used | {m}, delta + d, pairs + ((n, m, r.key, src[m]),))

    yield from rec(0, frozenset(), 0.0, ())


def oracle_solve(inst: ProblemInstance, horizon: Optional[int] = None,
                 timeout: Optional[float] = None) -> Solution:
    t0 = time.perf_counter()
    g = inst.graph
    n_robots = inst.n_robots
    T = horizon if horizon is not None else inst.horizon
    if T is None:
        T = g.n_nodes * n_robots
    if n_robots > MAX_ROBOTS or g.n_nodes > MAX_NODES or T > MAX_HORIZON:
        raise OracleCapError(
            f"oracle limited to N<={MAX_ROBOTS}, |V|<={MAX_NODES}, T<={MAX_HORIZON}; "
            f"got N={n_robots}, |V|={g.n_nodes}, T={T}")
    stats = SearchStats()
    start, goal = tuple(inst.starts), tuple(inst.goals)
    moves = [[v] + [u for u, _ in g.neighbors(v)] for v in range(g.n_nodes)]

    # layer[t][config] = (cost, parent config, coordination pairs)
    layers: List[Dict[Tuple[int, ...], Tuple[float, Optional[tuple], tuple]]] = [
        {start: (0.0, None, ())}]
    best_t = 0 if start == goal else None
    for t in range(T):
        if timeout is not None and time.perf_counter() - t0 > timeout:
            stats.timed_out = True
            break
        nxt: Dict[Tuple[int, ...], Tuple[float, Optional[tuple], tuple]] = {}
        for src, (cost, _, _) in layers[t].items():
            stats.visited_joint_states += 1
            for dst in itertools.product(*(moves[v] for v in src)):
                if dst == src:
                    # all-stay only as idle time once everyone is home
                    if src != goal:
                        continue
                    step, pairs = 0.0, ()
                else:
                    base = sum(g.cost[edge_key(a, b)] for a, b in zip(src, dst) if a != b)
                    step, pairs = min(
                        ((base + d, p) for d, p in _coordination_options(g, src, dst)),
                        key=lambda x: x[0])
                stats.expanded_joint_edges += 1
                total = cost + step
                old = nxt.get(dst)
                if old is None or total < old[0]:
                    nxt[dst] = (total, src, pairs)
        layers.append(nxt)
        if goal in nxt and (best_t is None or nxt[goal][0] < layers[best_t][goal][0]):
            best_t = t + 1
    stats.wall_time = time.perf_counter() - t0
    if best_t is None:
        return no_path(stats)

    configs = [goal]
    steps = []
    for t in range(best_t, 0, -1):
        _, parent, pairs = layers[t][configs[-1]]
        steps.append((parent, configs[-1], pairs))
        configs.append(parent)
    steps.reverse()
    sb = ScheduleBuilder(inst)
    for src, dst, pairs in steps:
        hops = {n: (a, b) for n, (a, b) in enumerate(zip(src, dst)) if a != b}
        if hops:
            sb.step(hops, pairs)
    sol = sb.finish(stats)
    sol.stats.wall_time = time.perf_counter() - t0
    return sol
