"""Dynamic homogeneous joint-state graph search.

Joint states are generated on the fly, at most two robots change location
per transition, and robots sitting on their goal may retire. The search
ends when every robot has retired.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .jsg import Canonicalizer, remap_robots, to_robot_order
from .model import ProblemInstance, SearchStats, Solution, no_path
from .schedule import Event, expand_joint_path
from .simplify import SimplifiedGraph, UnreachableGoalError, build_simplified

RETIRED = -1
DEFAULT_TIMEOUT = 60.0

# move descriptors kept for path reconstruction
SINGLE, SUPPORTED, PAIR, RETIRE = "single", "supported", "pair", "retire"


@dataclass(frozen=True)
class ActiveJointState:
    """Robot-indexed view of a search state.

    ``costs`` holds the cost each robot has accumulated so far; for retired
    robots that is their final goal cost.
    """

    active: Dict[int, int]
    costs: Dict[int, float] = field(default_factory=dict)

    @property
    def retired_costs(self) -> Dict[int, float]:
        return {n: c for n, c in self.costs.items() if n not in self.active}

    @property
    def terminal(self) -> bool:
        return not self.active


class _Expander:
    def __init__(self, sg: SimplifiedGraph, goals, pair_moves: bool, auto_retire: bool,
                 retire_anytime: bool = False):
        self.goals = tuple(goals)
        self.retire_anytime = retire_anytime
        self.pair_moves = pair_moves
        self.auto_retire = auto_retire
        self.nbrs: Dict[int, List[Tuple[int, float]]] = {}
        self.supported: Dict[int, List[Tuple[int, float, frozenset]]] = {}
        for v, lst in sg.adjacency.items():
            self.nbrs[v] = [(u, e.base_cost) for u, e in lst]
            self.supported[v] = [(u, e.supported_cost, frozenset(e.support_nodes))
                                 for u, e in lst if e.risky]

    def retire_arrivals(self, s: Tuple[int, ...]) -> Tuple[int, ...]:
        goals = self.goals
        if any(p == goals[i] for i, p in enumerate(s)):
            return tuple(RETIRED if p == goals[i] else p for i, p in enumerate(s))
        return s

    def retire_when_all_home(self, s: Tuple[int, ...]) -> Tuple[int, ...]:
        goals = self.goals
        for i, p in enumerate(s):
            if p != RETIRED and p != goals[i]:
                return s
        return (RETIRED,) * len(s)

    def successors(self, s: Tuple[int, ...]) -> Iterator[Tuple[Tuple[int, ...], float, tuple]]:
        nbrs, supported, goals = self.nbrs, self.supported, self.goals
        active = [i for i, p in enumerate(s) if p != RETIRED]
        if self.auto_retire:
            fix = self.retire_arrivals
        elif self.retire_anytime:
            fix = None
        else:
            fix = self.retire_when_all_home
        for a in active:
            p = s[a]
            if self.retire_anytime and p == goals[a]:
                yield s[:a] + (RETIRED,) + s[a + 1:], 0.0, (RETIRE, a)
            head, tail = s[:a], s[a + 1:]
            for u, c in nbrs[p]:
                t = head + (u,) + tail
                yield (fix(t) if fix else t), c, (SINGLE, a)
        for x in range(len(active)):
            a = active[x]
            pa = s[a]
            for y in range(x + 1, len(active)):
                b = active[y]
                pb = s[b]
                for mover, stayer, pm, ps in ((a, b, pa, pb), (b, a, pb, pa)):
                    for u, c, sup in supported[pm]:
                        if ps in sup:
                            t = s[:mover] + (u,) + s[mover + 1:]
                            yield (fix(t) if fix else t), c, (SUPPORTED, mover, stayer)
                if self.pair_moves:
                    for ua, ca in nbrs[pa]:
                        for ub, cb in nbrs[pb]:
                            t = list(s)
                            t[a] = ua
                            t[b] = ub
                            t = tuple(t)
                            yield (fix(t) if fix else t), ca + cb, (PAIR, a, b, ca, cb)


def neighbors_2agent(sg: SimplifiedGraph, s: ActiveJointState, goals,
                     pair_moves: bool = True, auto_retire: bool = False,
                     retire_anytime: bool = False):
    """Successors of ``s`` as ``(ActiveJointState, cost, events)`` triples."""
    n = len(goals)
    state = tuple(s.active.get(i, RETIRED) for i in range(n))
    exp = _Expander(sg, goals, pair_moves, auto_retire, retire_anytime)
    out = []
    for t, c, move in exp.successors(state):
        events = _events_for(sg, state, t, move)
        costs = {i: s.costs.get(i, 0.0) for i in range(n)}
        if move[0] == PAIR:
            costs[move[1]] += move[3]
            costs[move[2]] += move[4]
        elif move[0] != RETIRE:
            costs[move[1]] += c
        active = {i: p for i, p in enumerate(t) if p != RETIRED}
        out.append((ActiveJointState(active, costs), c, events))
    return out


def _events_for(sg: SimplifiedGraph, src, dst, move) -> List[Event]:
    if move[0] != SUPPORTED:
        return []
    _, r, k = move
    e = sg.edge(src[r], dst[r] if dst[r] != RETIRED else sg.instance.goals[r])
    return [(r, k, e.key, src[k])]


def dynamic_hjsg_search(sg: SimplifiedGraph, inst: ProblemInstance,
                        deadline: float = DEFAULT_TIMEOUT,
                        pair_moves: bool = False, auto_retire: bool = False,
                        retire_anytime: bool = False, engine: str = "auto") -> Solution:
    """Dijkstra over joint states generated on demand.

    By default robots retire together, at zero cost, on the move that brings
    the last one home: a retired copy of a state costs the same as the copy
    where that robot simply waits at home, and the waiting copy can still
    offer support, so earlier retirement never lowers the cost and only adds
    states. ``retire_anytime`` instead offers each robot an explicit
    zero-cost retirement whenever it is home;
    ``auto_retire`` removes robots on arrival as the original pseudocode does,
    which can lose optimality when a finished robot would have been a useful
    supporter.

    ``pair_moves`` adds successors where two robots both take a super edge
    at base cost. Each one splits into two single moves with the same total,
    so they never change a distance; they are off by default because they
    multiply the number of relaxed edges roughly tenfold.

    ``engine`` picks the pure Python loop or the compiled one; both pop the
    same states in the same order. ``"auto"`` uses the compiled loop when the
    packed state space is large enough to pay for it and small enough to fit.
    """
    t0 = time.perf_counter()
    deadline_at = t0 + deadline
    stats = SearchStats()
    exp = _Expander(sg, inst.goals, pair_moves, auto_retire, retire_anytime)
    canon = Canonicalizer(inst.goals)
    start_raw = tuple(inst.starts)
    if auto_retire:
        start_raw = exp.retire_arrivals(start_raw)
    elif not retire_anytime:
        start_raw = exp.retire_when_all_home(start_raw)
    start = canon(start_raw)

    if engine == "auto":
        engine = "compiled" if _compiled_fits(sg, inst.n_robots) else "python"
    if engine == "compiled":
        terminal, prev = _compiled_search(sg, inst, exp, canon, start, deadline_at,
                                          pair_moves, auto_retire, retire_anytime, stats)
    elif engine == "python":
        terminal, prev = _python_search(exp, canon, start, deadline_at, stats)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    stats.wall_time = time.perf_counter() - t0
    if terminal is None:
        return no_path(stats)
    sol = reconstruct_paths(sg, inst, start_raw, start, terminal, prev, stats)
    sol.stats.wall_time = time.perf_counter() - t0
    return sol


def _python_search(exp: _Expander, canon: Canonicalizer, start, deadline_at: float,
                   stats: SearchStats):
    dist: Dict[Tuple[int, ...], float] = {start: 0.0}
    prev: Dict[Tuple[int, ...], tuple] = {}
    visited = set()
    heap = [(0.0, start)]
    while heap:
        if time.perf_counter() > deadline_at:
            stats.timed_out = True
            return None, prev
        d, s = heapq.heappop(heap)
        if s in visited:
            continue
        visited.add(s)
        stats.visited_joint_states += 1
        if all(p == RETIRED for p in s):
            return s, prev
        for raw, c, move in exp.successors(s):
            t = canon(raw)
            if t in visited:
                continue
            stats.expanded_joint_edges += 1
            nd = d + c
            if nd < dist.get(t, math.inf):
                dist[t] = nd
                prev[t] = (s, raw, move)
                heapq.heappush(heap, (nd, t))
    return None, prev


# packed state spaces outside this window go to the Python loop: below it the
# compiled loop's fixed costs dominate, above it the dense arrays get too big
COMPILED_MIN_STATES = 20_000
COMPILED_MAX_STATES = 1 << 25
CHUNK_POPS = 20_000


def _compiled_fits(sg: SimplifiedGraph, n_robots: int) -> bool:
    size = (len(sg.super_nodes) + 1) ** n_robots
    if not COMPILED_MIN_STATES <= size <= COMPILED_MAX_STATES:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _compiled_search(sg: SimplifiedGraph, inst: ProblemInstance, exp: _Expander,
                     canon: Canonicalizer, start, deadline_at: float, pair_moves: bool,
                     auto_retire: bool, retire_anytime: bool, stats: SearchStats):
    import numpy as np

    from . import _hjsg_kernel as K

    nodes = sorted(sg.super_nodes)
    digit = {v: k + 1 for k, v in enumerate(nodes)}
    n = inst.n_robots
    radix = len(nodes) + 1
    pw = np.array([radix ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    size = radix ** n

    adj_ptr, adj_to, adj_cost = [0, 0], [], []
    sup_ptr, sup_to, sup_cost = [0, 0], [], []
    sup_rows = []
    for v in nodes:
        for u, c in exp.nbrs[v]:
            adj_to.append(digit[u])
            adj_cost.append(c)
        for u, c, sup in exp.supported[v]:
            sup_to.append(digit[u])
            sup_cost.append(c)
            sup_rows.append([False] + [w in sup for w in nodes])
        adj_ptr.append(len(adj_to))
        sup_ptr.append(len(sup_to))
    sup_mask = np.array(sup_rows, dtype=np.bool_).reshape(len(sup_rows), radix)
    goal = np.array([digit[g] for g in inst.goals], dtype=np.int64)
    grp_ptr, grp_slots = [0], []
    for slots in canon.groups:
        grp_slots.extend(slots)
        grp_ptr.append(len(grp_slots))
    mode = K.MODE_AUTO if auto_retire else (K.MODE_ANYTIME if retire_anytime else K.MODE_ALL_HOME)

    def pack(t) -> int:
        return sum((0 if p == RETIRED else digit[p]) * int(w) for p, w in zip(t, pw))

    def unpack(code: int) -> Tuple[int, ...]:
        out = []
        for w in pw:
            q, code = divmod(code, int(w))
            out.append(RETIRED if q == 0 else nodes[q - 1])
        return tuple(out)

    max_deg = max((adj_ptr[k + 1] - adj_ptr[k] for k in range(len(nodes) + 1)), default=0)
    max_sup = max((sup_ptr[k + 1] - sup_ptr[k] for k in range(len(nodes) + 1)), default=0)
    pairs = n * (n - 1) // 2
    reserve = n * (max_deg + 1) + pairs * (2 * max_sup + (max_deg * max_deg if pair_moves else 0))
    capacity = max(1 << 16, 4 * reserve)

    dist = np.full(size, np.inf)
    parent = np.full(size, -1, dtype=np.int64)
    visited = np.zeros(size, dtype=np.uint8)
    hk = np.empty(capacity, dtype=np.float64)
    hc = np.empty(capacity, dtype=np.int64)
    s0 = pack(start)
    dist[s0] = 0.0
    hk[0], hc[0] = 0.0, s0
    hstate = np.array([1, capacity, reserve], dtype=np.int64)
    counters = np.zeros(2, dtype=np.int64)
    args = (np.array(adj_ptr, dtype=np.int64), np.array(adj_to, dtype=np.int64),
            np.array(adj_cost, dtype=np.float64), np.array(sup_ptr, dtype=np.int64),
            np.array(sup_to, dtype=np.int64), np.array(sup_cost, dtype=np.float64), sup_mask,
            goal, np.array(grp_ptr, dtype=np.int64), np.array(grp_slots, dtype=np.int64),
            mode, pair_moves, counters)
    status = K.CONTINUE
    while True:
        if time.perf_counter() > deadline_at:
            stats.timed_out = True
            break
        status = K.run_chunk(dist, parent, visited, hk, hc, hstate, CHUNK_POPS, n, pw, *args)
        if status == K.HEAP_FULL:
            capacity *= 2
            hk = np.resize(hk, capacity)
            hc = np.resize(hc, capacity)
            hstate[1] = capacity
        elif status != K.CONTINUE:
            break
    stats.visited_joint_states += int(counters[0])
    stats.expanded_joint_edges += int(counters[1])
    if status != K.FOUND or stats.timed_out:
        return None, {}

    # rebuild the predecessor links the Python loop would have recorded
    prev: Dict[Tuple[int, ...], tuple] = {}
    code = 0
    while code != s0:
        p = int(parent[code])
        if p < 0:
            raise RuntimeError(f"missing predecessor for packed joint state {code}")
        src = unpack(p)
        want = dist[code]
        for raw, c, move in exp.successors(src):
            if pack(canon(raw)) == code and dist[p] + c == want:
                prev[unpack(code)] = (src, raw, move)
                break
        else:
            raise RuntimeError("joint path reconstruction lost a transition")
        code = p
    return unpack(0), prev


def reconstruct_paths(sg: SimplifiedGraph, inst: ProblemInstance, start_raw, start, terminal,
                      prev, stats: SearchStats) -> Solution:
    chain = []
    s = terminal
    while s != start:
        link = prev.get(s)
        if link is None:
            raise RuntimeError(f"missing predecessor for joint state {s}")
        chain.append(link)
        s = link[0]
    chain.reverse()

    canon = Canonicalizer(inst.goals)
    robot_of_slot = remap_robots(canon, list(range(inst.n_robots)), start_raw)
    transitions = []
    for src, raw, move in chain:
        events = _events_for(sg, src, raw, move)
        src_r = to_robot_order(robot_of_slot, src)
        dst_r = to_robot_order(robot_of_slot, raw)
        # a robot that retires on arrival still walked onto its goal
        for n in range(len(dst_r)):
            if dst_r[n] == RETIRED and src_r[n] != RETIRED:
                dst_r[n] = inst.goals[n]
        ev_r = [(robot_of_slot[r], robot_of_slot[k], key, node) for r, k, key, node in events]
        transitions.append((src_r, dst_r, ev_r))
        robot_of_slot = remap_robots(canon, robot_of_slot, raw)
    return expand_joint_path(sg, inst, transitions, stats)


def solve_hjsg(inst: ProblemInstance, timeout: float = DEFAULT_TIMEOUT,
               sg: Optional[SimplifiedGraph] = None, **kwargs) -> Solution:
    t0 = time.perf_counter()
    try:
        if sg is None:
            sg = build_simplified(inst)
    except UnreachableGoalError:
        return no_path(SearchStats(wall_time=time.perf_counter() - t0))
    remaining = max(0.0, timeout - (time.perf_counter() - t0))
    sol = dynamic_hjsg_search(sg, inst, remaining, **kwargs)
    sol.stats.wall_time = time.perf_counter() - t0
    return sol
