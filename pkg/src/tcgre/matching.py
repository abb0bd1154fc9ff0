"""Maximum-weight bipartite matching between supporters and risky-edge movers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence, Tuple

from .model import TOL

Weight = Optional[float]  # None marks a pair that cannot be matched


@dataclass(frozen=True)
class MatchingInstance:
    left: Tuple[Hashable, ...]   # robots staying on support nodes
    right: Tuple[Hashable, ...]  # robots traversing risky edges
    weights: Tuple[Tuple[Weight, ...], ...]  # |left| x |right| cost reductions


@dataclass(frozen=True)
class MatchingResult:
    pairs: Tuple[Tuple[Hashable, Hashable], ...]
    total: float


def hungarian(cost: Sequence[Sequence[float]]) -> List[int]:
    """Min-cost perfect assignment on a square matrix (Kuhn-Munkres with potentials).

    Returns ``assign`` with ``assign[row] = col``. O(n^3).
    """
    n = len(cost)
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)    # p[col] = row matched to col, 1-based, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [math.inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = math.inf
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            assign[p[j] - 1] = j - 1
    return assign


def _max_weight(w: Sequence[Sequence[Weight]], rows: Sequence[int], cols: Sequence[int]) -> float:
    if not rows or not cols:
        return 0.0
    n = max(len(rows), len(cols))
    # padding and absent entries both cost 0, which is the same as leaving unmatched
    cost = [[0.0] * n for _ in range(n)]
    for a, x in enumerate(rows):
        for b, y in enumerate(cols):
            val = w[x][y]
            if val is not None and val > 0:
                cost[a][b] = -val
    assign = hungarian(cost)
    return -sum(cost[a][assign[a]] for a in range(n))


def max_weight_matching(m: MatchingInstance) -> MatchingResult:
    """Maximum total weight matching; ties go to the lexicographically smallest pair list."""
    w = m.weights
    rows = list(range(len(m.left)))
    cols = list(range(len(m.right)))
    best = _max_weight(w, rows, cols)
    if best <= 0:
        return MatchingResult((), 0.0)
    pairs = []
    total = 0.0
    remaining = best
    free_rows, free_cols = rows[:], cols[:]
    for x in rows:
        if remaining <= TOL:
            break
        free_rows.remove(x)
        for y in free_cols:
            val = w[x][y]
            if val is None or val <= 0:
                continue
            rest = [c for c in free_cols if c != y]
            if val + _max_weight(w, free_rows, rest) >= remaining - TOL:
                pairs.append((m.left[x], m.right[y]))
                total += val
                remaining -= val
                free_cols = rest
                break
    return MatchingResult(tuple(pairs), total)


def joint_edge_cost(sg, src: Sequence[int], dst: Sequence[int]):
    """Cost of moving every robot from ``src[n]`` to ``dst[n]`` in one joint step.

    Returns ``(cost, events)`` where each event is
    ``(receiver, supporter, risky edge key, support node)``. Cost is +inf when a
    hop has no super edge.
    """
    cost = 0.0
    stayers: List[int] = []
    movers: List[Tuple[int, object]] = []
    support_nodes = sg.support_node_set
    for n, (a, b) in enumerate(zip(src, dst)):
        if a == b:
            if a in support_nodes:
                stayers.append(n)
            continue
        e = sg.edge(a, b)
        if e is None:
            return math.inf, []
        cost += e.base_cost
        if e.risky:
            movers.append((n, e))
    if not stayers or not movers:
        return cost, []
    weights = tuple(
        tuple((e.base_cost - e.supported_cost) if src[x] in e.support_nodes else None
              for _, e in movers)
        for x in stayers
    )
    res = max_weight_matching(MatchingInstance(tuple(stayers), tuple(n for n, _ in movers), weights))
    if not res.pairs:
        return cost, []
    edge_of = dict(movers)
    events = []
    for x, y in res.pairs:
        e = edge_of[y]
        cost -= e.base_cost - e.supported_cost
        events.append((y, x, e.key, src[x]))
    events.sort()
    return cost, events
