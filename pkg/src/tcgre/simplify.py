"""Simplified graph over special nodes.

Special nodes are risky-edge endpoints, support nodes, starts and goals.
Every other node only ever lies on a single robot's shortest path, so
movement between special nodes collapses into super edges.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .model import TOL, EdgeKey, EnvironmentGraph, ProblemInstance, edge_key

INF = math.inf


class UnreachableGoalError(ValueError):
    pass


def all_pairs_spc(g: EnvironmentGraph) -> np.ndarray:
    """Floyd-Warshall over unsupported costs; unreachable pairs are +inf."""
    n = g.n_nodes
    d = np.full((n, n), INF)
    np.fill_diagonal(d, 0.0)
    for (i, j), c in g.cost.items():
        if i != j and c < d[i, j]:
            d[i, j] = d[j, i] = c
    for k in range(n):
        np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :], out=d)
    return d


def shortest_path(g: EnvironmentGraph, source: int, target: int,
                  blocked: Iterable[int] = ()) -> Tuple[float, Optional[Tuple[int, ...]]]:
    """Cheapest path with ties broken by lexicographically smallest node sequence.

    Nodes in ``blocked`` may be reached but not passed through.
    """
    dist, paths = _lex_dijkstra(g, source, frozenset(blocked), target)
    if target not in dist:
        return INF, None
    return dist[target], paths[target]


def _lex_dijkstra(g: EnvironmentGraph, source: int, blocked: FrozenSet[int],
                  target: Optional[int] = None):
    # label (cost, path) is monotone under extension, so label-setting is exact
    best: Dict[int, Tuple[float, Tuple[int, ...]]] = {source: (0.0, (source,))}
    heap = [(0.0, (source,))]
    done: Dict[int, float] = {}
    paths: Dict[int, Tuple[int, ...]] = {}
    while heap:
        d, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done[u] = d
        paths[u] = path
        if u == target:
            break
        if u != source and u in blocked:
            continue
        for v, c in g.neighbors(u):
            if v in done:
                continue
            label = (d + c, path + (v,))
            old = best.get(v)
            if old is None or label < old:
                best[v] = label
                heapq.heappush(heap, label)
    return done, paths


@dataclass(frozen=True)
class SuperEdge:
    u: int
    v: int
    base_cost: float
    kind: str  # "normal" | "risky"
    witness_path: Tuple[int, ...]  # oriented u -> v
    supported_cost: Optional[float] = None
    support_nodes: Tuple[int, ...] = ()

    @property
    def key(self) -> EdgeKey:
        return (self.u, self.v)

    @property
    def risky(self) -> bool:
        return self.kind == "risky"

    def path_from(self, a: int) -> Tuple[int, ...]:
        return self.witness_path if a == self.u else self.witness_path[::-1]


@dataclass(frozen=True)
class SupportPair:
    risky_edge: EdgeKey
    support_node: int


@dataclass
class SimplifiedGraph:
    instance: ProblemInstance
    super_nodes: Tuple[int, ...]
    super_edges: Tuple[SuperEdge, ...]
    spc: np.ndarray
    demoted: Tuple[EdgeKey, ...] = ()
    _by_key: Dict[EdgeKey, SuperEdge] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_key = {e.key: e for e in self.super_edges}

    @property
    def graph(self) -> EnvironmentGraph:
        return self.instance.graph

    def edge(self, a: int, b: int) -> Optional[SuperEdge]:
        return self._by_key.get(edge_key(a, b))

    @cached_property
    def adjacency(self) -> Dict[int, List[Tuple[int, SuperEdge]]]:
        adj: Dict[int, List[Tuple[int, SuperEdge]]] = {v: [] for v in self.super_nodes}
        for e in self.super_edges:
            adj[e.u].append((e.v, e))
            adj[e.v].append((e.u, e))
        for lst in adj.values():
            lst.sort(key=lambda x: x[0])
        return adj

    @cached_property
    def risky_edges(self) -> Tuple[SuperEdge, ...]:
        return tuple(e for e in self.super_edges if e.risky)

    @cached_property
    def support_node_set(self) -> FrozenSet[int]:
        return frozenset(k for e in self.risky_edges for k in e.support_nodes)

    @property
    def max_degree(self) -> int:
        return max((len(v) for v in self.adjacency.values()), default=0)

    def to_dict(self) -> dict:
        """Debug dump in the instance schema, extended with super-edge data."""
        g = self.graph
        return {
            "nodes": g.n_nodes,
            "super_nodes": list(self.super_nodes),
            "edges": [[e.u, e.v, e.base_cost] for e in self.super_edges],
            "risky": [
                {"edge": [e.u, e.v], "reduced": g.risky_by_key[e.key].reduced,
                 "support": list(e.support_nodes), "supported_cost": e.supported_cost}
                for e in self.risky_edges
            ],
            "witness_path": {f"{e.u},{e.v}": list(e.witness_path) for e in self.super_edges},
            "coord_cost": g.coord_cost,
            "robots": [{"start": s, "goal": t}
                       for s, t in zip(self.instance.starts, self.instance.goals)],
        }


def special_nodes(risky_keys: Iterable[EdgeKey], g: EnvironmentGraph,
                  inst: ProblemInstance) -> FrozenSet[int]:
    out = set(inst.starts) | set(inst.goals)
    for k in risky_keys:
        out.update(k)
        out.update(g.risky_by_key[k].support)
    return frozenset(out)


def build_simplified(inst: ProblemInstance, spc: Optional[np.ndarray] = None) -> SimplifiedGraph:
    g = inst.graph
    if spc is None:
        spc = all_pairs_spc(g)
    for n, (s, t) in enumerate(zip(inst.starts, inst.goals)):
        if not math.isfinite(spc[s, t]):
            raise UnreachableGoalError(f"robot {n}: goal {t} unreachable from start {s}")

    risky = sorted(g.risky_by_key)
    demoted: List[EdgeKey] = []
    while True:
        drop = []
        for k in risky:
            i, j = k
            hat = g.supported_cost(i, j)
            if hat >= min(g.cost[k], spc[i, j]) - TOL:
                drop.append(k)
        if not drop:
            break
        demoted.extend(drop)
        risky = [k for k in risky if k not in drop]
    special = special_nodes(risky, g, inst)
    risky_set = set(risky)

    edges: List[SuperEdge] = []
    for s in sorted(special):
        dist, paths = _lex_dijkstra(g, s, special)
        for t in sorted(dist):
            if t <= s or t not in special:
                continue
            key = (s, t)
            if key in risky_set:
                re = g.risky_by_key[key]
                edges.append(SuperEdge(
                    s, t, dist[t], "risky", paths[t],
                    supported_cost=g.supported_cost(s, t),
                    support_nodes=tuple(sorted(set(re.support))),
                ))
            elif dist[t] <= spc[s, t] + TOL:
                edges.append(SuperEdge(s, t, dist[t], "normal", paths[t]))
    return SimplifiedGraph(inst, tuple(sorted(special)), tuple(edges), spc, tuple(demoted))


def enumerate_support_pairs(sg: SimplifiedGraph) -> List[SupportPair]:
    return [SupportPair(e.key, k) for e in sorted(sg.risky_edges, key=lambda e: e.key)
            for k in e.support_nodes]


def super_path_cost(sg: SimplifiedGraph, a: int, b: int) -> float:
    """Unsupported shortest path between super nodes using super edges only."""
    dist = {a: 0.0}
    heap = [(0.0, a)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == b:
            return d
        if d > dist[u]:
            continue
        for v, e in sg.adjacency[u]:
            nd = d + e.base_cost
            if nd < dist.get(v, INF):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return INF
