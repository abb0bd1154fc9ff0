"""Seeded instance generators for random, grid and Voronoi graph families."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from .model import EnvironmentGraph, ProblemInstance, RiskyEdge, edge_key, validate_instance

FAMILIES = ("random", "rect_perfect", "voronoi")

BASE_COST = (1.0, 10.0)
RISKY_COST = (15.0, 30.0)
REDUCED_COST = (1.0, 5.0)
COORD_COST = (0.5, 2.0)
MAX_RETRIES = 1000


class GenSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    family: str = "random"
    node_count: int = 6
    agent_count: int = 2
    risky_ratio: float = 0.2
    supports_per_risky: int = 1
    seed: int = 12
    edge_density: float = 0.3
    horizon: Optional[int] = None

    def check(self) -> None:
        if self.family not in FAMILIES:
            raise GenSpecError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.node_count < 2:
            raise GenSpecError("node_count must be >= 2")
        if self.agent_count < 1:
            raise GenSpecError("agent_count must be >= 1")
        if not 0.0 <= self.risky_ratio <= 1.0:
            raise GenSpecError("risky_ratio must lie in [0, 1]")
        if self.supports_per_risky < 1:
            raise GenSpecError("supports_per_risky must be >= 1")
        if not 0.0 < self.edge_density <= 1.0:
            raise GenSpecError("edge_density must lie in (0, 1]")
        if self.family == "rect_perfect":
            grid_shape(self.node_count)
        if self.family == "voronoi" and self.node_count < 3:
            raise GenSpecError("voronoi needs node_count >= 3")


def grid_shape(n: int) -> Tuple[int, int]:
    """Most square r x c factorization with r, c >= 2."""
    for r in range(int(math.isqrt(n)), 1, -1):
        if n % r == 0:
            return r, n // r
    raise GenSpecError(f"rect_perfect needs node_count = r*c with r, c >= 2; got {n}")


def _cost(rng: random.Random, lo_hi: Tuple[float, float]) -> float:
    return round(rng.uniform(*lo_hi), 2)


def _connected(n: int, edges) -> bool:
    adj: List[List[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        for v in adj[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def _random_topology(rng: random.Random, n: int, density: float):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = min(len(pairs), max(n - 1, round(density * len(pairs))))
    return sorted(rng.sample(pairs, m)), None


def _grid_topology(n: int):
    r, c = grid_shape(n)
    edges = []
    for y in range(r):
        for x in range(c):
            v = y * c + x
            if x + 1 < c:
                edges.append((v, v + 1))
            if y + 1 < r:
                edges.append((v, v + c))
    return sorted(edges), None


def _voronoi_topology(rng: random.Random, n: int):
    from scipy.spatial import Delaunay

    pts = [(rng.random(), rng.random()) for _ in range(n)]
    tri = Delaunay(pts)
    edges: Set[Tuple[int, int]] = set()
    for simplex in tri.simplices:
        a, b, c = (int(v) for v in simplex)
        edges.update((edge_key(a, b), edge_key(b, c), edge_key(a, c)))
    lengths = {e: math.dist(pts[e[0]], pts[e[1]]) for e in edges}
    return sorted(edges), lengths


def _within_two_hops(n: int, edges, key) -> List[int]:
    adj: List[Set[int]] = [set() for _ in range(n)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    near = set(key)
    for _ in range(2):
        near |= {u for v in near for u in adj[v]}
    return sorted(near - set(key))


def generate(spec: GenSpec) -> ProblemInstance:
    spec.check()
    n = spec.node_count
    rng = random.Random(spec.seed)
    for attempt in range(MAX_RETRIES):
        sub = random.Random(f"{spec.seed}:{attempt}") if attempt else rng
        if spec.family == "random":
            topo, lengths = _random_topology(sub, n, spec.edge_density)
        elif spec.family == "rect_perfect":
            topo, lengths = _grid_topology(n)
        else:
            topo, lengths = _voronoi_topology(sub, n)
        if _connected(n, topo):
            break
    else:
        raise GenSpecError(f"no connected {spec.family} graph after {MAX_RETRIES} attempts")

    if lengths:
        longest = max(lengths.values())
        cost = {e: round(BASE_COST[0] + (BASE_COST[1] - BASE_COST[0]) * lengths[e] / longest, 2)
                for e in topo}
    else:
        cost = {e: _cost(rng, BASE_COST) for e in topo}

    n_risky = math.ceil(spec.risky_ratio * len(topo) - 1e-12)
    risky = []
    for key in sorted(rng.sample(topo, n_risky)):
        cost[key] = _cost(rng, RISKY_COST)
        pool = _within_two_hops(n, topo, key)
        if len(pool) < spec.supports_per_risky:
            pool = [v for v in range(n) if v not in key]
        k = min(spec.supports_per_risky, len(pool))
        support = tuple(sorted(rng.sample(pool, k)))
        risky.append(RiskyEdge(key[0], key[1], _cost(rng, REDUCED_COST), support))
    coord = _cost(rng, COORD_COST)

    a = spec.agent_count
    if a <= n:
        starts = rng.sample(range(n), a)
        goals = rng.sample(range(n), a)
    else:
        starts = [rng.randrange(n) for _ in range(a)]
        goals = [rng.randrange(n) for _ in range(a)]
    graph = EnvironmentGraph(
        n_nodes=n,
        edges=tuple((i, j, cost[(i, j)]) for i, j in topo),
        risky=tuple(risky),
        coord_cost=coord,
    )
    inst = ProblemInstance(graph, tuple(starts), tuple(goals), spec.horizon)
    problems = validate_instance(inst)
    if problems:
        raise GenSpecError(f"generated an invalid instance: {problems[0]}")
    return inst
