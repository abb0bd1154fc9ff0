from __future__ import annotations

import itertools
import math
from typing import List, Optional, Sequence

import pytest

from tcgre.generators import GenSpec, generate
from tcgre.model import EnvironmentGraph, ProblemInstance, RiskyEdge, inst_a


def brute_force_matching(weights: Sequence[Sequence[Optional[float]]]) -> float:
    """Best total over every partial injection left -> right."""
    n_left = len(weights)
    n_right = len(weights[0]) if weights else 0
    best = 0.0
    for k in range(min(n_left, n_right) + 1):
        for rows in itertools.combinations(range(n_left), k):
            for cols in itertools.permutations(range(n_right), k):
                vals = [weights[r][c] for r, c in zip(rows, cols)]
                if any(v is None for v in vals):
                    continue
                best = max(best, sum(vals))
    return best


def simple_path_costs(g: EnvironmentGraph, s: int, t: int) -> List[float]:
    """Costs of every simple s-t path, by depth-first enumeration."""
    out = []

    def walk(v, seen, acc):
        if v == t:
            out.append(acc)
            return
        for u, c in g.neighbors(v):
            if u not in seen:
                walk(u, seen | {u}, acc + c)

    walk(s, {s}, 0.0)
    return out


def exhaustive_spc(g: EnvironmentGraph, s: int, t: int) -> float:
    if s == t:
        return 0.0
    costs = simple_path_costs(g, s, t)
    return min(costs) if costs else math.inf


def line_instance(n_nodes: int = 3, cost: float = 1.0, start: int = 0, goal: int = 2,
                  horizon=None) -> ProblemInstance:
    g = EnvironmentGraph(n_nodes, tuple((i, i + 1, cost) for i in range(n_nodes - 1)))
    return ProblemInstance(g, (start,), (goal,), horizon)


def small_specs(count: int, nodes=(6,), agents=(2,), risky_ratio: float = 0.2,
                supports=(1, 2), seed0: int = 0):
    families = ("random", "rect_perfect", "voronoi")
    for i in range(count):
        yield GenSpec(families[i % 3], nodes[i % len(nodes)], agents[i % len(agents)],
                      risky_ratio, supports[i % len(supports)], seed0 + i)


def small_instances(count: int, **kwargs):
    return [generate(spec) for spec in small_specs(count, **kwargs)]


@pytest.fixture
def inst() -> ProblemInstance:
    return inst_a()


def shared_support_instance() -> ProblemInstance:
    """A risky edge whose support node is a robot's own start and goal."""
    g = EnvironmentGraph(
        n_nodes=4,
        edges=((0, 1, 10.0), (0, 2, 1.0), (1, 2, 8.0), (2, 3, 1.0)),
        risky=(RiskyEdge(0, 1, 2.0, (2,)),),
        coord_cost=1.0,
    )
    return ProblemInstance(g, (0, 2), (1, 2))
