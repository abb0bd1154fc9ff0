"""Turn joint moves on the simplified graph back into a time-stepped schedule."""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Tuple

from .model import CoordinationEvent, ProblemInstance, SearchStats, Solution, edge_key
from .simplify import SimplifiedGraph

# (receiver, supporter, risky edge key, support node)
Event = Tuple[int, int, Tuple[int, int], int]


class ScheduleBuilder:
    """Appends robot hops on a shared clock and keeps per-robot cost ledgers."""

    def __init__(self, inst: ProblemInstance):
        self.inst = inst
        self.graph = inst.graph
        self.paths: List[List[Tuple[int, float]]] = [[(s, 0.0)] for s in inst.starts]
        self.events: List[CoordinationEvent] = []

    @property
    def now(self) -> int:
        return len(self.paths[0]) - 1

    def position(self, n: int) -> int:
        return self.paths[n][-1][0]

    def _append(self, n: int, node: int, cost: float) -> None:
        _, acc = self.paths[n][-1]
        self.paths[n].append((node, acc + cost))

    def step(self, hops: Dict[int, Tuple[int, ...]], events: Iterable[Event] = ()) -> None:
        """Advance the clock; robot ``n`` walks ``hops[n]``, everyone else waits.

        The receiver of each event must walk exactly its risky edge, and it is
        charged the supported cost for it. Events happen at the first tick.
        """
        events = list(events)
        receivers = {r for r, _, _, _ in events}
        duration = max((len(p) - 1 for p in hops.values()), default=0)
        if duration == 0:
            return
        t0 = self.now
        for r, s, key, k in events:
            self.events.append(CoordinationEvent(t0, r, s, edge_key(*key), k))
        g = self.graph
        for n in range(len(self.paths)):
            walk = hops.get(n, (self.position(n),))
            for i in range(duration):
                if i + 1 < len(walk):
                    a, b = walk[i], walk[i + 1]
                    if n in receivers:
                        c = g.supported_cost(a, b)
                    else:
                        c = 0.0 if a == b else g.cost[edge_key(a, b)]
                    self._append(n, b, c)
                else:
                    self._append(n, walk[-1], 0.0)

    def finish(self, stats: SearchStats) -> Solution:
        costs = [p[-1][1] for p in self.paths]
        self.events.sort(key=lambda e: (e.t, e.receiver))
        return Solution(
            per_robot_paths=self.paths,
            coordination_events=self.events,
            per_robot_costs=costs,
            total_cost=sum(costs),
            stats=stats,
        )


def expand_joint_path(sg: SimplifiedGraph, inst: ProblemInstance,
                      transitions: Sequence[Tuple[Sequence[int], Sequence[int], Sequence[Event]]],
                      stats: SearchStats) -> Solution:
    """Expand ``(src, dst, events)`` joint transitions (robot-indexed, -1 = retired)."""
    sb = ScheduleBuilder(inst)
    for src, dst, events in transitions:
        receivers = {r for r, _, _, _ in events}
        hops: Dict[int, Tuple[int, ...]] = {}
        for n, (a, b) in enumerate(zip(src, dst)):
            if a == b or a < 0 or b < 0:
                continue
            if n in receivers:
                hops[n] = (a, b)
            else:
                hops[n] = sg.edge(a, b).path_from(a)
        sb.step(hops, events)
    return sb.finish(stats)
