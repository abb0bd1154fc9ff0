"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (visible even under output capture) and
then asserts the same condition.
"""

from __future__ import annotations

import itertools
import math
import random
import statistics
import time

from conftest import brute_force_matching
from tcgre.ces import ces_solve, hces_solve
from tcgre.generators import GenSpec, generate
from tcgre.hjsg import dynamic_hjsg_search, solve_hjsg
from tcgre.jsg import build_full_jsg, solve_full_jsg, solve_jsg
from tcgre.matching import MatchingInstance, max_weight_matching
from tcgre.model import TOL, EnvironmentGraph, ProblemInstance, RiskyEdge
from tcgre.oracle import oracle_solve
from tcgre.simplify import all_pairs_spc, build_simplified

FAMILIES = ("random", "rect_perfect", "voronoi")


def report(capsys, label: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, detail


def test_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for i in range(100):
        family = FAMILIES[i % 3]
        nodes = 6 if family == "rect_perfect" else (4, 5, 6)[(i // 3) % 3]
        inst = generate(GenSpec(family, nodes, 2, 0.2, 1 + i % 2, 1000 + i))
        sg = build_simplified(inst)
        h = dynamic_hjsg_search(sg, inst).total_cost
        j = solve_full_jsg(inst, sg=sg).total_cost
        o = oracle_solve(inst).total_cost
        gap = max(abs(h - o), abs(j - o))
        worst = max(worst, gap)
        if gap > TOL:
            bad.append((i, h, j, o))
    elapsed = time.perf_counter() - t0
    report(capsys, "oracle equivalence (100 instances, |V|<=6, N=2, T=|V|N)", not bad,
           f"max |cost gap| {worst:.2e} (tol 1e-9), disagreements {bad[:3]}, "
           f"{elapsed:.1f}s total (expected < 60s)")


def test_jsg_hjsg_at_scale(capsys):
    t0 = time.perf_counter()
    worst, cost_bad, p_bad = 0.0, [], []
    for i in range(50):
        inst = generate(GenSpec(FAMILIES[i % 3], (9, 12)[(i // 3) % 2], 2 + i % 2, 0.2,
                                1 + (i // 6) % 2, 2000 + i))
        sg = build_simplified(inst)
        h = dynamic_hjsg_search(sg, inst)
        jsg = build_full_jsg(sg, inst)
        j = solve_jsg(jsg)
        gap = abs(h.total_cost - j.total_cost)
        worst = max(worst, gap)
        if gap > TOL:
            cost_bad.append(i)
        if h.stats.visited_joint_states > jsg.n_states:
            p_bad.append((i, h.stats.visited_joint_states, jsg.n_states))
    elapsed = time.perf_counter() - t0
    report(capsys, "JSG = HJSG at scale (50 instances, 9-12 nodes, N in {2,3})",
           not cost_bad and not p_bad,
           f"max |cost gap| {worst:.2e} (tol 1e-9), cost mismatches {cost_bad}, "
           f"P > JSG node count on {p_bad}, {elapsed:.1f}s (expected < 300s)")


def _single_use(sol) -> bool:
    seen = set()
    for ev in sol.coordination_events:
        pair = (ev.edge, ev.support_node)
        if pair in seen:
            return False
        seen.add(pair)
    return True


def test_ces_assumption_check(capsys):
    t0 = time.perf_counter()
    flagged, ces_bad, hces_bad = 0, [], []
    for i in range(30):
        inst = generate(GenSpec(FAMILIES[i % 3], (6, 8)[(i // 3) % 2], 2 + i % 2, 0.2,
                                1 + (i // 6) % 2, 3000 + i))
        opt = solve_hjsg(inst)
        c = ces_solve(inst)
        h = hces_solve(inst)
        if abs(c.total_cost - h.total_cost) > TOL:
            hces_bad.append(i)
        if _single_use(opt):
            flagged += 1
            if abs(c.total_cost - opt.total_cost) > TOL or abs(h.total_cost - opt.total_cost) > TOL:
                ces_bad.append((i, c.total_cost, opt.total_cost))
    elapsed = time.perf_counter() - t0
    report(capsys, "CES assumption check (30 instances, 6-8 nodes, N in {2,3})",
           not ces_bad and not hces_bad,
           f"{flagged} single-use-feasible, CES/HCES != HJSG on {ces_bad}, "
           f"HCES != CES on {hces_bad} (tol 1e-9), {elapsed:.1f}s (expected < 300s)")


def test_no_coordination_degeneracy(capsys):
    worst, bad = 0.0, []
    solvers = {
        "hjsg": solve_hjsg, "jsg": solve_full_jsg, "ces": ces_solve, "hces": hces_solve,
        "oracle": lambda inst: oracle_solve(inst),
    }
    for i in range(20):
        inst = generate(GenSpec(FAMILIES[i % 3], 6, 2 + i % 2, 0.0, 1, 4000 + i))
        spc = all_pairs_spc(inst.graph)
        want = sum(float(spc[s, g]) for s, g in zip(inst.starts, inst.goals))
        for name, solve in solvers.items():
            gap = abs(solve(inst).total_cost - want)
            worst = max(worst, gap)
            if gap > TOL:
                bad.append((i, name))
    report(capsys, "no-coordination degeneracy (20 instances, risky_ratio 0, 5 solvers)", not bad,
           f"max |cost - sum spc| {worst:.2e} (tol 1e-9), mismatches {bad}")


def _with_extra_support(inst: ProblemInstance, rng: random.Random):
    g = inst.graph
    if not g.risky:
        return None
    r = rng.choice(g.risky)
    free = [v for v in g.nodes if v not in r.support and v not in (r.u, r.v)]
    if not free:
        return None
    k = rng.choice(free)
    risky = tuple(RiskyEdge(x.u, x.v, x.reduced, tuple(sorted(x.support + (k,))))
                  if x is r else x for x in g.risky)
    return ProblemInstance(EnvironmentGraph(g.n_nodes, g.edges, risky, g.coord_cost),
                           inst.starts, inst.goals)


def test_support_monotonicity(capsys):
    rng = random.Random(5)
    pairs, bad, seed = 0, [], 5000
    while pairs < 50:
        inst = generate(GenSpec(FAMILIES[seed % 3], (6, 9)[seed % 2], 2 + seed % 2, 0.2, 1, seed))
        seed += 1
        more = _with_extra_support(inst, rng)
        if more is None:
            continue
        pairs += 1
        before = solve_hjsg(inst).total_cost
        after = solve_hjsg(more).total_cost
        if after > before + TOL:
            bad.append((seed - 1, before, after))
    report(capsys, "support-node monotonicity (50 paired instances)", not bad,
           f"cost increased after adding a support node on {bad} (slack 1e-9)")


def test_scalability_smoke(capsys):
    done, times, failed = 0, [], []
    for i in range(20):
        inst = generate(GenSpec(FAMILIES[i % 3], 15, 6, seed=i))
        sol = solve_hjsg(inst, timeout=60.0)
        if sol.found and not sol.stats.timed_out:
            done += 1
            times.append(sol.stats.wall_time)
        else:
            failed.append(i)
    med = statistics.median(times) if times else math.nan
    report(capsys, "scalability smoke (20 instances, 15 nodes, 6 agents, 60s)", done >= 18,
           f"{done}/20 completed (need >= 18), median {med:.1f}s, max "
           f"{max(times, default=math.nan):.1f}s, unfinished {failed}")


def test_runtime_ordering(capsys):
    rows, ok = [], True
    solve_hjsg(generate(GenSpec("random", 12, 4, seed=99)), timeout=60.0)  # load compiled code
    for n in (2, 3, 4):
        h_times, j_times = [], []
        for seed in (12, 13, 14):
            inst = generate(GenSpec("random", 12, n, seed=seed))
            h = solve_hjsg(inst, timeout=60.0)
            j = solve_full_jsg(inst, timeout=60.0)
            h_times.append(h.stats.wall_time if h.found else 60.0)
            j_times.append(j.stats.wall_time if j.found else 60.0)
        mh, mj = statistics.median(h_times), statistics.median(j_times)
        ok = ok and mh <= mj
        rows.append(f"N={n}: hjsg {mh:.4f}s vs jsg {mj:.4f}s")
    report(capsys, "runtime ordering (12-node random, 3 seeds, median wall time)", ok,
           "; ".join(rows))


def test_matching_exhaustive(capsys):
    bad = 0
    for flat in itertools.product((0, 1, 2), repeat=9):
        w = [[float(flat[3 * r + c]) for c in range(3)] for r in range(3)]
        res = max_weight_matching(MatchingInstance((0, 1, 2), (0, 1, 2),
                                                   tuple(tuple(r) for r in w)))
        if res.total != brute_force_matching(w):
            bad += 1
    report(capsys, "matching vs brute force (all 3^9 matrices over {0,1,2})", bad == 0,
           f"{3 ** 9 - bad}/{3 ** 9} exact")
