from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import exhaustive_spc
from tcgre.generators import GenSpec, generate
from tcgre.model import TOL, EnvironmentGraph, ProblemInstance, RiskyEdge, edge_key
from tcgre.simplify import (SupportPair, UnreachableGoalError, all_pairs_spc, build_simplified,
                            enumerate_support_pairs, special_nodes, super_path_cost)

specs = st.builds(
    GenSpec,
    family=st.sampled_from(["random", "rect_perfect", "voronoi"]),
    node_count=st.sampled_from([4, 6, 8, 9]),
    agent_count=st.integers(1, 3),
    risky_ratio=st.sampled_from([0.0, 0.2, 0.4]),
    supports_per_risky=st.integers(1, 3),
    seed=st.integers(0, 100_000),
)


def test_spc_inst_a_goes_around_the_risky_edge(inst):
    spc = all_pairs_spc(inst.graph)
    assert spc[0, 1] == 9.0
    assert spc[0, 1] == exhaustive_spc(inst.graph, 0, 1)


def test_spc_disconnected_is_infinite():
    g = EnvironmentGraph(4, ((0, 1, 1.0), (2, 3, 1.0)))
    spc = all_pairs_spc(g)
    assert math.isinf(spc[0, 3])
    assert spc[2, 3] == 1.0


@settings(max_examples=30, deadline=None)
@given(specs)
def test_spc_matches_path_enumeration(spec):
    g = generate(spec).graph
    spc = all_pairs_spc(g)
    for i in g.nodes:
        assert spc[i, i] == 0.0
        for j in g.nodes:
            assert abs(spc[i, j] - exhaustive_spc(g, i, j)) <= TOL
            assert spc[i, j] == spc[j, i]


def test_inst_a_super_graph(inst):
    sg = build_simplified(inst)
    assert sg.super_nodes == (0, 1, 2, 3)
    edges = {e.key: e for e in sg.super_edges}
    assert set(edges) == {(0, 1), (0, 2), (1, 2), (2, 3)}
    risky = edges[(0, 1)]
    assert risky.risky and risky.base_cost == 10.0 and risky.supported_cost == 3.0
    assert risky.support_nodes == (2,)
    assert [edges[k].base_cost for k in ((0, 2), (1, 2), (2, 3))] == [1.0, 8.0, 1.0]
    assert sg.edge(3, 0) is None


def test_no_risky_edges_gives_single_super_edge():
    g = EnvironmentGraph(3, ((0, 2, 1.0), (2, 1, 2.0)))
    sg = build_simplified(ProblemInstance(g, (0,), (1,)))
    assert sg.super_nodes == (0, 1)
    assert len(sg.super_edges) == 1
    e = sg.super_edges[0]
    assert e.base_cost == 3.0 and e.witness_path == (0, 2, 1)


def test_expensive_coordination_is_demoted():
    g = EnvironmentGraph(
        5, ((0, 1, 10.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)),
        (RiskyEdge(0, 1, 9.0, (4,)),), coord_cost=3.0)
    sg = build_simplified(ProblemInstance(g, (0,), (2,)))
    assert sg.demoted == ((0, 1),)
    assert 4 not in sg.super_nodes
    assert sg.risky_edges == ()


def test_support_pairs_inst_a(inst):
    assert enumerate_support_pairs(build_simplified(inst)) == [SupportPair((0, 1), 2)]


def test_support_pairs_cardinality():
    g = EnvironmentGraph(
        5, ((0, 1, 20.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0)),
        (RiskyEdge(0, 1, 1.0, (2, 3, 4)),), coord_cost=0.5)
    inst = ProblemInstance(g, (0,), (1,))
    pairs = enumerate_support_pairs(build_simplified(inst))
    assert [p.support_node for p in pairs] == [2, 3, 4]
    plain = ProblemInstance(EnvironmentGraph(2, ((0, 1, 1.0),)), (0,), (1,))
    assert enumerate_support_pairs(build_simplified(plain)) == []


def test_unreachable_goal_raises():
    g = EnvironmentGraph(4, ((0, 1, 1.0), (2, 3, 1.0)))
    with pytest.raises(UnreachableGoalError):
        build_simplified(ProblemInstance(g, (0,), (3,)))


@settings(max_examples=40, deadline=None)
@given(specs)
def test_super_graph_invariants(spec):
    inst = generate(spec)
    g = inst.graph
    sg = build_simplified(inst)
    spc = sg.spc
    special = set(sg.super_nodes)
    assert special >= set(inst.starts) | set(inst.goals)
    for e in sg.super_edges:
        path = e.witness_path
        assert path[0] == e.u and path[-1] == e.v
        assert not special.intersection(path[1:-1])
        walked = sum(g.cost[edge_key(a, b)] for a, b in zip(path, path[1:]))
        assert abs(walked - e.base_cost) <= TOL
        if e.risky:
            assert {e.u, e.v} <= special and set(e.support_nodes) <= special
            assert e.supported_cost < min(e.base_cost, spc[e.u, e.v]) - TOL
    for k in g.risky_by_key:
        if k not in {e.key for e in sg.risky_edges}:
            assert k in sg.demoted
    # compositional completeness
    for a in sg.super_nodes:
        for b in sg.super_nodes:
            assert abs(super_path_cost(sg, a, b) - spc[a, b]) <= TOL


@settings(max_examples=25, deadline=None)
@given(specs, st.data())
def test_dropping_a_support_node_never_adds_super_nodes(spec, data):
    inst = generate(spec)
    g = inst.graph
    multi = [r for r in g.risky if len(r.support) > 1]
    if not multi:
        return
    r = data.draw(st.sampled_from(multi))
    drop = data.draw(st.sampled_from(r.support))
    risky = tuple(RiskyEdge(x.u, x.v, x.reduced, tuple(s for s in x.support if s != drop))
                  if x is r else x for x in g.risky)
    smaller = ProblemInstance(EnvironmentGraph(g.n_nodes, g.edges, risky, g.coord_cost),
                              inst.starts, inst.goals)
    before = set(build_simplified(inst).super_nodes)
    after = set(build_simplified(smaller).super_nodes)
    assert after <= before
    assert len(after) <= g.n_nodes


def test_special_nodes_union(inst):
    assert special_nodes([(0, 1)], inst.graph, inst) == frozenset({0, 1, 2, 3})
