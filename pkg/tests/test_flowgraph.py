import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PAPER_EXAMPLES, all_fixtures, triangulation
from oracles import reachability_sccs
from veerwall.errors import ReductionNotStronglyConnected
from veerwall.flowgraph import (FlowGraph, build_flow_graph, infinitesimal_cycle,
                                minimal_sets, reduce, scc, tarjan, to_dot)
from veerwall.walls import Wall


def random_multigraph(rng, max_v=12, max_e=40):
    n = rng.randint(1, max_v)
    m = rng.randint(0, max_e)
    edges = tuple((rng.randrange(n), rng.randrange(n), k) for k in range(m))
    return FlowGraph(tuple(range(n)), edges)


def check_against_oracle(fg):
    comps, reach = reachability_sccs(fg.n, [(s, t) for s, t, _ in fg.edges])
    cond = scc(fg)
    assert {frozenset(c) for c in cond.components} == comps
    # condensation edges and infinitesimal components from the closure
    expected_dag = set()
    for s, t, _ in fg.edges:
        a, b = cond.scc_of[s], cond.scc_of[t]
        if a != b:
            expected_dag.add((a, b))
    assert cond.dag == expected_dag
    assert set(cond.infinitesimal) == {b for _, b in expected_dag}
    # minimal sets are forward closures
    closures = {frozenset(j for j in range(fg.n) if reach[i][j]) for i in range(fg.n)}
    assert set(minimal_sets(fg, cond)) == closures
    assert cond.strongly_connected == (len(comps) == 1)


def test_scc_matches_closure_oracle_on_200_multigraphs():
    rng = random.Random(20240611)
    for _ in range(200):
        check_against_oracle(random_multigraph(rng))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                         max_size=40))))
def test_scc_property(case):
    n, pairs = case
    check_against_oracle(FlowGraph(tuple(range(n)),
                                   tuple((s, t, k) for k, (s, t) in enumerate(pairs))))


def test_tarjan_deep_chain_is_iterative():
    n = 5000
    succ = {i: [i + 1] for i in range(n - 1)}
    succ[n - 1] = [0]
    comps = tarjan(range(n), succ)
    assert len(comps) == 1 and len(comps[0]) == n


def test_structure_on_all_fixtures():
    for sig in all_fixtures():
        vt = triangulation(sig)
        fg = build_flow_graph(vt)
        assert fg.n == vt.tet_count
        assert len(fg.edges) == 3 * vt.tet_count
        assert set(fg.indegree().values()) == {3}
        # the three edges of a tetrahedron come from its top edge and the two
        # equatorial edges not of its top colour
        for t in range(vt.tet_count):
            into = sorted(s for s, tgt, (u, _) in fg.edges if u == t)
            top = vt.top_edge[t]
            others = sorted(e for e in (vt.edge_of[t][k] for k in vt.equatorial(t))
                            if vt.edge_color[e] != vt.edge_color[top])
            assert into == sorted([top] + others)


@pytest.mark.parametrize("sig,connected", sorted(PAPER_EXAMPLES.items()))
def test_census_examples(sig, connected):
    cond = scc(build_flow_graph(triangulation(sig)))
    assert cond.strongly_connected is connected
    assert cond.is_rooted_height_one_tree()


def test_height_one_tree_shapes():
    def cond_of(n, pairs):
        return scc(FlowGraph(tuple(range(n)), tuple((s, t, 0) for s, t in pairs)))
    # root {0,1} pointing into the cycles {2} and {3}
    assert cond_of(4, [(0, 1), (1, 0), (0, 2), (2, 2), (1, 3), (3, 3)]).is_rooted_height_one_tree()
    # a chain of three components has height two
    assert not cond_of(3, [(0, 1), (1, 2)]).is_rooted_height_one_tree()
    # two roots
    assert not cond_of(3, [(0, 2), (1, 2)]).is_rooted_height_one_tree()


def test_infinitesimal_cycle_order():
    fg = FlowGraph((0, 1, 2, 3), ((0, 1, 0), (1, 0, 0), (0, 2, 0), (2, 3, 0), (3, 2, 0)))
    cond = scc(fg)
    comp = cond.scc_of[2]
    assert infinitesimal_cycle(fg, cond, comp) == (2, 3)
    assert infinitesimal_cycle(fg, cond, cond.scc_of[0]) is None


def _fake_wall(cycle):
    return Wall(grid=(), width=2, period=len(cycle), twisted=False,
                infinitesimal_cycles=(tuple(cycle),), boundary_cycles=())


def test_reduce_removes_cycle_and_incoming_edges():
    fg = FlowGraph((0, 1, 2), ((0, 1, 0), (1, 0, 0), (0, 2, 0), (2, 2, 0)))
    red = reduce(fg, [_fake_wall([2])])
    assert red.vertices == (0, 1)
    assert all(2 not in e[:2] for e in red.edges)
    assert red.removed == frozenset({2})


def test_reduce_rejects_leaky_cycle():
    fg = FlowGraph((0, 1), ((0, 1, 0), (1, 0, 0)))
    with pytest.raises(ReductionNotStronglyConnected):
        reduce(fg, [_fake_wall([1])])


def test_dot_output():
    fg = build_flow_graph(triangulation("eLAkbbcdddhwqj_2102"))
    text = to_dot(fg, "flow", [(0,)])
    assert text.startswith("digraph flow {") and text.rstrip().endswith("}")
    assert text.count("->") == len(fg.edges)
