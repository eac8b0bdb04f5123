import itertools
from collections import Counter

import pytest

from conftest import all_fixtures, corpus, triangulation, upto8
from veerwall.errors import NotTaut, NotTransverseTaut, StructureError
from veerwall.sigparse import PI_PAIRS, decode
from veerwall.triangulation import (BLUE_FAN, EDGE_INDEX, RED, RED_FAN, TOGGLE,
                                    VeeringTriangulation)


def _equator_cycle(vt, t):
    (a, b), (c, d) = vt.diagonals[t]
    return [vt.edge_of[t][EDGE_INDEX[tuple(sorted(p))]]
            for p in ((a, c), (c, b), (b, d), (d, a))]


def check_invariants(vt):
    """Checks written against the raw gluing data, not the builder."""
    n, table = vt.tet_count, vt.table
    # an ideal triangulation of a cusped manifold has as many edges as tetrahedra
    assert vt.edge_count == n
    # two pi angles per edge class
    pi = Counter()
    for t, dg in enumerate(vt.angles):
        for pair in PI_PAIRS[dg]:
            pi[vt.edge_of[t][EDGE_INDEX[pair]]] += 1
    assert set(pi.values()) == {2} and len(pi) == n
    # top and bottom diagonals are the pi pair
    for t in range(n):
        assert set(vt.diagonals[t]) == set(PI_PAIRS[vt.angles[t]])
    # each face is a top face on exactly one of its two sides
    for t in range(n):
        for f in range(4):
            u, g, _ = table.glue(t, f)
            assert vt.is_top_face(t, f) != vt.is_top_face(u, g)
    # every edge is the top edge of one tetrahedron and the bottom of one
    assert sorted(vt.top_edge) == list(range(n))
    assert sorted(vt.bottom_edge) == list(range(n))
    # colours alternate around every equator
    for t in range(n):
        cols = [vt.edge_color[e] for e in _equator_cycle(vt, t)]
        assert cols[0] != cols[1] and cols == [cols[0], cols[1]] * 2
    # toggle/fan types
    for t in range(n):
        top, bot = vt.edge_color[vt.top_edge[t]], vt.edge_color[vt.bottom_edge[t]]
        expected = TOGGLE if top != bot else (RED_FAN if top == RED else BLUE_FAN)
        assert vt.tet_type[t] == expected
    # edge stacks: degree = 2 + both sides, every tetrahedron on four sides
    degree = Counter(vt.edge_of[t][k] for t in range(n) for k in range(6))
    membership = Counter()
    for s in vt.stacks:
        assert all(len(side) >= 1 for side in s.sides)
        assert degree[s.edge] == 2 + sum(len(side) for side in s.sides)
        assert vt.above[s.edge] == s.above and vt.below[s.edge] == s.below
        for side in s.sides:
            membership.update(side)
    assert all(membership[t] == 4 for t in range(n))


@pytest.mark.parametrize("flip", [False, True])
def test_invariants_on_all_fixtures(flip):
    for sig in all_fixtures():
        check_invariants(triangulation(sig, flip))


def test_stack_patterns():
    # each side is a single fan of the edge colour, or toggle, fans of the
    # other colour, toggle
    for sig in all_fixtures():
        vt = triangulation(sig)
        for s in vt.stacks:
            col = vt.edge_color[s.edge]
            own = RED_FAN if col == RED else BLUE_FAN
            other = BLUE_FAN if col == RED else RED_FAN
            for side in s.sides:
                types = [vt.tet_type[t] for t in side]
                if len(side) == 1:
                    assert types == [own]
                else:
                    assert types[0] == types[-1] == TOGGLE
                    assert set(types[1:-1]) <= {other}


def test_flip_reverses_coorientation():
    for sig in upto8()[::5]:
        a, b = triangulation(sig), triangulation(sig, True)
        for t in range(a.tet_count):
            assert a.diagonals[t] == b.diagonals[t][::-1]
        assert a.top_edge == b.bottom_edge


def test_canonical_choices():
    for sig in upto8()[::3]:
        vt = triangulation(sig)
        assert vt.is_top_face(0, 0)
        first = vt.equatorial(0)[0]
        assert vt.edge_color[vt.edge_of[0][first]] == RED


def test_swap_colors():
    vt = VeeringTriangulation.from_signature("cPcbbbdxm_10")
    sw = VeeringTriangulation.from_signature("cPcbbbdxm_10", swap_colors=True)
    assert [1 - c for c in vt.edge_color] == list(sw.edge_color)


def test_cusp_count_matches_regina():
    regina = pytest.importorskip("regina")
    for sig in all_fixtures():
        vt = triangulation(sig)
        tri = regina.Triangulation3.fromIsoSig(sig.split("_")[0])
        assert tri.countVertices() == vt.cusp_count
        assert tri.countEdges() == vt.edge_count


def test_non_transverse_taut_rejected():
    for sig in corpus("non_transverse_taut.txt"):
        with pytest.raises(NotTransverseTaut):
            VeeringTriangulation.from_signature(sig)


def test_wrong_angles_not_taut():
    with pytest.raises(NotTaut) as info:
        VeeringTriangulation.from_signature("cPcbbbdxm_00")
    assert info.value.args


@pytest.mark.parametrize("sig", [s for s in upto8() if len(s.split("_")[1]) <= 5][:12])
def test_every_angle_choice_is_rejected_or_valid(sig):
    s, table = decode(sig)
    for digits in itertools.product(range(3), repeat=table.tet_count):
        try:
            vt = VeeringTriangulation(table, digits)
        except StructureError:
            continue
        check_invariants(vt)


def test_to_json_shape():
    data = triangulation("cPcbbbdxm_10").to_json()
    assert data["tet_count"] == 2 and data["cusp_count"] == 1
    assert len(data["tetrahedra"]) == 2
    assert sorted(len(c) for c in data["edge_classes"]) == [6, 6]
