import pytest

from conftest import all_fixtures, triangulation, upto8
from oracles import ladderpole_counts
from veerwall.branched import (BranchedSurface, ab_cycles_in_wall, boundary_triangulation,
                               complementary_regions_of_B, dual_graph, dual_to_dot,
                               expected_ab_count, slope_admissibility)
from veerwall.errors import ZeroIntersection
from veerwall.flowgraph import build_flow_graph
from veerwall.walls import detect_walls


@pytest.fixture(scope="module")
def surfaces():
    out = {}
    for sig in all_fixtures():
        for flip in (False, True):
            out[sig, flip] = BranchedSurface(triangulation(sig, flip))
    return out


def test_cell_counts(surfaces):
    for (sig, flip), bs in surfaces.items():
        n = bs.vt.tet_count
        assert bs.segment_count == 2 * n
        assert len(bs.sectors) == n and len(bs.double_points) == n
        assert all(len(arcs) == 2 for arcs in bs.arcs)


def test_sector_boundaries_close_up(surfaces):
    for bs in surfaces.values():
        for sec in bs.sectors:
            verts, edges = sec.boundary()
            assert len(verts) == len(edges)
            for k, (face, down) in enumerate(edges):
                a, b = verts[k], verts[(k + 1) % len(verts)]
                assert bs.segment(face) == ((a, b) if down else (b, a))


def test_segment_incidence(surfaces):
    # each segment is an upper edge of the sector of its large branch and a
    # lower edge of the two sectors of its small branches
    for bs in surfaces.values():
        for f in range(bs.segment_count):
            large, top, other = bs.face_edges(f)
            assert f in bs.sectors[large].upper
            for e in (top, other):
                assert any(f in side for side in bs.sectors[e].lower)
            assert large == bs.vt.bottom_edge[bs.face_upper[f][0]]
            assert top == bs.vt.top_edge[bs.face_lower[f][0]]


def test_branch_circles_partition_segments(surfaces):
    for bs in surfaces.values():
        succ = bs.branch_succ
        assert sorted(succ) == list(range(bs.segment_count))
        faces = sorted(f for c in bs.branch_circles for f in c)
        assert faces == list(range(bs.segment_count))
        for c in bs.branch_circles:
            for k, f in enumerate(c):
                assert succ[f] == c[(k + 1) % len(c)]


def test_boundary_tori(surfaces):
    for bs in surfaces.values():
        vt = bs.vt
        bd = boundary_triangulation(bs)
        assert len(bd.cusps) == vt.cusp_count
        assert sum(len(c.triangles) for c in bd.cusps) == 4 * vt.tet_count
        for c in bd.cusps:
            assert c.euler_characteristic == 0
            assert c.loop_count >= 1


def test_ladderpole_loops_match_cusp_triangulation(surfaces):
    # the branch locus meets each cusp in as many loops as there are
    # ladderpoles of either colour
    for bs in surfaces.values():
        poles = ladderpole_counts(bs.vt)
        for c in boundary_triangulation(bs).cusps:
            assert poles[c.cusp, 0] == poles[c.cusp, 1] == c.loop_count


def test_regions_of_B(surfaces):
    for bs in surfaces.values():
        bd = boundary_triangulation(bs)
        regions = complementary_regions_of_B(bs, bd)
        assert [r.cusp for r in regions] == list(range(bs.vt.cusp_count))
        for r, c in zip(regions, bd.cusps):
            assert r.polygon_cusps == c.loop_count
            assert r.description.endswith("x S^1")


def test_dual_graph_turns(surfaces):
    for bs in surfaces.values():
        dg = dual_graph(bs)
        n = bs.segment_count
        assert sorted(dg.anti_branching.values()) == list(range(n))
        for f in range(n):
            lower = bs.face_lower[f][0]
            nb, na = dg.branching[f], dg.anti_branching[f]
            assert nb != na
            assert bs.face_upper[nb][0] == bs.face_upper[na][0] == lower
        # with the default cap every AB cycle is reported
        assert sorted(f for c in dg.ab_cycles for f in c) == list(range(n))


def test_ab_cap():
    bs = BranchedSurface(triangulation("eLAkbbcdddhwqj_2102"))
    full = dual_graph(bs)
    longest = max(len(c) for c in full.ab_cycles)
    short = dual_graph(bs, cap=longest - 1)
    assert len(short.ab_cycles) < len(full.ab_cycles)


@pytest.mark.parametrize("flip", [False, True])
def test_ab_cycles_per_wall(flip):
    walls_seen = 0
    for sig in all_fixtures():
        vt = triangulation(sig, flip)
        bs = BranchedSurface(vt)
        dg = dual_graph(bs)
        for w in detect_walls(vt, build_flow_graph(vt)):
            assert len(ab_cycles_in_wall(bs, dg, w)) == expected_ab_count(w)
            walls_seen += 1
    assert walls_seen > 300


def test_mobius_versus_label_twist():
    # the two notions differ only for width-2 walls whose twist shift is 0
    differ = 0
    for sig in all_fixtures():
        for w in detect_walls(triangulation(sig)):
            if not w.twisted:
                assert not w.mobius
            elif not w.mobius:
                assert w.width == 2 and w.twist_shift == 0
                differ += 1
    assert differ > 0


def test_dual_dot():
    bs = BranchedSurface(triangulation("cPcbbbdxm_10"))
    text = dual_to_dot(bs, dual_graph(bs))
    assert text.startswith("digraph dual {")
    assert text.count("->") == 4


@pytest.mark.parametrize("values,admissible,singular", [
    ([2], True, ()),
    ([3, 2], True, (0,)),
    ([2, 5, 4], True, (1, 2)),
    ([1], False, ()),
    ([2, 1], False, ()),
])
def test_slope_admissibility(values, admissible, singular):
    rep = slope_admissibility(values)
    assert rep.admissible is admissible
    assert rep.prongs == tuple(values)
    assert rep.singular == singular


def test_slope_errors():
    with pytest.raises(ZeroIntersection):
        slope_admissibility([2, 0])
    with pytest.raises(ValueError):
        slope_admissibility([-2])


def test_known_loop_counts():
    assert boundary_triangulation(
        BranchedSurface(triangulation(upto8()[0]))).loop_counts() == [1]
    assert boundary_triangulation(
        BranchedSurface(triangulation("cPcbbbiht_12"))).loop_counts() == [2]
