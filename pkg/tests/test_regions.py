import pytest

from conftest import all_fixtures, triangulation
from veerwall.branched import BranchedSurface
from veerwall.flowgraph import build_flow_graph, reduce
from veerwall.regions import (complementary_regions, cut_pieces, regions_summary,
                              sector_conservation)
from veerwall.walls import complementary_regions as regions_for_variant
from veerwall.walls import detect_walls


def _setup(sig, flip=False):
    vt = triangulation(sig, flip)
    fg = build_flow_graph(vt)
    walls = detect_walls(vt, fg)
    removed = frozenset(v for w in walls for c in w.infinitesimal_cycles for v in c)
    return vt, fg, walls, removed, BranchedSurface(vt)


def check_regions(vt, bs, regions, pieces):
    faces = sorted(f for r in regions for f in r.segments)
    assert faces == list(range(bs.segment_count))
    assert sorted(p for r in regions for p in r.pieces) == list(range(len(pieces)))
    for r in regions:
        assert r.core in ("annulus", "mobius")
        assert r.euler_characteristic == 0
        assert sorted(r.core_pieces + r.tongues) == sorted(r.pieces)
        assert r.tongue_count >= 1
        assert all(len(a) == r.w for a in r.arcs)


@pytest.mark.parametrize("flip", [False, True])
def test_flow_graph_regions_zigzag(flip):
    for sig in all_fixtures():
        vt, fg, walls, removed, bs = _setup(sig, flip)
        regions = complementary_regions(vt, fg, frozenset(), bs)
        pieces = cut_pieces(bs)
        # one piece per sector plus one per chord, i.e. per flow-graph edge
        assert len(pieces) == vt.edge_count + len(fg.edges)
        check_regions(vt, bs, regions, pieces)
        assert all(r.pattern == "zigzag" for r in regions)
        assert all(r.source_wall is None for r in regions)
        assert sector_conservation(vt, bs, pieces, regions)


@pytest.mark.parametrize("flip", [False, True])
def test_reduced_graph_regions_crisscross(flip):
    for sig in all_fixtures():
        vt, fg, walls, removed, bs = _setup(sig, flip)
        regions = complementary_regions(vt, fg, removed, bs, walls)
        pieces = cut_pieces(bs, removed)
        red = reduce(fg, walls)
        assert len(pieces) == vt.edge_count + len(red.edges)
        check_regions(vt, bs, regions, pieces)
        assert sector_conservation(vt, bs, pieces, regions, removed)
        sources = {}
        for r in regions:
            if r.source_wall is None:
                assert r.pattern == "zigzag"
            else:
                sources.setdefault(r.source_wall, []).append(r)
        assert sorted(sources) == list(range(len(walls)))
        for k, wall in enumerate(walls):
            (r,) = sources[k]
            assert r.w == wall.width
            assert r.pattern == f"crisscross({wall.width})"
            assert (r.core == "mobius") == wall.mobius


def test_variant_wrapper():
    sig = "eLAkbbcdddhwqj_2102"
    vt = triangulation(sig)
    flow = regions_for_variant(vt, "flow")
    red = regions_for_variant(vt, "flow-red")
    assert {r.pattern for r in flow} == {"zigzag"}
    assert "crisscross(3)" in {r.pattern for r in red}
    with pytest.raises(ValueError):
        regions_for_variant(vt, "other")


def test_conservation_detects_missing_piece():
    vt, fg, walls, removed, bs = _setup("eLAkbbcdddhwqj_2102")
    regions = complementary_regions(vt, fg, frozenset(), bs)
    pieces = cut_pieces(bs)
    assert sector_conservation(vt, bs, pieces, regions)
    assert not sector_conservation(vt, bs, pieces + pieces[:1], regions)
    assert not sector_conservation(vt, bs, pieces, regions[1:])


def test_summary_json():
    vt, fg, walls, removed, bs = _setup("fLAMcaccdeejsnaxk_20010")
    out = regions_summary(complementary_regions(vt, fg, removed, bs, walls))
    assert {"core", "pattern", "w", "source_wall"} <= set(out[0])
