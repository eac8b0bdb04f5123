"""Complementary regions of the flow graph (or reduced flow graph) in B.

The flow graph sits in the branched surface with the vertex for edge
``e`` at the top vertex of the sector of ``e`` and its outgoing edges as
chords of that sector, running to the lower vertices ``DP(S_i)``,
``i >= 2``, of the side stacks and to the bottom vertex.  Cutting every
sector along its chords gives polygonal pieces; pieces glue along
segments of the branch locus, three at a time (one large side, two small
sides).

A piece whose segments are all small-side and consecutive along its
boundary is a *tongue*; the remaining pieces form the *core*.  Each
region is expected to be an annulus or Mobius band core with tongues
attached along arcs of the branch locus that criss-cross the core.  The
arcs are followed through double points that are not vertices of the
graph; the number of such crossings per arc is ``w - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .branched import BranchedSurface
from .errors import UnclassifiableRegion
from .triangulation import EDGE_INDEX, _UnionFind, orientation_signs


@dataclass(frozen=True)
class Piece:
    sector: int
    verts: tuple       # double points (tetrahedra) in cyclic order
    edges: tuple       # edges[k] joins verts[k] to verts[k+1]:
                       # ("seg", face, downward, role) or ("chord", target, None, None)


@dataclass(frozen=True)
class ComplementaryRegion:
    core: str                  # "annulus" or "mobius"
    pieces: tuple              # piece ids
    core_pieces: tuple
    tongues: tuple
    segments: tuple            # faces of the branch locus inside the region
    euler_characteristic: int
    boundary_components: int
    w: int                     # criss-cross parameter
    arcs: tuple                # each arc: tuple of faces, oriented downwards
    interior_points: tuple     # double points inside the region
    tongue_sides: tuple = ()   # per arc family in the orientation cover, sides seen
    source_wall: int = None    # index of the wall whose cycles lie inside, if any

    @property
    def tongue_count(self):
        return len(self.tongues)

    @property
    def pattern(self):
        """``"zigzag"`` when arcs have no interior crossings, else
        ``"crisscross(w)"``."""
        return "zigzag" if self.w == 1 else f"crisscross({self.w})"

    def to_json(self):
        return {"core": self.core, "pattern": self.pattern,
                "source_wall": self.source_wall, "pieces": len(self.pieces),
                "core_pieces": len(self.core_pieces), "tongues": len(self.tongues),
                "euler_characteristic": self.euler_characteristic,
                "boundary_components": self.boundary_components, "w": self.w,
                "arcs": [list(a) for a in self.arcs],
                "interior_points": list(self.interior_points)}


def _sector_chords(vt, sec, removed):
    """Diamond positions of the chords of ``sec`` kept in the graph."""
    verts, _ = sec.boundary()
    k = len(sec.sides[0])
    m = len(sec.sides[1])
    pos = [1 + k]                                      # bottom vertex
    pos += [1 + i for i in range(1, k)]                # A_2 .. A_k
    pos += [len(verts) - 1 - i for i in range(1, m)]   # B_2 .. B_m
    if sec.edge in removed:
        return []
    return sorted(p for p in pos if vt.bottom_edge[verts[p]] not in removed)


def _check_chords(vt, bs, fg):
    """The chords of every sector are exactly the outgoing flow edges."""
    out = {}
    for s, t, _ in fg.edges:
        out.setdefault(s, []).append(t)
    for sec in bs.sectors:
        verts, _ = sec.boundary()
        got = sorted(vt.bottom_edge[verts[p]] for p in _sector_chords(vt, sec, frozenset()))
        if got != sorted(out.get(sec.edge, [])):
            raise UnclassifiableRegion(
                f"chords of sector {sec.edge} disagree with the flow graph",
                {"signature": vt.signature, "chords": got,
                 "flow": sorted(out.get(sec.edge, []))})


def cut_pieces(bs, removed=frozenset()):
    """Cut every sector along the chords whose target is kept."""
    vt = bs.vt
    pieces = []
    for sec in bs.sectors:
        verts, edges = sec.boundary()
        k, m = len(sec.lower[0]), len(sec.lower[1])
        roles = ["large"] + ["top" if i == k - 1 else "other" for i in range(k)]
        roles += ["top" if i == 0 else "other" for i in range(m)] + ["large"]
        tagged = [("seg", f, down, r) for (f, down), r in zip(edges, roles)]
        cuts = [0] + _sector_chords(vt, sec, removed) + [len(verts)]
        if len(cuts) == 2:
            pieces.append(Piece(sec.edge, tuple(verts), tuple(tagged)))
            continue
        for lo, hi in zip(cuts, cuts[1:]):
            pv = [verts[0]] + [verts[i % len(verts)] for i in range(max(lo, 1), hi + 1)
                               if i % len(verts) != 0]
            pe = []
            if lo > 0:
                pe.append(("chord", lo, None, None))
            pe += tagged[lo:hi]
            if hi < len(verts):
                pe.append(("chord", hi, None, None))
            pieces.append(Piece(sec.edge, tuple(pv), tuple(pe)))
    return pieces


def _is_tongue(piece):
    segs = [i for i, e in enumerate(piece.edges) if e[0] == "seg"]
    if not segs or any(piece.edges[i][3] == "large" for i in segs):
        return False
    n = len(piece.edges)
    runs = sum(1 for i in segs if (i - 1) % n not in segs)
    return runs == 1


def _face_ccw(vt, signs, t, g):
    """Vertices of face ``g`` of ``t`` in counter-clockwise order seen from
    outside ``t``."""
    verts = [v for v in range(4) if v != g]
    if signs[t] * (-1) ** g < 0:
        verts.reverse()
    return verts


def _tongue_right(vt, bs, signs, face, tongue_role):
    """True if the tongue branch lies to the right of the core, seen from
    above the face, with the core running from the large branch into the
    other small branch."""
    t, g = bs.face_lower[face]
    (a, b), _ = vt.diagonals[t]
    w = ({0, 1, 2, 3} - {a, b, g}).pop()
    top_color = vt.edge_color[vt.top_edge[t]]
    same = [v for v in (a, b) if vt.edge_color[vt.edge_of[t][EDGE_INDEX[v, w]]] == top_color]
    opp = [v for v in (a, b) if v not in same]
    x = frozenset((same[0], w))
    s = frozenset((opp[0], w))
    tongue = frozenset((a, b)) if tongue_role == "top" else s
    p, q, r = _face_ccw(vt, signs, t, g)
    ccw = [frozenset((p, q)), frozenset((q, r)), frozenset((r, p))]
    return ccw[(ccw.index(x) + 1) % 3] == tongue


def complementary_regions(vt, fg, removed=frozenset(), bs=None, walls=()):
    """Regions of ``B`` cut along the flow graph minus ``removed`` vertices.

    ``removed`` is empty for the flow graph and the set of infinitesimal
    cycle vertices of all walls for the reduced flow graph.  Regions
    holding the double points of a wall's cycles are tagged with that
    wall's index.
    """
    bs = bs or BranchedSurface(vt)
    removed = frozenset(removed)
    _check_chords(vt, bs, fg)
    pieces = cut_pieces(bs, removed)
    bundle = {"signature": vt.signature, "removed": sorted(removed)}

    # segment incidences
    inc = {}
    for pid, pc in enumerate(pieces):
        for k, e in enumerate(pc.edges):
            if e[0] == "seg":
                inc.setdefault(e[1], []).append((pid, k, e[2], e[3]))
    for f in range(bs.segment_count):
        roles = sorted(r for _, _, _, r in inc.get(f, []))
        if roles != ["large", "other", "top"]:
            raise UnclassifiableRegion(f"segment {f} has incidences {roles}", bundle)

    uf = _UnionFind(len(pieces))
    for f, lst in inc.items():
        for pid, _, _, _ in lst[1:]:
            uf.union(lst[0][0], pid)
    groups = {}
    for pid in range(len(pieces)):
        groups.setdefault(uf.find(pid), []).append(pid)

    tongue = [_is_tongue(pc) for pc in pieces]
    interior = {t for t in range(vt.tet_count) if vt.bottom_edge[t] in removed}
    signs = orientation_signs(vt.table)
    owner = {vt.above[v]: k for k, wall in enumerate(walls)
             for c in wall.infinitesimal_cycles for v in c}
    regions = []
    for key in sorted(groups, key=lambda r: min(groups[r])):
        reg = _classify(vt, bs, pieces, groups[key], inc, tongue, interior, signs, bundle)
        found = {owner[t] for t in reg.interior_points if t in owner}
        if len(found) > 1:
            raise UnclassifiableRegion(f"region holds cycles of walls {sorted(found)}", bundle)
        if found:
            reg = replace(reg, source_wall=found.pop())
        regions.append(reg)
    if not sector_conservation(vt, bs, pieces, regions, removed):
        raise UnclassifiableRegion("pieces do not reassemble the sectors", bundle)
    return regions


def sector_conservation(vt, bs, pieces, regions, removed=frozenset()):
    """Every sector is split into (kept chords + 1) pieces, each piece lies
    in exactly one region, and each sector's segments are used once."""
    count = {}
    for r in regions:
        for p in r.pieces:
            count[p] = count.get(p, 0) + 1
    if sorted(count) != list(range(len(pieces))) or any(c != 1 for c in count.values()):
        return False
    for sec in bs.sectors:
        mine = [pc for pc in pieces if pc.sector == sec.edge]
        if len(mine) != len(_sector_chords(vt, sec, removed)) + 1:
            return False
        _, edges = sec.boundary()
        segs = sorted(e[1] for pc in mine for e in pc.edges if e[0] == "seg")
        if segs != sorted(f for f, _ in edges):
            return False
    return True


def _classify(vt, bs, pieces, members, inc, tongue, interior, signs, bundle):
    members = sorted(members)
    mset = set(members)
    core = [p for p in members if not tongue[p]]
    tongues = [p for p in members if tongue[p]]
    segs = sorted(f for f, lst in inc.items() if lst[0][0] in mset)
    bundle = dict(bundle, pieces=members)
    core_inc = {}
    for f in segs:
        lst = inc[f]
        c = [x for x in lst if not tongue[x[0]]]
        if len(c) != 2 or len(lst) - len(c) != 1:
            raise UnclassifiableRegion(
                f"segment {f} has {len(c)} core pieces and {len(lst) - len(c)} tongues",
                bundle)
        core_inc[f] = c

    # orientation cover of the core: nodes (piece, o)
    idx = {(p, o): i for i, (p, o) in enumerate((p, o) for p in core for o in (1, -1))}
    cover = _UnionFind(len(idx))
    for f, ((p, _, dp, _), (q, _, dq, _)) in core_inc.items():
        sp, sq = 1 if dp else -1, 1 if dq else -1
        for o in (1, -1):
            cover.union(idx[p, o], idx[q, -o * sp * sq])
    orientable = cover.find(idx[core[0], 1]) != cover.find(idx[core[0], -1])
    root = cover.find(idx[core[0], 1])
    sheet = [(p, o) for (p, o), i in idx.items() if cover.find(i) == root]

    # corner classes in the chosen cover component
    cidx = {}
    for p, o in sheet:
        for k in range(len(pieces[p].verts)):
            cidx[p, o, k] = len(cidx)
    corners = _UnionFind(len(cidx))
    sheet_set = set(sheet)
    lifted = {}                       # (face, (p, o)) -> (upper corner, lower corner)
    for f, ((p, kp, dp, _), (q, kq, dq, _)) in core_inc.items():
        sp, sq = 1 if dp else -1, 1 if dq else -1
        np_, nq = len(pieces[p].verts), len(pieces[q].verts)
        for o in (1, -1):
            if (p, o) not in sheet_set:
                continue
            o2 = -o * sp * sq
            up_p, lo_p = (kp, (kp + 1) % np_) if dp else ((kp + 1) % np_, kp)
            up_q, lo_q = (kq, (kq + 1) % nq) if dq else ((kq + 1) % nq, kq)
            corners.union(cidx[p, o, up_p], cidx[q, o2, up_q])
            corners.union(cidx[p, o, lo_p], cidx[q, o2, lo_q])
            lifted[f, (p, o)] = (cidx[p, o, up_p], cidx[p, o, lo_p], (q, o2))

    V = len({corners.find(i) for i in cidx.values()})
    chords = [(p, o, k) for p, o in sheet for k, e in enumerate(pieces[p].edges)
              if e[0] == "chord"]
    E = len(lifted) + len(chords)
    F = len(sheet)
    chi_cover = V - E + F
    chi = chi_cover if orientable else chi_cover // 2
    if chi_cover % (1 if orientable else 2) or chi != 0:
        raise UnclassifiableRegion(f"core has Euler characteristic {chi_cover}"
                                   f"{'' if orientable else '/2'}", bundle)

    # boundary of the (cover of the) core: chords between corner classes
    bnodes = {}
    buf_edges = []
    for p, o, k in chords:
        n = len(pieces[p].verts)
        a = corners.find(cidx[p, o, k])
        b = corners.find(cidx[p, o, (k + 1) % n])
        buf_edges.append((a, b))
        bnodes[a] = bnodes.get(a, 0) + 1
        bnodes[b] = bnodes.get(b, 0) + 1
    if any(d != 2 for d in bnodes.values()):
        raise UnclassifiableRegion("core boundary is not a union of circles", bundle)
    bid = {v: i for i, v in enumerate(bnodes)}
    buf = _UnionFind(len(bid))
    for a, b in buf_edges:
        buf.union(bid[a], bid[b])
    comp_of = {v: buf.find(bid[v]) for v in bnodes}
    cover_boundary = len(set(comp_of.values()))
    if cover_boundary != 2:
        raise UnclassifiableRegion(f"core cover has {cover_boundary} boundary circles", bundle)
    boundary = 2 if orientable else 1

    # arcs of attachment, followed through interior double points
    succ = bs.branch_succ
    arcs, seen = [], set()
    for f in segs:
        if bs.face_upper[f][0] in interior:
            continue
        arc, g = [f], f
        while bs.face_lower[g][0] in interior:
            g = succ[g]
            if g not in core_inc:
                raise UnclassifiableRegion(f"attaching arc leaves the region at {g}", bundle)
            arc.append(g)
            if len(arc) > len(segs):
                raise UnclassifiableRegion("attaching arc does not end", bundle)
        arcs.append(tuple(arc))
        seen.update(arc)
    if seen != set(segs) or sum(map(len, arcs)) != len(segs):
        raise UnclassifiableRegion("attaching arcs do not partition the segments", bundle)
    widths = {len(a) for a in arcs}
    if len(widths) != 1:
        raise UnclassifiableRegion(f"attaching arcs have lengths {sorted(widths)}", bundle)
    w = widths.pop()

    # lift arcs to the cover; every boundary vertex starts one arc and ends one
    starts, ends = {}, {}
    sides = {}
    for arc in arcs:
        for p, o in sheet:
            if (arc[0], (p, o)) not in lifted:
                continue
            up, lo, _ = lifted[arc[0], (p, o)]
            cur_side = []
            ok = True
            node = (p, o)
            for i, f in enumerate(arc):
                if i:
                    nxt = [(key, val) for key, val in lifted.items()
                           if key[0] == f and corners.find(val[0]) == corners.find(lo)]
                    if len(nxt) != 1:
                        ok = False
                        break
                    (_, node), (up2, lo, _) = nxt[0]
                cur_side.append(_side(vt, bs, signs, f, inc, tongue, node, lifted,
                                      pieces))
            if not ok:
                raise UnclassifiableRegion("attaching arc does not lift to the core", bundle)
            a, b = corners.find(up), corners.find(lo)
            starts[a] = starts.get(a, 0) + 1
            ends[b] = ends.get(b, 0) + 1
            if comp_of.get(a) is None or comp_of.get(b) is None:
                raise UnclassifiableRegion("attaching arc ends away from the boundary", bundle)
            if comp_of[a] == comp_of[b]:
                raise UnclassifiableRegion("attaching arc returns to the boundary it left",
                                           bundle)
            sides.setdefault(comp_of[a], set()).update(cur_side)
    if any(starts.get(v, 0) != 1 or ends.get(v, 0) != 1 for v in bnodes):
        raise UnclassifiableRegion("boundary vertices do not start and end one arc each",
                                   bundle)
    tongue_sides = tuple(tuple(sorted(v)) for _, v in sorted(sides.items()))
    if w >= 3:
        fam = [set(v) for v in sides.values()]
        if len(fam) != 2 or any(len(s) != 1 for s in fam) or fam[0] == fam[1]:
            raise UnclassifiableRegion(
                f"tongues of the two arc families are not on opposite sides: {tongue_sides}",
                bundle)
    return ComplementaryRegion(
        "annulus" if orientable else "mobius", tuple(members), tuple(core), tuple(tongues),
        tuple(segs), chi, boundary, w, tuple(arcs),
        tuple(sorted({t for f in segs for t in (bs.face_upper[f][0], bs.face_lower[f][0])
                      if t in interior})),
        tongue_sides)


def _side(vt, bs, signs, f, inc, tongue, node, lifted, pieces):
    """Side of the core (+1/-1) on which the tongue at ``f`` lies, relative
    to the orientation of the lifted core piece ``node``."""
    p, o = node
    q = lifted[f, node][2]
    # the large piece sits on the far side of the core direction
    entries = {x[0]: x for x in inc[f]}
    tongue_entry = [x for x in inc[f] if tongue[x[0]]][0]
    small_core = q if entries[q[0]][3] != "large" else node
    _, _, down, _ = entries[small_core[0]]
    right = _tongue_right(vt, bs, signs, f, tongue_entry[3])
    return (1 if right else -1) * (1 if down else -1) * small_core[1]


def regions_summary(regions):
    return [r.to_json() for r in regions]


