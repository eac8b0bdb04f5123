"""The unstable branched surface as a cell complex dual to the triangulation.

Cells:

* a *double point* ``DP(t)`` for every tetrahedron ``t``;
* a *segment* of the branch locus for every face, running downwards from
  the double point of the tetrahedron above the face to that of the
  tetrahedron below it;
* a *sector* for every edge ``e``: a diamond whose top vertex is
  ``DP(above(e))``, whose upper edges cross the two bottom faces of that
  tetrahedron, and whose lower edges cross the faces between the
  tetrahedra of each side stack of ``e`` and the top faces of
  ``below(e)``.

The unstable train track on a face has its large branch dual to the
bottom edge of the tetrahedron above the face.  Inside a tetrahedron the
branch locus consists of two arcs, one for each side edge ``s`` of the
color opposite to the top edge; the arc enters through the top face
containing ``s`` and leaves through the bottom face containing ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import TheoremViolation, ZeroIntersection
from .triangulation import EDGE_INDEX


class BranchedSurfaceError(TheoremViolation):
    """The branched surface fails one of its structural properties."""


@dataclass(frozen=True)
class Sector:
    edge: int
    top: int                 # tetrahedron whose double point is the top vertex
    bottom: int              # tetrahedron whose double point is the bottom vertex
    sides: tuple             # per side, the side-stack tetrahedra top to bottom
    upper: tuple             # per side, the face crossed by the upper edge
    lower: tuple             # per side, faces crossed by the lower edges, top to bottom

    def boundary(self):
        """Vertices and edges of the diamond in cyclic order.

        Returns ``(vertices, edges)``: ``vertices`` are tetrahedra (double
        points), ``edges[k]`` joins ``vertices[k]`` to ``vertices[k+1]`` and
        is ``(face, downward)``.
        """
        a, b = self.sides
        verts = [self.top] + list(a) + [self.bottom] + list(reversed(b))
        edges = [(self.upper[0], True)] + [(f, True) for f in self.lower[0]]
        edges += [(f, False) for f in reversed(self.lower[1])] + [(self.upper[1], False)]
        return verts, edges


class BranchedSurface:
    """Cell structure of the unstable branched surface of ``vt``."""

    def __init__(self, vt):
        self.vt = vt
        n = vt.tet_count
        self._faces(vt)
        self.sectors = tuple(self._sector(e) for e in range(vt.edge_count))
        self.double_points = tuple(range(n))
        self._branch_locus()
        self.check()

    # -- faces and segments --------------------------------------------------

    def _faces(self, vt):
        n = vt.tet_count
        face_id = [[None] * 4 for _ in range(n)]
        upper, lower = [], []
        for t in range(n):
            for f in vt.diagonals[t][0]:
                # f is opposite a top-diagonal vertex: a bottom face of t
                u, g, _ = vt.table.glue(t, f)
                k = len(upper)
                face_id[t][f] = face_id[u][g] = k
                upper.append((t, f))
                lower.append((u, g))
        for t in range(n):
            for f in range(4):
                if face_id[t][f] is None:
                    raise BranchedSurfaceError(f"face {f} of tetrahedron {t} is unpaired")
        for (t, f), (u, g) in zip(upper, lower):
            if not vt.is_top_face(u, g):
                raise BranchedSurfaceError(f"face {g} of {u} is not a top face")
        self.face_id = tuple(map(tuple, face_id))
        self.face_upper = tuple(upper)   # (tetrahedron above, local face)
        self.face_lower = tuple(lower)   # (tetrahedron below, local face)

    @property
    def segment_count(self):
        return len(self.face_upper)

    def segment(self, face):
        """``(upper double point, lower double point)`` of a segment."""
        return self.face_upper[face][0], self.face_lower[face][0]

    def face_edges(self, face):
        """Edges of a face as ``(large, small_top, small_other)``.

        ``large`` is the bottom edge of the tetrahedron above, ``small_top``
        the top edge of the tetrahedron below.
        """
        vt = self.vt
        u = self.face_upper[face][0]
        t, g = self.face_lower[face]
        (a, b), _ = vt.diagonals[t]
        w = ({0, 1, 2, 3} - {a, b, g}).pop()
        large, top = vt.bottom_edge[u], vt.top_edge[t]
        rest = [vt.edge_of[t][EDGE_INDEX[a, w]], vt.edge_of[t][EDGE_INDEX[b, w]]]
        rest.remove(large)
        return large, top, rest[0]

    # -- sectors ------------------------------------------------------------

    def _sector(self, e):
        vt = self.vt
        st = vt.stacks[e]
        top = st.above
        upper = tuple(self.face_id[top][f] for f in vt.diagonals[top][0])
        lower = tuple(tuple(self.face_id[t][exit_] for t, (_, exit_) in zip(side, faces))
                      for side, faces in zip(st.sides, st.side_faces))
        return Sector(e, top, st.below, st.sides, upper, lower)

    # -- branch locus -------------------------------------------------------

    def _branch_locus(self):
        """Trace branch circles and record the arcs inside each tetrahedron."""
        vt = self.vt
        n = vt.tet_count
        succ = [None] * self.segment_count
        self.arcs = []        # per tetrahedron: two (in_face, out_face, s, cusp_vertex)
        for t in range(n):
            (a, b), (c, d) = vt.diagonals[t]
            top_color = vt.edge_color[vt.top_edge[t]]
            arcs = []
            for z in (c, d):                       # top face opposite z
                w = d if z == c else c
                for y in (a, b):
                    if vt.edge_color[vt.edge_of[t][EDGE_INDEX[y, w]]] != top_color:
                        # s = yw; leave through the bottom face containing y, w
                        out = b if y == a else a
                        fin, fout = self.face_id[t][z], self.face_id[t][out]
                        succ[fin] = fout
                        arcs.append((fin, fout, (y, w), y))
            if len(arcs) != 2:
                raise BranchedSurfaceError(f"tetrahedron {t} has {len(arcs)} branch arcs")
            self.arcs.append(tuple(arcs))
        self.arcs = tuple(self.arcs)
        self.branch_succ = tuple(succ)
        seen = [False] * self.segment_count
        circles = []
        for f0 in range(self.segment_count):
            if seen[f0]:
                continue
            cyc = []
            f = f0
            while not seen[f]:
                seen[f] = True
                cyc.append(f)
                f = succ[f]
            if f != f0:
                raise BranchedSurfaceError("branch locus is not a union of circles")
            circles.append(tuple(cyc))
        self.branch_circles = tuple(circles)
        self.circle_of = {f: i for i, c in enumerate(circles) for f in c}

    def circle_cusp(self, circle):
        """Cusp (vertex class) the branch circle faces."""
        f = self.branch_circles[circle][0]
        t = self.face_lower[f][0]
        for fin, _, _, y in self.arcs[t]:
            if fin == f:
                return self.vt.vertex_of[t][y]
        raise BranchedSurfaceError("circle segment without an arc")

    # -- checks -------------------------------------------------------------

    def check(self):
        vt = self.vt
        bundle = {"signature": vt.signature}
        if len(self.sectors) != vt.edge_count or len(self.double_points) != vt.tet_count:
            raise BranchedSurfaceError("branched surface is not dual to the triangulation", bundle)
        for sec in self.sectors:
            if any(len(lw) < 1 for lw in sec.lower):
                raise BranchedSurfaceError(f"sector {sec.edge} lacks lower edges", bundle)
        # every segment is an upper edge of one sector and a lower edge of two
        ups = [0] * self.segment_count
        lows = [0] * self.segment_count
        for sec in self.sectors:
            for f in sec.upper:
                ups[f] += 1
            for side in sec.lower:
                for f in side:
                    lows[f] += 1
        if any(u != 1 for u in ups) or any(lw != 2 for lw in lows):
            raise BranchedSurfaceError("segment incidence is not (1 upper, 2 lower)", bundle)
        for f in range(self.segment_count):
            large, top, other = self.face_edges(f)
            sec = self.sectors[large]
            if f not in sec.upper:
                raise BranchedSurfaceError(f"face {f}: large branch is not an upper edge", bundle)
            if not any(f in side for side in self.sectors[top].lower) or \
                    not any(f in side for side in self.sectors[other].lower):
                raise BranchedSurfaceError(f"face {f}: small branches are not lower edges", bundle)
        self.check_double_points()

    def check_double_points(self):
        """Orientation rule at every double point.

        On the quadrilateral of ``t`` (corners: top edge, side ``x1``,
        bottom edge, side ``x2``) each branch arc splits the boundary into
        two arcs; the one holding the small side of its train-track switch
        carries more sectors.  The other branch arc must cross from that
        side to the other, following its downward orientation.
        """
        vt = self.vt
        for t in range(vt.tet_count):
            (a, b), (c, d) = vt.diagonals[t]
            top_color = vt.edge_color[vt.top_edge[t]]
            same = [EDGE_INDEX[p, q] for p in (a, b) for q in (c, d)
                    if vt.edge_color[vt.edge_of[t][EDGE_INDEX[p, q]]] == top_color]
            x1, x2 = same
            # boundary positions: corners 0 (top) 2 (x1) 4 (bottom) 6 (x2);
            # the quad edge between corners p and q sits at their midpoint
            def corner(k):
                return 2 if k == x1 else 6

            def face_pos(face, top_side):
                verts = [v for v in range(4) if v != face]
                side = [k for k in (x1, x2) if set(_pair(k)) <= set(verts)]
                if len(side) != 1:
                    raise BranchedSurfaceError(f"quad of {t} meets face {face} badly")
                cpos = corner(side[0])
                if top_side:
                    return 1 if cpos == 2 else 7
                return 3 if cpos == 2 else 5

            spans = []
            for fin_id, fout_id, s, y in self.arcs[t]:
                fin = [f for f in range(4) if self.face_id[t][f] == fin_id and f in (c, d)][0]
                fout = [f for f in range(4) if self.face_id[t][f] == fout_id and f in (a, b)][0]
                p_in, p_out = face_pos(fin, True), face_pos(fout, False)
                # large branch on the top face is the side edge in it, so the
                # small quad side there is the top corner; on the bottom face
                # the large branch is the bottom edge, small side its x corner
                big_in = _large_corner_top(vt, self, t, fin, x1, x2)
                more_top = 0 if big_in != 0 else None
                if more_top is None:
                    raise BranchedSurfaceError(
                        f"tetrahedron {t}: top edge is the large branch of a top face")
                more_bottom = corner(x1 if p_out == 3 else x2)
                arc_a = _between(p_in, p_out)
                if (more_top in arc_a) != (more_bottom in arc_a):
                    raise BranchedSurfaceError(
                        f"tetrahedron {t}: inconsistent sides of the branch arc through {s}")
                more = arc_a if more_top in arc_a else _between(p_out, p_in)
                spans.append((p_in, p_out, more))
            (i1, o1, m1), (i2, o2, m2) = spans
            if not (i2 in m1 and o2 not in m1 and i1 in m2 and o1 not in m2):
                raise BranchedSurfaceError(
                    f"double point of tetrahedron {t} breaks the orientation rule",
                    {"signature": vt.signature, "tet": t})


def _pair(k):
    from .triangulation import LOCAL_EDGES
    return LOCAL_EDGES[k]


def _between(p, q):
    """Boundary positions strictly between ``p`` and ``q`` going up mod 8."""
    out = set()
    k = (p + 1) % 8
    while k != q:
        out.add(k)
        k = (k + 1) % 8
    return out


def _large_corner_top(vt, bs, t, face, x1, x2):
    """Corner position of the large branch on top face ``face`` of ``t``:
    0 for the top edge, 2/6 for the side edge x1/x2."""
    fid = bs.face_id[t][face]
    large = vt.bottom_edge[bs.face_upper[fid][0]]
    if large == vt.top_edge[t] and vt.edge_of[t][x1] != large and vt.edge_of[t][x2] != large:
        return 0
    verts = [v for v in range(4) if v != face]
    for k, pos in ((x1, 2), (x2, 6)):
        if set(_pair(k)) <= set(verts) and vt.edge_of[t][k] == large:
            return pos
    return 0


# -- dual graph and AB cycles ----------------------------------------------

@dataclass(frozen=True)
class DualGraph:
    vertices: tuple            # tetrahedra
    edges: tuple               # (face, upper tet, lower tet), oriented downwards
    branching: dict            # face -> face continuing its branch circle
    anti_branching: dict       # face -> the other outgoing face at the same vertex
    ab_cycles: tuple


def dual_graph(bs, cap=None):
    """Dual graph with turn classification and AB cycles up to ``cap`` faces.

    At the double point of ``t`` an incoming face (top face of ``t``) turns
    into one of the two bottom faces of ``t``; the turn is branching when
    it follows a branch circle and anti-branching otherwise.
    """
    vt = bs.vt
    cap = cap if cap is not None else 4 * vt.tet_count
    edges = tuple((f, bs.face_upper[f][0], bs.face_lower[f][0])
                  for f in range(bs.segment_count))
    branching = dict(enumerate(bs.branch_succ))
    anti = {}
    for t in range(vt.tet_count):
        outs = [bs.face_id[t][f] for f in vt.diagonals[t][0]]
        ins = [bs.face_id[t][f] for f in vt.diagonals[t][1]]
        for fin in ins:
            nxt = branching[fin]
            anti[fin] = outs[1] if outs[0] == nxt else outs[0]
    seen, cycles = set(), []
    for f0 in range(bs.segment_count):
        if f0 in seen:
            continue
        cyc, f = [], f0
        while f not in seen:
            seen.add(f)
            cyc.append(f)
            f = anti[f]
        if len(cyc) <= cap:
            cycles.append(tuple(cyc))
    return DualGraph(tuple(range(vt.tet_count)), edges, branching, anti, tuple(cycles))


def ab_cycles_in_wall(bs, dg, wall):
    """AB cycles whose faces are all shared by two tetrahedra of the wall
    grid, excluding faces between two outer-column tetrahedra."""
    tets = {t for col in wall.grid for t in col}
    inner = {t for col in wall.grid[1:-1] for t in col}
    out = []
    for cyc in dg.ab_cycles:
        ok = True
        for f in cyc:
            u, lo = bs.face_upper[f][0], bs.face_lower[f][0]
            if u not in tets or lo not in tets or (u not in inner and lo not in inner):
                ok = False
                break
        if ok:
            out.append(cyc)
    return out


def expected_ab_count(wall):
    """AB cycles inside a wall: ``ceil(w / 2)`` if its quadrilateral
    surface is a Mobius band, ``w`` otherwise.

    This uses the Mobius characterisation of twisting rather than the
    label relation, which differ for width-2 walls whose outer columns
    coincide without the two strips being identified.
    """
    return math.ceil(wall.width / 2) if wall.mobius else wall.width


def dual_to_dot(bs, dg):
    lines = ["digraph dual {"]
    for t in dg.vertices:
        lines.append(f"  t{t};")
    ab = {f for c in dg.ab_cycles for f in c}
    for f, u, lo in dg.edges:
        style = ' style=bold' if f in ab else ""
        lines.append(f'  t{u} -> t{lo} [label="f{f}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- boundary triangulation and ladderpoles ---------------------------------

@dataclass(frozen=True)
class CuspData:
    cusp: int
    triangles: tuple          # (tet, vertex) link triangles
    euler_characteristic: int
    loops: tuple              # each loop: tuple of (tet, vertex, in_face, out_face)
    loop_count: int


@dataclass(frozen=True)
class BoundaryData:
    cusps: tuple

    def loop_counts(self):
        return [c.loop_count for c in self.cusps]

    def to_json(self):
        return [{"cusp": c.cusp, "triangles": len(c.triangles),
                 "euler_characteristic": c.euler_characteristic,
                 "loop_count": c.loop_count,
                 "loops": [[list(x) for x in loop] for loop in c.loops]}
                for c in self.cusps]


def boundary_triangulation(bs):
    """Vertex-link triangulations with their ladderpole loops.

    Each branch arc inside ``t`` gives an oriented interval in the link
    triangle of its cusp vertex, from the link edge on the top face it
    enters to the link edge on the bottom face it leaves.  The intervals
    are joined across link edges; every loop must close up inside one
    cusp.
    """
    vt = bs.vt
    table = vt.table
    interval = {}            # (t, v) -> (in_face, out_face)
    for t, arcs in enumerate(bs.arcs):
        for fin_id, fout_id, _, y in arcs:
            fin = [f for f in range(4) if bs.face_id[t][f] == fin_id and vt.is_top_face(t, f)][0]
            fout = [f for f in range(4) if bs.face_id[t][f] == fout_id
                    and not vt.is_top_face(t, f)][0]
            if (t, y) in interval:
                raise BranchedSurfaceError(f"link triangle ({t}, {y}) holds two intervals")
            interval[t, y] = (fin, fout)
    # follow intervals across link edges
    loops, used = [], set()
    for key in sorted(interval):
        if key in used:
            continue
        loop = []
        cur = key
        while cur not in used:
            used.add(cur)
            t, v = cur
            fin, fout = interval[cur]
            loop.append((t, v, fin, fout))
            u, g, p = table.glue(t, fout)
            nxt = (u, p[v])
            if nxt not in interval or interval[nxt][0] != g:
                raise BranchedSurfaceError(
                    f"ladderpole interval in ({t}, {v}) does not continue across face {fout}",
                    {"signature": vt.signature})
            cur = nxt
        if cur != key:
            raise BranchedSurfaceError("ladderpole intervals do not close up")
        loops.append(tuple(loop))
    cusps = []
    for c in range(vt.cusp_count):
        tris = tuple((t, v) for t in range(vt.tet_count) for v in range(4)
                     if vt.vertex_of[t][v] == c)
        V = len(_link_vertices(vt, c))
        chi = V - len(tris) // 2
        mine = tuple(lp for lp in loops if vt.vertex_of[lp[0][0]][lp[0][1]] == c)
        cusps.append(CuspData(c, tris, chi, mine, len(mine)))
    return BoundaryData(tuple(cusps))


def _link_vertices(vt, cusp):
    """Vertices of the link of ``cusp``: edge-ends at that cusp, found by
    gluing the corners of link triangles across faces."""
    from .triangulation import _UnionFind
    n = vt.tet_count
    index = {}
    for t in range(n):
        for v in range(4):
            if vt.vertex_of[t][v] != cusp:
                continue
            for w in range(4):
                if w != v:
                    index[t, v, w] = len(index)
    uf = _UnionFind(len(index))
    for (t, v, w), i in index.items():
        for f in range(4):
            if f in (v, w):
                continue
            u, _, p = vt.table.glue(t, f)
            uf.union(i, index[u, p[v], p[w]])
    return {uf.find(i) for i in index.values()}


# -- complementary regions of B ----------------------------------------------

@dataclass(frozen=True)
class CuspRegion:
    cusp: int
    polygon_cusps: int
    description: str
    ladderpole_slope: bool = True


def complementary_regions_of_B(bs, boundary=None):
    """One region per cusp: a once-punctured cusped polygon times a circle.

    The pieces of the complement inside each tetrahedron are the four
    corners cut off by the quadrilateral and the two triangles; they glue
    across faces like the ideal vertices, which is checked here.  The
    polygon's cusp count is the number of branch circles facing the cusp,
    which must equal the number of ladderpole loops.
    """
    vt = bs.vt
    boundary = boundary or boundary_triangulation(bs)
    from .triangulation import _UnionFind
    n = vt.tet_count
    uf = _UnionFind(4 * n)
    for t in range(n):
        for f in range(4):
            u, g, p = vt.table.glue(t, f)
            for v in range(4):
                if v != f:
                    uf.union(4 * t + v, 4 * u + p[v])
    regions = {uf.find(i) for i in range(4 * n)}
    if len(regions) != vt.cusp_count:
        raise BranchedSurfaceError("complementary regions do not match cusps")
    circles = [0] * vt.cusp_count
    for i in range(len(bs.branch_circles)):
        circles[bs.circle_cusp(i)] += 1
    out = []
    for cd in boundary.cusps:
        if circles[cd.cusp] != cd.loop_count:
            raise BranchedSurfaceError(
                f"cusp {cd.cusp}: {circles[cd.cusp]} cusp circles but "
                f"{cd.loop_count} ladderpole loops", {"signature": vt.signature})
        k = cd.loop_count
        out.append(CuspRegion(cd.cusp, k, f"(once-punctured cusped {k}-gon) x S^1"))
    return out


# -- slopes -------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeReport:
    admissible: bool
    prongs: tuple
    singular: tuple


def slope_admissibility(intersections):
    """Filling slopes given as ``|<s_i, l_i>|`` per cusp.

    Admissible iff every value is at least 2; the orbit at cusp ``i`` is
    then ``|<s_i, l_i>|``-pronged and singular when that exceeds 2.
    """
    values = [int(v) for v in intersections]
    if any(v < 0 for v in values):
        raise ValueError("intersection numbers are nonnegative")
    if any(v == 0 for v in values):
        raise ZeroIntersection("a slope with zero intersection is never admissible")
    ok = all(v >= 2 for v in values)
    singular = tuple(i for i, v in enumerate(values) if v >= 3)
    return SlopeReport(ok, tuple(values), singular)
