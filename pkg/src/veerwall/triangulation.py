"""Edge classes, taut/transverse-taut/veering validation and edge stacks.

Conventions used throughout the package:

* Local edge ``k`` of a tetrahedron joins the vertex pair ``LOCAL_EDGES[k]``
  (``01, 02, 03, 12, 13, 23``).  Face ``f`` is the face opposite vertex ``f``.
* The angle digit ``d`` puts the angle pi on the opposite pair
  ``PI_PAIRS[d]``, that is ``01|23``, ``02|13`` or ``03|12``.
* Each flat tetrahedron has a *top* diagonal ``(a, b)`` and a *bottom*
  diagonal ``(c, d)``, both taken from its pi pair.  Its top faces are the
  two faces containing ``ab`` (opposite ``c`` and ``d``); its bottom faces
  contain ``cd``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotTaut, NotTransverseTaut, NotVeering, StackPatternViolation
from .sigparse import PI_PAIRS, decode, perm_sign

LOCAL_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {}
for _k, (_i, _j) in enumerate(LOCAL_EDGES):
    EDGE_INDEX[_i, _j] = EDGE_INDEX[_j, _i] = _k

RED, BLUE = 0, 1
COLOR_NAMES = ("red", "blue")
TOGGLE, RED_FAN, BLUE_FAN = "toggle", "red_fan", "blue_fan"


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the smaller root so that numbering is stable
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def _number_classes(uf, size):
    """Map each slot to a class id numbered by first appearance."""
    ids, out = {}, []
    for x in range(size):
        out.append(ids.setdefault(uf.find(x), len(ids)))
    return out, len(ids)


def build_edge_classes(table):
    """Partition edge slots and vertex slots of ``table``.

    Returns ``(edge_of, vertex_of)``: ``edge_of[t][k]`` is the edge class of
    local edge ``k`` of tetrahedron ``t`` and ``vertex_of[t][v]`` the vertex
    class (cusp) of vertex ``v``.  Classes are numbered in order of first
    appearance scanning tetrahedra, then local labels.
    """
    n = table.tet_count
    edges = _UnionFind(6 * n)
    verts = _UnionFind(4 * n)
    for t in range(n):
        for f in range(4):
            u, g, p = table.glue(t, f)
            for v in range(4):
                if v != f:
                    verts.union(4 * t + v, 4 * u + p[v])
            for k, (i, j) in enumerate(LOCAL_EDGES):
                if f not in (i, j):
                    edges.union(6 * t + k, 6 * u + EDGE_INDEX[p[i], p[j]])
    edge_flat, _ = _number_classes(edges, 6 * n)
    vert_flat, _ = _number_classes(verts, 4 * n)
    edge_of = tuple(tuple(edge_flat[6 * t:6 * t + 6]) for t in range(n))
    vertex_of = tuple(tuple(vert_flat[4 * t:4 * t + 4]) for t in range(n))
    return edge_of, vertex_of


@dataclass(frozen=True)
class TautReport:
    edge_count: int
    pi_slots: tuple      # number of pi angles around each edge class


def validate_taut(table, angles, edge_of=None):
    """Check that every edge class carries exactly two pi angles."""
    if edge_of is None:
        edge_of, _ = build_edge_classes(table)
    count = 1 + max(max(row) for row in edge_of)
    pi = [0] * count
    for t, d in enumerate(angles):
        if d not in (0, 1, 2):
            raise NotTaut(None, None)
        for pair in PI_PAIRS[d]:
            pi[edge_of[t][EDGE_INDEX[pair]]] += 1
    for e, k in enumerate(pi):
        if k != 2:
            raise NotTaut(e, k)
    return TautReport(count, tuple(pi))


def derive_coorientation(table, angles, flip=False):
    """Choose the top diagonal of every tetrahedron.

    Across each face exactly one side may use it as a top face.  The
    choice is determined up to a global reversal; the canonical solution
    makes face 0 of tetrahedron 0 a top face of tetrahedron 0, i.e. it is
    cooriented out of tetrahedron 0.  ``flip`` returns the reversal.

    Returns a tuple of ``((a, b), (c, d))`` per tetrahedron, top first.
    """
    n = table.tet_count
    # state[t] = 0 selects PI_PAIRS[d][0] as the top diagonal
    def is_top(t, f, s):
        top = PI_PAIRS[angles[t]][s]
        return f not in top

    state = [None] * n
    state[0] = 0 if is_top(0, 0, 0) else 1
    stack = [0]
    while stack:
        t = stack.pop()
        for f in range(4):
            u, g, _ = table.glue(t, f)
            want_top = not is_top(t, f, state[t])
            s = 0 if is_top(u, g, 0) == want_top else 1
            if state[u] is None:
                state[u] = s
                stack.append(u)
            elif state[u] != s:
                raise NotTransverseTaut(
                    f"no coorientation: conflict across face {f} of tetrahedron {t}")
    if flip:
        state = [1 - s for s in state]
    return tuple((PI_PAIRS[angles[t]][state[t]], PI_PAIRS[angles[t]][1 - state[t]])
                 for t in range(n))


def orientation_signs(table):
    """Signs ``s_t`` making every gluing orientation-reversing, or None."""
    n = table.tet_count
    sign = [0] * n
    sign[0] = 1
    stack = [0]
    while stack:
        t = stack.pop()
        for f in range(4):
            u, _, p = table.glue(t, f)
            s = -perm_sign(p) * sign[t]
            if sign[u] == 0:
                sign[u] = s
                stack.append(u)
            elif sign[u] != s:
                return None
    return tuple(sign)


def _chirality_red(a, b, c, d, sign):
    """The two red equatorial local edges given the top/bottom diagonals."""
    chi = sign * perm_sign((a, b, c, d))
    if chi > 0:
        return {EDGE_INDEX[a, c], EDGE_INDEX[b, d]}
    return {EDGE_INDEX[a, d], EDGE_INDEX[b, c]}


def derive_colors(table, edge_of, diagonals, swap=False):
    """Red/blue coloring of the edge classes.

    Viewed from above, the equator of each tetrahedron must alternate red,
    blue, red, blue starting from an endpoint of the top diagonal.  The
    chirality comes from a global orientation, so non-orientable inputs
    are rejected.  The coloring is unique up to swapping the two colors;
    the canonical one makes the first equatorial edge of tetrahedron 0
    red.
    """
    signs = orientation_signs(table)
    if signs is None:
        raise NotVeering("triangulation is not orientable")
    count = 1 + max(max(row) for row in edge_of)
    color = [None] * count
    for t, ((a, b), (c, d)) in enumerate(diagonals):
        red = _chirality_red(a, b, c, d, signs[t])
        for k in range(6):
            if k in (EDGE_INDEX[a, b], EDGE_INDEX[c, d]):
                continue
            col = RED if k in red else BLUE
            e = edge_of[t][k]
            if color[e] is None:
                color[e] = col
            elif color[e] != col:
                raise NotVeering(f"edge {e} needs both colors")
    if any(c is None for c in color):
        raise NotVeering("an edge is never equatorial")
    (a, b), (c, d) = diagonals[0]
    first = min(k for k in range(6) if k not in (EDGE_INDEX[a, b], EDGE_INDEX[c, d]))
    if color[edge_of[0][first]] != RED:
        color = [1 - c for c in color]
    if swap:
        color = [1 - c for c in color]
    return tuple(color)


def tet_type(top_color, bottom_color):
    if top_color != bottom_color:
        return TOGGLE
    return RED_FAN if top_color == RED else BLUE_FAN


@dataclass(frozen=True)
class EdgeStack:
    edge: int
    above: int
    below: int
    sides: tuple         # two tuples of tetrahedra, each ordered top to bottom
    entry_faces: tuple   # top face of ``below`` reached by each side walk
    side_faces: tuple    # per side, (entry, exit) faces in each stack tetrahedron


class VeeringTriangulation:
    """A validated veering triangulation.

    Build one with :meth:`from_signature` or :meth:`from_table`.  The
    attributes are plain tuples and are not meant to be mutated.
    """

    def __init__(self, table, angles, flip=False, swap_colors=False, signature=None):
        self.table = table
        self.angles = tuple(angles)
        self.signature = signature
        self.flipped = flip
        n = self.tet_count = table.tet_count
        self.edge_of, self.vertex_of = build_edge_classes(table)
        taut = validate_taut(table, self.angles, self.edge_of)
        self.edge_count = taut.edge_count
        self.cusp_count = 1 + max(max(row) for row in self.vertex_of)
        self.diagonals = derive_coorientation(table, self.angles, flip)
        self.edge_color = derive_colors(table, self.edge_of, self.diagonals, swap_colors)
        self.top_edge = tuple(self.edge_of[t][EDGE_INDEX[self.diagonals[t][0]]]
                              for t in range(n))
        self.bottom_edge = tuple(self.edge_of[t][EDGE_INDEX[self.diagonals[t][1]]]
                                 for t in range(n))
        self.tet_type = tuple(tet_type(self.edge_color[self.top_edge[t]],
                                       self.edge_color[self.bottom_edge[t]])
                              for t in range(n))
        self.above = [None] * self.edge_count   # tetrahedron with e at the bottom
        self.below = [None] * self.edge_count   # tetrahedron with e on top
        for t in range(n):
            if self.above[self.bottom_edge[t]] is not None or \
                    self.below[self.top_edge[t]] is not None:
                raise NotTaut(self.bottom_edge[t], None)
            self.above[self.bottom_edge[t]] = t
            self.below[self.top_edge[t]] = t
        self.above = tuple(self.above)
        self.below = tuple(self.below)
        self.stacks = build_edge_stacks(self)

    @classmethod
    def from_signature(cls, signature, flip=False, swap_colors=False):
        sig, table = decode(signature)
        return cls(table, sig.angle_part, flip, swap_colors, signature=signature)

    @classmethod
    def from_table(cls, table, angles, **kw):
        return cls(table, angles, **kw)

    # -- local helpers -----------------------------------------------------

    def is_top_face(self, t, f):
        """True if face ``f`` of ``t`` is cooriented out of ``t``."""
        return f in self.diagonals[t][1]

    def equatorial(self, t):
        """Local edge indices of the four equatorial edges of ``t``."""
        (a, b), (c, d) = self.diagonals[t]
        return [EDGE_INDEX[a, c], EDGE_INDEX[a, d], EDGE_INDEX[b, c], EDGE_INDEX[b, d]]

    def side_edges(self, t, same_as_top):
        """Δ-edges of ``t``'s equatorial edges of the top color (or not)."""
        top = self.edge_color[self.top_edge[t]]
        out = []
        for k in self.equatorial(t):
            e = self.edge_of[t][k]
            if (self.edge_color[e] == top) == same_as_top:
                out.append(e)
        return out

    def side_through(self, t, top_face):
        """Side of ``t``'s bottom edge continuing the side of its top edge
        that meets ``t`` in ``top_face``.

        The quadrilateral of ``t`` runs from the top face containing ``x``
        (a bottom-diagonal vertex) to the bottom face containing ``y`` (a
        top-diagonal vertex) along the side edge ``xy`` of the top color.
        """
        (a, b), (c, d) = self.diagonals[t]
        x = d if top_face == c else c
        top = self.edge_color[self.top_edge[t]]
        for y, k in ((a, 1), (b, 0)):
            if self.edge_color[self.edge_of[t][EDGE_INDEX[x, y]]] == top:
                # the bottom face containing y is opposite the other vertex
                return k
        raise NotVeering(f"tetrahedron {t} has no side edge of its top color")

    def facing_side(self, t, face_pair):
        """Side of ``bottom(t)`` on the side of a side edge of ``t``.

        ``face_pair`` are the two faces of ``t`` containing that side edge;
        one of them is a bottom face, opposite a top-diagonal vertex.
        """
        top = self.diagonals[t][0]
        for f in face_pair:
            if f in top:
                return top.index(f)
        raise NotVeering(f"faces {face_pair} of tetrahedron {t} are both top faces")

    def tet_type_counts(self):
        counts = {TOGGLE: 0, RED_FAN: 0, BLUE_FAN: 0}
        for ty in self.tet_type:
            counts[ty] += 1
        return counts

    def to_json(self):
        return {
            "signature": self.signature,
            "tet_count": self.tet_count,
            "cusp_count": self.cusp_count,
            "flipped": self.flipped,
            "edge_classes": [
                [[t, "%d%d" % LOCAL_EDGES[k]] for t in range(self.tet_count)
                 for k in range(6) if self.edge_of[t][k] == e]
                for e in range(self.edge_count)],
            "edge_colors": [COLOR_NAMES[c] for c in self.edge_color],
            "tetrahedra": [
                {"top": "%d%d" % self.diagonals[t][0],
                 "bottom": "%d%d" % self.diagonals[t][1],
                 "top_edge": self.top_edge[t],
                 "bottom_edge": self.bottom_edge[t],
                 "type": self.tet_type[t]}
                for t in range(self.tet_count)],
        }


def _walk_side(vt, edge, t, face, pair):
    """Tetrahedra met crossing ``face`` of ``t`` while circling ``pair``.

    Returns the stack, the (entry, exit) faces used in each stack
    tetrahedron, the tetrahedron below and the face it is entered by.
    """
    table = vt.table
    seen, faces = [], []
    guard = 6 * vt.tet_count
    while guard:
        guard -= 1
        u, g, p = table.glue(t, face)
        i, j = p[pair[0]], p[pair[1]]
        k = EDGE_INDEX[i, j]
        if vt.edge_of[u][k] != edge:
            raise StackPatternViolation("edge walk left its edge class")
        if (i, j) in vt.diagonals[u] or (j, i) in vt.diagonals[u]:
            return seen, faces, u, g
        seen.append(u)
        rest = [v for v in range(4) if v not in (i, j)]
        face = rest[0] if rest[1] == g else rest[1]
        faces.append((g, face))
        t, pair = u, (i, j)
    raise StackPatternViolation(f"walk around edge {edge} does not close")


def build_edge_stacks(vt):
    """Side stacks of every edge, checked against the toggle/fan pattern.

    Side ``k`` of an edge leaves the tetrahedron above it through the
    bottom face opposite vertex ``k`` of that tetrahedron's top diagonal.

    For a red edge a single-tetrahedron stack must be a red fan and a
    longer stack reads toggle, blue fans, toggle from top to bottom
    (colors swapped for blue edges).
    """
    stacks = []
    for e in range(vt.edge_count):
        top_t, bot_t = vt.above[e], vt.below[e]
        c, d = vt.diagonals[top_t][1]
        a, b = vt.diagonals[top_t][0]
        sides, entries, faces = [], [], []
        for face in (a, b):
            seen, used, end, entry = _walk_side(vt, e, top_t, face, (c, d))
            if end != bot_t:
                raise StackPatternViolation(
                    f"edge {e}: side walk ends in tetrahedron {end}, expected {bot_t}",
                    {"signature": vt.signature, "edge": e})
            sides.append(tuple(seen))
            entries.append(entry)
            faces.append(tuple(used))
        stack = EdgeStack(e, top_t, bot_t, tuple(sides), tuple(entries), tuple(faces))
        _check_stack(vt, stack)
        stacks.append(stack)
    return tuple(stacks)


def _check_stack(vt, stack):
    col = vt.edge_color[stack.edge]
    own_fan = RED_FAN if col == RED else BLUE_FAN
    other_fan = BLUE_FAN if col == RED else RED_FAN
    bundle = {"signature": vt.signature, "edge": stack.edge, "sides": stack.sides}
    for side in stack.sides:
        types = [vt.tet_type[t] for t in side]
        if not side:
            raise StackPatternViolation(f"edge {stack.edge} has an empty stack", bundle)
        if len(side) == 1:
            ok = types == [own_fan]
        else:
            ok = (types[0] == TOGGLE and types[-1] == TOGGLE
                  and all(ty == other_fan for ty in types[1:-1]))
        # the edge is a side edge of the top color only in the first tetrahedron
        tops = [vt.edge_color[vt.top_edge[t]] for t in side]
        ok = ok and tops[0] == col and all(c != col for c in tops[1:])
        if not ok:
            raise StackPatternViolation(
                f"edge {stack.edge}: stack {list(side)} has types {types}", bundle)
