"""Walls, their cycles, and per-instance verification of the wall theorem.

A wall is a grid ``t[i][j]`` of tetrahedra, ``1 <= i <= w + 1`` and
``j`` modulo ``h``, whose inner columns ``2..w`` are stacked by
``bottom(t[i][j]) == top(t[i][j+1])`` and whose inner bottom edges meet
exactly four tetrahedra: the two column neighbours and one tetrahedron on
each side.  Rows are 0-based in code, so ``grid[0]`` is column ``i = 1``.

Detection starts from each infinitesimal component of the flow graph and
grows sideways.  The side of an edge is tracked geometrically (through
the quadrilateral carried by each tetrahedron), which is what makes the
twist of a wall well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (AccountingMismatch, MalformedInfinitesimalComponent,
                     ReductionNotStronglyConnected, TheoremViolation,
                     UncoveredInfinitesimalComponent)
from .flowgraph import build_flow_graph, infinitesimal_cycle, reduce, scc


@dataclass(frozen=True)
class Wall:
    grid: tuple                  # grid[i][j], i = 0..w, j = 0..h-1
    width: int
    period: int
    twisted: bool
    infinitesimal_cycles: tuple  # distinct inner cycles, each from its smallest vertex
    boundary_cycles: tuple       # bottom edges of the outer columns, j = 0..h-1
    maximal: bool = True
    twist_shift: int = None      # h' with grid[i][j] == grid[w-i][j+h']
    mobius: bool = False         # the quadrilateral surface is a Mobius band

    @property
    def removed_count(self):
        return sum(len(c) for c in self.infinitesimal_cycles)

    @property
    def inner_positions(self):
        """Inner grid positions up to the twist identification.

        A twisted wall identifies ``(i, j)`` with ``(w + 2 - i, j + h')``;
        this counts the orbits of that involution on the inner columns.
        """
        total = (self.width - 1) * self.period
        if not self.twisted:
            return total
        fixed = self.period if self.width % 2 == 0 and self.twist_shift == 0 else 0
        return (total + fixed) // 2

    @property
    def effective_period(self):
        """The ``h`` making ``(w - 1) h`` the discarded vertex count.

        Equal to ``h`` for untwisted walls and to ``h / 2`` for twisted
        walls whose identification has no fixed column.
        """
        return Fraction(self.inner_positions, self.width - 1)

    def to_json(self):
        return {"width": self.width, "period": self.period, "twisted": self.twisted,
                "twist_shift": self.twist_shift, "mobius": self.mobius,
                "grid": [list(col) for col in self.grid],
                "infinitesimal_cycles": [list(c) for c in self.infinitesimal_cycles],
                "boundary_cycles": [list(c) for c in self.boundary_cycles]}


def next_tet(vt, t):
    """The tetrahedron whose top edge is the bottom edge of ``t``."""
    return vt.below[vt.bottom_edge[t]]


def is_thin(vt, e):
    """True if both side stacks of ``e`` hold a single tetrahedron."""
    return all(len(side) == 1 for side in vt.stacks[e].sides)


def canonical_cycle(seq):
    """Rotate a cyclic sequence to start at its smallest element."""
    k = seq.index(min(seq))
    return tuple(seq[k:]) + tuple(seq[:k])


def _cycle_sides(vt, column):
    """Side labels along a column of tetrahedra.

    ``column[j]`` are consecutive tetrahedra with thin bottom edges.
    Returns ``(tets, sides)`` of the shortest unrolling on which the side
    labels close up: ``sides[j]`` is the side of ``bottom(tets[j])``
    continuing side 0 of ``bottom(tets[0])``.
    """
    L = len(column)
    tets, sides = [], []
    s = 0
    for j in range(2 * L):
        t = column[j % L]
        if j == L and s == 0:
            break
        tets.append(t)
        sides.append(s)
        e = vt.bottom_edge[t]
        nxt = column[(j + 1) % L]
        s = vt.side_through(nxt, vt.stacks[e].entry_faces[s])
    return tets, sides


def _face_key(vt, t, f):
    """A face class as the smaller of its two (tetrahedron, face) slots."""
    u, g, _ = vt.table.glue(t, f)
    return min((t, f), (u, g))


def _grow(vt, tets, sides, direction, limit):
    """Columns on one side of a seed column.

    Returns ``(cols, gaps)``: the columns beyond the seed, the last one
    being the outer column, and for each step the faces crossed from the
    previous column.  Each column is a list aligned with ``tets``:
    ``col[j]`` is the side tetrahedron of ``bottom(prev[j])``.
    """
    P = len(tets)
    cols, gaps = [], []
    cur = list(tets)
    cur_sides = [s if direction == 0 else 1 - s for s in sides]
    while True:
        nxt, far, gap = [], [], []
        for j in range(P):
            stack = vt.stacks[vt.bottom_edge[cur[j]]]
            t = stack.sides[cur_sides[j]][0]
            nxt.append(t)
            far.append(1 - vt.facing_side(t, stack.side_faces[cur_sides[j]][0]))
            entry, exit_ = stack.side_faces[cur_sides[j]][0]
            gap += [_face_key(vt, t, entry), _face_key(vt, t, exit_)]
        cols.append(nxt)
        gaps.append(frozenset(gap))
        if len(cols) > limit:
            raise MalformedInfinitesimalComponent(
                "wall growth does not terminate",
                {"signature": vt.signature, "seed": tets})
        inner = all(next_tet(vt, nxt[j]) == nxt[(j + 1) % P]
                    and is_thin(vt, vt.bottom_edge[nxt[j]])
                    and vt.stacks[vt.bottom_edge[nxt[j]]].sides[1 - far[j]] == (cur[(j + 1) % P],)
                    for j in range(P))
        if not inner:
            return cols, gaps
        cur, cur_sides = nxt, far


def _minimal_period(columns):
    P = len(columns[0])
    for h in range(1, P + 1):
        if P % h == 0 and all(col[j] == col[(j + h) % P] for col in columns for j in range(P)):
            return h
    return P


def _align(cols_right, seed, cols_left):
    """Assemble grid columns with the staggered index convention.

    With the seed at grid index ``i0`` the side tetrahedra of the bottom
    edge of ``t[i][j]`` sit at ``t[i +- 1][j + delta_i]`` where ``delta_i``
    is 0 for odd (1-based) ``i`` and 1 for even ``i``.  Grown columns are
    stored as ``col[j] = side tet of bottom(prev[j])``, so they are
    shifted into place here.
    """
    P = len(seed)
    i0 = len(cols_left)                  # 0-based index of the seed
    width = len(cols_left) + len(cols_right)
    grid = [None] * (width + 1)
    grid[i0] = list(seed)

    def delta(i):                        # i is 0-based
        return 0 if (i + 1) % 2 == 1 else 1

    for direction, cols in ((+1, cols_right), (-1, cols_left)):
        shift = 0
        i = i0
        for col in cols:
            shift += delta(i)
            i += direction
            grid[i] = [col[(j - shift) % P] for j in range(P)]
    return grid


def _verify_grid(vt, grid):
    """Check the definition of a wall directly on ``grid``."""
    w = len(grid) - 1
    h = len(grid[0])
    for i in range(1, w):
        delta = 0 if (i + 1) % 2 == 1 else 1
        for j in range(h):
            t = grid[i][j]
            if vt.bottom_edge[t] != vt.top_edge[grid[i][(j + 1) % h]]:
                return False
            e = vt.bottom_edge[t]
            if not is_thin(vt, e):
                return False
            nb = sorted(s[0] for s in vt.stacks[e].sides)
            if nb != sorted((grid[i - 1][(j + delta) % h], grid[i + 1][(j + delta) % h])):
                return False
    return True


def _make_wall(vt, grid, gaps):
    """``gaps[k]`` is the set of faces crossed between columns ``k`` and
    ``k + 1`` over the unrolled grid."""
    w = len(grid) - 1
    h = _minimal_period(grid)
    grid = tuple(tuple(col[:h]) for col in grid)
    twist = None
    for hp in range(h):
        if all(grid[i][j] == grid[w - i][(j + hp) % h] for i in range(w + 1) for j in range(h)):
            twist = hp
            break
    cycles = []
    for i in range(1, w):
        c = canonical_cycle([vt.bottom_edge[t] for t in grid[i]])
        c = canonical_cycle(list(dict.fromkeys(c)))
        if c not in cycles:
            cycles.append(c)
    boundary = tuple(tuple(vt.bottom_edge[t] for t in grid[i]) for i in (0, w))
    mobius = twist is not None and all(gaps[k] == gaps[w - 1 - k] for k in range(w))
    return Wall(grid, w, h, twist is not None, tuple(sorted(cycles)), boundary,
                True, twist, mobius)


def detect_walls(vt, fg=None, cond=None):
    """All maximal walls, one per group of infinitesimal components."""
    fg = fg or build_flow_graph(vt)
    cond = cond or scc(fg)
    walls, covered = [], {}
    for comp in cond.infinitesimal:
        cyc = infinitesimal_cycle(fg, cond, comp)
        bundle = {"signature": vt.signature, "component": list(cond.components[comp])}
        if cyc is None:
            raise MalformedInfinitesimalComponent(
                f"infinitesimal component {comp} is not a simple outdegree-1 cycle", bundle)
        if comp in covered:
            continue
        column = [vt.above[e] for e in cyc]
        if not all(is_thin(vt, e) for e in cyc):
            raise UncoveredInfinitesimalComponent(
                f"infinitesimal component {comp} has an edge meeting more than four "
                "tetrahedra", bundle)
        tets, sides = _cycle_sides(vt, column)
        limit = 2 * vt.tet_count + 2
        right, gaps_r = _grow(vt, tets, sides, 0, limit)
        left, gaps_l = _grow(vt, tets, sides, 1, limit)
        grid = _align(right, tets, left)
        gaps = list(reversed(gaps_l)) + gaps_r
        if not _verify_grid(vt, grid):
            raise UncoveredInfinitesimalComponent(
                f"grid grown from component {comp} is not a wall",
                dict(bundle, grid=grid))
        wall = _make_wall(vt, grid, gaps)
        for c in wall.infinitesimal_cycles:
            k = cond.scc_of[c[0]]
            if set(cond.components[k]) != set(c) or k not in cond.infinitesimal:
                raise UncoveredInfinitesimalComponent(
                    f"wall cycle {list(c)} is not an infinitesimal component",
                    dict(bundle, grid=[list(g) for g in wall.grid]))
            covered[k] = len(walls)
        walls.append(wall)
    return walls


def wall_cycles(vt, wall):
    """``(infinitesimal, boundary)`` cycles: ``c_i`` as bottom-edge
    sequences over one period, for ``i = 2..w`` and ``i = 1, w + 1``."""
    seqs = [tuple(vt.bottom_edge[t] for t in col) for col in wall.grid]
    return seqs[1:-1], (seqs[0], seqs[-1])


@dataclass
class VerificationReport:
    signature: str
    strongly_connected: bool
    infinitesimal_count: int
    wall_cycle_count: int
    bijection: bool
    rooted_tree: bool
    reduced_strongly_connected: bool
    walls: list = field(default_factory=list)

    @property
    def passed(self):
        return self.bijection and self.rooted_tree and self.reduced_strongly_connected


def verify_theorem(vt, fg=None, cond=None, walls=None):
    """Check the wall classification on one triangulation.

    Raises a :class:`TheoremViolation` subclass with a counterexample
    bundle on failure; returns the report otherwise.
    """
    fg = fg or build_flow_graph(vt)
    cond = cond or scc(fg)
    walls = detect_walls(vt, fg, cond) if walls is None else walls
    inf = {frozenset(cond.components[c]) for c in cond.infinitesimal}
    wall_cycles_ = [frozenset(c) for wall in walls for c in wall.infinitesimal_cycles]
    bundle = {"signature": vt.signature,
              "components": [list(c) for c in cond.components],
              "infinitesimal": [list(cond.components[c]) for c in cond.infinitesimal],
              "walls": [w.to_json() for w in walls]}
    bijection = len(wall_cycles_) == len(set(wall_cycles_)) and set(wall_cycles_) == inf
    if not bijection:
        raise UncoveredInfinitesimalComponent(
            "infinitesimal components and wall cycles do not match", bundle)
    if not cond.is_rooted_height_one_tree():
        raise TheoremViolation("condensation is not a rooted height-1 tree", bundle)
    try:
        reduce(fg, walls)
    except ReductionNotStronglyConnected as exc:
        exc.bundle.update(bundle)
        raise
    return VerificationReport(vt.signature, cond.strongly_connected, len(inf),
                              len(wall_cycles_), True, True, True, walls)


@dataclass(frozen=True)
class Accounting:
    N: int
    N_prime: int
    W: int
    removed: int
    formula: int         # sum over walls of (w - 1) * h_eff

    def to_json(self):
        return {"N": self.N, "N_prime": self.N_prime, "W": self.W,
                "removed": self.removed, "formula": self.formula}


def accounting(vt, walls, reduced):
    """Vertex counts before and after reduction.

    Checks ``N <= N' W`` and that the discarded count equals the sum of
    ``(w - 1) h`` over walls, with ``h`` the effective period (halved for
    twisted walls, whose inner cycles are shared pairwise).
    """
    N = vt.edge_count
    Np = len(reduced.vertices)
    W = max((w.width for w in walls), default=1)
    formula = int(sum((w.width - 1) * w.effective_period for w in walls))
    removed = sum(w.removed_count for w in walls)
    acc = Accounting(N, Np, W, removed, formula)
    if N - Np != removed or removed != formula or N > Np * W:
        raise AccountingMismatch("wall accounting fails",
                                 {"signature": vt.signature, **acc.to_json(),
                                  "walls": [w.to_json() for w in walls]})
    return acc


def complementary_regions(vt, variant="flow", fg=None, walls=None, bs=None):
    """Regions of the branched surface cut along the flow graph
    (``variant="flow"``) or the reduced flow graph (``"flow-red"``)."""
    from .regions import complementary_regions as _regions
    fg = fg or build_flow_graph(vt)
    walls = detect_walls(vt, fg) if walls is None else walls
    if variant == "flow":
        return _regions(vt, fg, frozenset(), bs)
    if variant == "flow-red":
        removed = frozenset(v for w in walls for c in w.infinitesimal_cycles for v in c)
        return _regions(vt, fg, removed, bs, walls)
    raise ValueError(f"unknown graph variant {variant!r}")


def render_ascii(vt, wall):
    """Text picture of the grid: one row per ``j``, one cell per column."""
    lines = [f"wall w={wall.width} h={wall.period}"
             + (" twisted" if wall.twisted else "")]
    cw = max(len(str(t)) for col in wall.grid for t in col) + 1
    for j in range(wall.period):
        cells = []
        for i, col in enumerate(wall.grid):
            mark = "|" if 0 < i < wall.width else ":"
            cells.append(f"{mark}{col[j]:>{cw}}")
        lines.append(" ".join(cells) + " :")
    return "\n".join(lines) + "\n"
