"""Flow graph, strongly connected components and the reduced flow graph."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ReductionNotStronglyConnected

ROLES = ("top", "side_a", "side_b")


@dataclass(frozen=True)
class FlowGraph:
    """A directed multigraph.

    ``vertices`` are vertex ids (Δ-edge ids for flow graphs) in increasing
    order; ``edges`` are ``(source, target, label)`` triples, parallel
    edges kept distinct.  For flow graphs ``label`` is ``(tet, role)``.
    """

    vertices: tuple
    edges: tuple
    removed: frozenset = field(default=frozenset())

    @property
    def n(self):
        return len(self.vertices)

    def successors(self):
        out = {v: [] for v in self.vertices}
        for s, t, _ in self.edges:
            out[s].append(t)
        return out

    def indegree(self):
        deg = {v: 0 for v in self.vertices}
        for _, t, _ in self.edges:
            deg[t] += 1
        return deg

    def outdegree(self):
        deg = {v: 0 for v in self.vertices}
        for s, _, _ in self.edges:
            deg[s] += 1
        return deg


def build_flow_graph(vt):
    """Three edges per tetrahedron into its bottom edge: one from the top
    edge and one from each side edge of the opposite color to the top."""
    edges = []
    for t in range(vt.tet_count):
        bottom = vt.bottom_edge[t]
        edges.append((vt.top_edge[t], bottom, (t, "top")))
        sides = vt.side_edges(t, same_as_top=False)
        for role, e in zip(ROLES[1:], sides):
            edges.append((e, bottom, (t, role)))
    return FlowGraph(tuple(range(vt.edge_count)), tuple(edges))


@dataclass(frozen=True)
class Condensation:
    scc_of: dict                 # vertex -> component id
    components: tuple            # component id -> sorted tuple of vertices
    dag: frozenset               # (component, component) pairs, distinct ends
    infinitesimal: tuple         # component ids with an incoming dag edge

    @property
    def count(self):
        return len(self.components)

    @property
    def strongly_connected(self):
        return len(self.components) == 1

    def sources(self):
        targets = {b for _, b in self.dag}
        return [c for c in range(self.count) if c not in targets]

    def sinks(self):
        heads = {a for a, _ in self.dag}
        return [c for c in range(self.count) if c not in heads]

    def is_rooted_height_one_tree(self):
        """A unique root with an edge to every other component, and every
        other component a sink."""
        if self.count == 1:
            return True
        roots = self.sources()
        if len(roots) != 1:
            return False
        root = roots[0]
        return all((root, c) in self.dag for c in range(self.count) if c != root) \
            and all(a == root for a, _ in self.dag)


def tarjan(vertices, succ):
    """Strongly connected components (iterative Tarjan)."""
    index, low, on_stack = {}, {}, set()
    stack, comps = [], []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(comp)
    return comps


def scc(fg):
    """Condensation of ``fg``; components numbered by smallest vertex."""
    succ = fg.successors()
    comps = sorted(tuple(sorted(c)) for c in tarjan(fg.vertices, succ))
    scc_of = {v: i for i, c in enumerate(comps) for v in c}
    dag = frozenset((scc_of[s], scc_of[t]) for s, t, _ in fg.edges
                    if scc_of[s] != scc_of[t])
    infinitesimal = tuple(sorted({b for _, b in dag}))
    return Condensation(scc_of, tuple(comps), dag, infinitesimal)


def _closure(start, succ):
    seen = set(start)
    todo = list(start)
    while todo:
        v = todo.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return frozenset(seen)


def minimal_sets(fg, cond=None):
    """Minimal sets generated by single components, smallest first.

    A minimal set is closed under forward reachability; the one generated
    by a component is its forward closure.  The graph is strongly
    connected iff the only one is the whole vertex set.
    """
    cond = cond or scc(fg)
    succ = fg.successors()
    sets = {_closure(c, succ) for c in cond.components}
    return sorted(sets, key=lambda s: (len(s), sorted(s)))


def infinitesimal_cycle(fg, cond, comp):
    """Vertices of an infinitesimal component in cycle order, or None.

    The component must be a simple directed cycle whose vertices have a
    single outgoing edge in ``fg``.
    """
    members = set(cond.components[comp])
    out = {}
    for s, t, _ in fg.edges:
        if s in members:
            if s in out:
                return None
            out[s] = t
    if set(out) != members or not set(out.values()) <= members:
        return None
    start = min(members)
    order = [start]
    v = out[start]
    while v != start:
        order.append(v)
        v = out[v]
        if len(order) > len(members):
            return None
    return tuple(order) if len(order) == len(members) else None


def reduce(fg, walls):
    """Remove the infinitesimal cycles of ``walls`` and edges entering them."""
    drop = set()
    for wall in walls:
        for cyc in wall.infinitesimal_cycles:
            drop.update(cyc)
    vertices = tuple(v for v in fg.vertices if v not in drop)
    edges = tuple(e for e in fg.edges if e[0] not in drop and e[1] not in drop)
    red = FlowGraph(vertices, edges, frozenset(drop))
    if any(e[0] in drop and e[1] not in drop for e in fg.edges):
        raise ReductionNotStronglyConnected(
            "an infinitesimal cycle vertex has an edge leaving its cycle",
            {"removed": sorted(drop)})
    cond = scc(red)
    if not cond.strongly_connected:
        raise ReductionNotStronglyConnected(
            f"reduced flow graph has {cond.count} components",
            {"removed": sorted(drop), "components": [list(c) for c in cond.components]})
    return red


def to_dot(fg, name="flow", highlight=()):
    """Graphviz text; vertices in ``highlight`` cycles drawn dashed/red."""
    marked = {v for cyc in highlight for v in cyc}
    lines = [f"digraph {name} {{"]
    for v in fg.vertices:
        style = ' [color=red, style=dashed]' if v in marked else ""
        lines.append(f"  e{v}{style};")
    for s, t, label in fg.edges:
        attrs = f'label="{label[0]}:{label[1]}"' if isinstance(label, tuple) else ""
        if s in marked and t in marked:
            attrs += (", " if attrs else "") + "color=red"
        lines.append(f"  e{s} -> e{t} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def condensation_summary(cond):
    return {
        "component_count": cond.count,
        "strongly_connected": cond.strongly_connected,
        "infinitesimal_count": len(cond.infinitesimal),
        "rooted_height_one_tree": cond.is_rooted_height_one_tree(),
        "components": [list(c) for c in cond.components],
        "infinitesimal": list(cond.infinitesimal),
    }
