"""Graph ingestion, subdivision and vertex ordering.

A graph comes with a distinguished spanning tree, a root of degree 1 in the
tree, and a rotation system (clockwise neighbor order from a planar embedding
of the tree).  The depth-first order derived from these three choices fixes
everything downstream: edge orientations, the particle-sliding direction and
the cube-complex classification.

Multigraphs (parallel edges, loops) are accepted on input but must be
subdivided into a simple graph before ordering; rotations can only be given
for simple graphs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import GraphFormatError

Edge = tuple[int, int]


def _norm_edge(u, v) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass
class Graph:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]               # sorted, multiplicity preserved
    tree_edges: frozenset[Edge]
    root: int
    rotation: dict[int, tuple[int, ...]] | None = None

    def degree(self, v: int) -> int:
        d = 0
        for a, b in self.edges:
            if a == v:
                d += 1
            if b == v:
                d += 1
        return d

    def is_simple(self) -> bool:
        return len(set(self.edges)) == len(self.edges) and all(a != b for a, b in self.edges)

    def neighbors(self, v: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def tree_degree(self, v: int) -> int:
        return sum(1 for e in self.tree_edges if v in e)

    def tree_neighbors(self, v: int) -> list[int]:
        return sorted(a if b == v else b for a, b in self.tree_edges if v in (a, b))

    def essential_vertices(self) -> list[int]:
        return [v for v in self.vertices if self.degree(v) != 2]

    def to_json_dict(self) -> dict:
        d = {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "tree_edges": sorted(list(e) for e in self.tree_edges),
            "root": self.root,
        }
        if self.rotation is not None:
            d["rotation"] = {str(v): list(nbrs) for v, nbrs in sorted(self.rotation.items())}
        return d


def parse_graph(data: dict) -> Graph:
    """Validate a graph-file dict and build a Graph.

    Required keys: vertices, edges, tree_edges.  Optional: root (defaults to
    the lowest-id vertex of tree-degree 1), rotation (simple graphs only).
    """
    try:
        vertices = tuple(sorted(int(v) for v in data["vertices"]))
        raw_edges = [tuple(int(x) for x in e) for e in data["edges"]]
        raw_tree = [tuple(int(x) for x in e) for e in data["tree_edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph file: {exc}") from exc
    if len(set(vertices)) != len(vertices):
        raise GraphFormatError("duplicate vertex ids")
    vset = set(vertices)
    for e in raw_edges:
        if len(e) != 2 or e[0] not in vset or e[1] not in vset:
            raise GraphFormatError(f"edge {e} has unknown endpoints")
    edges = tuple(sorted(_norm_edge(*e) for e in raw_edges))
    tree = frozenset(_norm_edge(*e) for e in raw_tree)
    edge_multiset = list(edges)
    for e in tree:
        if e not in edge_multiset:
            raise GraphFormatError(f"tree edge {e} is not a graph edge")
        if e[0] == e[1]:
            raise GraphFormatError(f"loop {e} cannot be a tree edge")
    if len(tree) != len(set(tree)):
        raise GraphFormatError("duplicate tree edges")

    # connectivity of the whole graph
    if vertices:
        seen = {vertices[0]}
        stack = [vertices[0]]
        adj: dict[int, set[int]] = {v: set() for v in vertices}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != vset:
            raise GraphFormatError("multiple components")

    # tree must span and be acyclic
    if len(tree) != len(vertices) - 1:
        raise GraphFormatError("non-spanning tree set (wrong edge count)")
    tadj: dict[int, set[int]] = {v: set() for v in vertices}
    for a, b in tree:
        tadj[a].add(b)
        tadj[b].add(a)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        u = stack.pop()
        for w in tadj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if seen != vset:
        raise GraphFormatError("non-spanning tree set")

    root = data.get("root")
    if root is None:
        leaves = [v for v in vertices if sum(1 for e in tree if v in e) == 1]
        if not leaves:
            raise GraphFormatError("no tree vertex of degree 1 to use as root")
        root = leaves[0]
    else:
        root = int(root)
        if root not in vset:
            raise GraphFormatError(f"root {root} is not a vertex")
        if sum(1 for e in tree if root in e) != 1:
            raise GraphFormatError(f"root {root} does not have degree 1 in the tree")

    rotation = None
    if "rotation" in data and data["rotation"] is not None:
        g_tmp = Graph(vertices, edges, tree, root, None)
        if not g_tmp.is_simple():
            raise GraphFormatError("rotation given for a multigraph; omit it and subdivide first")
        rotation = {}
        for v_str, nbrs in data["rotation"].items():
            v = int(v_str)
            if v not in vset:
                raise GraphFormatError(f"rotation for unknown vertex {v}")
            rotation[v] = tuple(int(x) for x in nbrs)
        for v in vertices:
            expected = sorted(g_tmp.neighbors(v))
            got = sorted(rotation.get(v, ()))
            if got != expected:
                raise GraphFormatError(
                    f"rotation inconsistent with incidence at vertex {v}: "
                    f"expected neighbors {expected}, got {got}")
    return Graph(vertices, edges, tree, root, rotation)


def _default_rotation(g: Graph) -> dict[int, tuple[int, ...]]:
    warnings.warn("no rotation given; defaulting to ascending neighbor ids "
                  "(results depend on the embedding)", stacklevel=3)
    return {v: tuple(g.neighbors(v)) for v in g.vertices}


def _rotation_or_default(g: Graph) -> dict[int, tuple[int, ...]]:
    return g.rotation if g.rotation is not None else _default_rotation(g)


# ---------------------------------------------------------------------------
# subdivision


@dataclass
class SubdivisionReport:
    target_n: int
    path_violations: list[tuple[int, int, int]] = field(default_factory=list)
    # (essential u, essential v, edge count) per violating segment
    cycle_violations: list[tuple[int, ...]] = field(default_factory=list)
    # violating simple cycles as vertex tuples

    def ok(self) -> bool:
        return not self.path_violations and not self.cycle_violations


def _segments(g: Graph):
    """Maximal chains through degree-2 vertices.  Yields (u, v, edge ids)
    with u, v essential and distinct; edge ids index g.edges.  Cycles made
    of degree-2 vertices fall under the cycle condition instead."""
    essential = set(g.essential_vertices())
    used = set()
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in g.vertices}
    for i, (a, b) in enumerate(g.edges):
        adj[a].append((b, i))
        adj[b].append((a, i))

    for start in sorted(essential):
        for (nxt, eid) in sorted(adj[start]):
            if eid in used:
                continue
            chain = [eid]
            used.add(eid)
            cur = nxt
            while cur not in essential and cur != start:
                outs = [(w, j) for (w, j) in adj[cur] if j not in used]
                if not outs:
                    break
                w, j = outs[0]
                chain.append(j)
                used.add(j)
                cur = w
            if cur in essential and cur != start:
                yield (start, cur, chain)


def _short_cycles(g: Graph, max_len: int):
    """All simple cycles of length <= max_len, as canonical vertex tuples.
    Loops and parallel pairs are included.  Deduplicated by edge set."""
    indexed = list(enumerate(g.edges))
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in g.vertices}
    for i, (a, b) in indexed:
        adj[a].append((b, i))
        adj[b].append((a, i))
    found: dict[frozenset[int], tuple[int, ...]] = {}

    if max_len >= 1:
        for i, (a, b) in indexed:
            if a == b:
                found[frozenset([i])] = (a,)

    def dfs(path, path_edges, start):
        v = path[-1]
        if len(path_edges) >= max_len:
            return
        for (w, eid) in adj[v]:
            if eid in path_edges:
                continue
            if w == start and len(path_edges) >= 1:
                key = frozenset(path_edges | {eid})
                if key not in found:
                    found[key] = tuple(path)
                continue
            if w in path or w < start:
                continue
            dfs(path + [w], path_edges | {eid}, start)

    for start in sorted(g.vertices):
        dfs([start], set(), start)
    out = []
    for key, verts in sorted(found.items(), key=lambda kv: (len(kv[0]), kv[1])):
        out.append(verts)
    return out


def check_subdivision(g: Graph, n: int) -> SubdivisionReport:
    """Violations of the two conditions for n particles: every segment
    between distinct essential vertices needs >= n-1 edges and every simple
    cycle needs >= n+1 edges."""
    rep = SubdivisionReport(target_n=n)
    for (u, v, chain) in _segments(g):
        if u != v and len(chain) < n - 1:
            rep.path_violations.append((u, v, len(chain)))
    for cyc in _short_cycles(g, max_len=n):
        rep.cycle_violations.append(cyc)
    return rep


def subdivide_for(g: Graph, n: int) -> Graph:
    """Insert degree-2 vertices until the graph is sufficiently subdivided
    for n particles, then relabel canonically via order_vertices.  Returns g
    unchanged when it is already sufficient."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if g.is_simple() and check_subdivision(g, n).ok():
        return g

    # mutable edge records: [u, v, is_tree, original_min_endpoint];
    # only one copy of a parallel pair can be the tree edge
    records = []
    seen_tree: set[Edge] = set()
    for a, b in g.edges:
        pair = _norm_edge(a, b)
        is_tree = pair in g.tree_edges and pair not in seen_tree
        if is_tree:
            seen_tree.add(pair)
        records.append([a, b, is_tree, min(a, b)])
    next_id = max(g.vertices) + 1
    rotation = dict(g.rotation) if g.rotation is not None else None

    def subdivide_record(idx: int, extra: int):
        nonlocal next_id, rotation
        if extra <= 0:
            return
        u, v, in_tree, orig_min = records[idx]
        new_vs = list(range(next_id, next_id + extra))
        next_id += extra
        chain = [u] + new_vs + [v]
        chain_edges = list(zip(chain[:-1], chain[1:]))
        flags = [True] * len(chain_edges)
        if not in_tree:
            # keep exactly one deleted edge, anchored at the original lower
            # endpoint when it is still present on this piece
            anchor = orig_min if orig_min in (u, v) else min(u, v)
            for i, e in enumerate(chain_edges):
                if anchor in e:
                    flags[i] = False
                    break
        records[idx] = [chain_edges[0][0], chain_edges[0][1], flags[0], orig_min]
        for e, f in zip(chain_edges[1:], flags[1:]):
            records.append([e[0], e[1], f, orig_min])
        if rotation is not None:
            def patch(vertex, old, new):
                rotation[vertex] = tuple(new if x == old else x for x in rotation[vertex])
            patch(u, v, chain[1])
            patch(v, u, chain[-2])
            for i, w in enumerate(new_vs):
                rotation[w] = (chain[i], chain[i + 2])

    def spread(total: int, k: int) -> list[int]:
        base, extra = divmod(total, k)
        return [base + (1 if i < extra else 0) for i in range(k)]

    def current_graph() -> Graph:
        vs = set(g.vertices) | {x for r in records for x in r[:2]}
        edges = tuple(sorted(_norm_edge(r[0], r[1]) for r in records))
        tree = frozenset(_norm_edge(r[0], r[1]) for r in records if r[2])
        return Graph(tuple(sorted(vs)), edges, tree, g.root, None)

    # simplicity pass: the complex needs a simple graph, so open loops into
    # triangles and split parallel copies
    seen_pairs: set[Edge] = set()
    for idx in range(len(records)):
        u, v = records[idx][0], records[idx][1]
        pair = _norm_edge(u, v)
        if u == v:
            subdivide_record(idx, 2)
        elif pair in seen_pairs:
            subdivide_record(idx, 1)
        else:
            seen_pairs.add(pair)

    # condition 1: pad short segments between distinct essential vertices.
    # the graph is simple now, so edge pairs identify records uniquely and
    # every record is subdivided at most once in this phase.
    cur = current_graph()
    rec_of_pair = {_norm_edge(r[0], r[1]): i for i, r in enumerate(records)}
    for (u, v, chain_eids) in list(_segments(cur)):
        deficit = (n - 1) - len(chain_eids)
        if deficit <= 0:
            continue
        for eid, extra in zip(chain_eids, spread(deficit, len(chain_eids))):
            subdivide_record(rec_of_pair[cur.edges[eid]], extra)

    # condition 2: pad short cycles, shortest first, until none remain
    while True:
        cur = current_graph()
        cycles = _short_cycles(cur, max_len=n)
        if not cycles:
            break
        cyc = cycles[0]
        # recover the edge records of this cycle
        rec_by_edge: dict[Edge, list[int]] = {}
        for i, r in enumerate(records):
            rec_by_edge.setdefault(_norm_edge(r[0], r[1]), []).append(i)
        eids = []
        if len(cyc) == 1:
            eids = [rec_by_edge[(cyc[0], cyc[0])][0]]
        else:
            taken: set[int] = set()
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                cands = [i for i in rec_by_edge.get(_norm_edge(a, b), []) if i not in taken]
                eids.append(cands[0])
                taken.add(cands[0])
        deficit = (n + 1) - len(eids)
        for eid, extra in zip(eids, spread(deficit, len(eids))):
            subdivide_record(eid, extra)

    out = current_graph()
    if rotation is not None:
        out.rotation = rotation
    return relabel_canonically(out)


# ---------------------------------------------------------------------------
# ordering


@dataclass
class VertexOrder:
    """Depth-first numbering: label, per-edge (tau, iota) in label space with
    tau < iota, and the parent edge e(v) for every non-root vertex."""
    label: dict[int, int]                  # original id -> 1..|V|
    original: dict[int, int]               # label -> original id
    edge_labels: dict[Edge, tuple[int, int]]   # original edge -> (tau, iota)
    parent: dict[int, int]                 # child label -> parent label


def order_vertices(g: Graph, rotation: dict[int, tuple[int, ...]] | None = None) -> VertexOrder:
    """Number vertices from the root along the tree.  At a junction of tree
    degree d the branch toward the root is branch 0 and the remaining
    branches are taken clockwise (rotation order) from it; lower branches are
    numbered first, depth first."""
    if not g.is_simple():
        raise GraphFormatError("ordering requires a simple graph; subdivide first")
    if rotation is None:
        rotation = _rotation_or_default(g)

    tadj: dict[int, set[int]] = {v: set() for v in g.vertices}
    for a, b in g.tree_edges:
        tadj[a].add(b)
        tadj[b].add(a)

    label: dict[int, int] = {}
    parent_of: dict[int, int] = {}
    counter = 1

    def branch_children(v: int, parent: int | None) -> list[int]:
        rot = rotation[v]
        tree_nbrs = [w for w in rot if w in tadj[v]]
        if parent is None:
            return tree_nbrs
        i = tree_nbrs.index(parent)
        return tree_nbrs[i + 1:] + tree_nbrs[:i]

    stack = [(g.root, None)]
    # explicit stack DFS, children pushed in reverse so the lowest branch
    # is numbered first
    while stack:
        v, par = stack.pop()
        label[v] = counter
        counter += 1
        if par is not None:
            parent_of[v] = par
        for child in reversed(branch_children(v, par)):
            stack.append((child, v))

    original = {lab: v for v, lab in label.items()}
    edge_labels = {}
    for e in set(g.edges):
        la, lb = label[e[0]], label[e[1]]
        edge_labels[e] = (min(la, lb), max(la, lb))
    parent = {label[v]: label[p] for v, p in parent_of.items()}
    return VertexOrder(label, original, edge_labels, parent)


@dataclass
class OrderedGraph:
    """Canonical, relabeled view: vertices 1..n, root 1, edges as (tau, iota)."""
    n: int
    edges: tuple[Edge, ...]                 # sorted, tau < iota
    tree: frozenset[Edge]
    deleted: tuple[Edge, ...]
    parent: dict[int, int]                  # label -> parent label (root absent)
    children: dict[int, tuple[int, ...]]    # rotation-ordered tree children
    rotation: dict[int, tuple[int, ...]]
    original_id: dict[int, int]
    source: Graph

    @property
    def root(self) -> int:
        return 1

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def parent_edge(self, v: int) -> Edge:
        return (self.parent[v], v)

    def branch_index(self, junction: int, child: int) -> int:
        """Index of the branch through `child` at `junction`: 0 points to the
        root, the rest count clockwise.  At the root the single branch is 0."""
        kids = self.children[junction]
        if junction == 1:
            return kids.index(child)
        return kids.index(child) + 1

    def is_two_connected(self) -> bool:
        if self.n < 3:
            return False
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.n + 1)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        for cut in range(1, self.n + 1):
            rest = [v for v in range(1, self.n + 1) if v != cut]
            if not rest:
                continue
            seen = {rest[0]}
            stack = [rest[0]]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w != cut and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != len(rest):
                return False
        return True


def ordered(g: Graph) -> OrderedGraph:
    if not g.is_simple():
        raise GraphFormatError("ordering requires a simple graph; subdivide first")
    rotation_src = _rotation_or_default(g)
    vo = order_vertices(g, rotation_src)
    lab = vo.label
    edges = tuple(sorted(vo.edge_labels[e] for e in set(g.edges)))
    tree = frozenset(vo.edge_labels[e] for e in g.tree_edges)
    deleted = tuple(sorted(e for e in edges if e not in tree))
    rotation = {lab[v]: tuple(lab[w] for w in nbrs) for v, nbrs in rotation_src.items()}
    children: dict[int, tuple[int, ...]] = {}
    tadj: dict[int, set[int]] = {v: set() for v in range(1, len(g.vertices) + 1)}
    for a, b in tree:
        tadj[a].add(b)
        tadj[b].add(a)
    for v in range(1, len(g.vertices) + 1):
        rot = rotation[v]
        tree_nbrs = [w for w in rot if w in tadj[v]]
        if v == 1:
            children[v] = tuple(tree_nbrs)
        else:
            par = vo.parent[v]
            i = tree_nbrs.index(par)
            children[v] = tuple(tree_nbrs[i + 1:] + tree_nbrs[:i])
    return OrderedGraph(
        n=len(g.vertices), edges=edges, tree=tree, deleted=deleted,
        parent=dict(vo.parent), children=children, rotation=rotation,
        original_id=dict(vo.original), source=g)


def relabel_canonically(g: Graph) -> Graph:
    """Rewrite a graph with vertex ids equal to their depth-first labels.
    The rotation actually used for the ordering is stored on the result, so
    reordering the output is the identity."""
    rotation_src = _rotation_or_default(g)
    vo = order_vertices(g, rotation_src)
    lab = vo.label
    vertices = tuple(range(1, len(g.vertices) + 1))
    edges = tuple(sorted(_norm_edge(lab[a], lab[b]) for a, b in g.edges))
    tree = frozenset(_norm_edge(lab[a], lab[b]) for a, b in g.tree_edges)
    rotation = {lab[v]: tuple(lab[w] for w in nbrs) for v, nbrs in rotation_src.items()}
    return Graph(vertices, edges, tree, lab[g.root], rotation)


# ---------------------------------------------------------------------------
# tree conditions


@dataclass
class TreeConditionReport:
    t1: bool
    t1_witnesses: list[Edge]
    t2: bool
    t2_witnesses: list[tuple[Edge, int]]

    def as_dict(self) -> dict:
        return {
            "t1": self.t1,
            "t1_witnesses": [list(e) for e in self.t1_witnesses],
            "t2": self.t2,
            "t2_witnesses": [[list(e), v] for e, v in self.t2_witnesses],
            "t3": "unverified",
        }


def check_tree_conditions(og: OrderedGraph) -> TreeConditionReport:
    """T1: every deleted edge ends (iota) at a degree-2 vertex.  T2: no
    deleted edge is separated in the tree by a vertex below its tau."""
    t1_wit = [e for e in og.deleted if og.degree(e[1]) != 2]
    t2_wit = []
    for e in og.deleted:
        tau, iota = e
        # interior vertices of the tree path tau..iota separate the edge
        path_up = []
        v = iota
        while v != 1:
            path_up.append(v)
            v = og.parent[v]
        path_up.append(1)
        anc = set(path_up)
        v = tau
        tau_path = []
        while v not in anc:
            tau_path.append(v)
            v = og.parent[v]
        meet = v
        interior = set(tau_path) | set(path_up[:path_up.index(meet)]) | {meet}
        interior -= {tau, iota}
        for v in sorted(interior):
            if v < tau:
                t2_wit.append((e, v))
    return TreeConditionReport(not t1_wit, t1_wit, not t2_wit, t2_wit)
