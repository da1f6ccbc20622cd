"""Square complexes built from presentations, vertex links, and the
combinatorial curvature checks (large links, ultra-convexity, flat
exclusion) plus gluing along 1-dimensional subcomplexes.

Angles are counted in quarter turns: every square corner is one unit, so a
loop of length 2*pi in a link is a cycle of 4 units.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import NotIsomorphic, ShapeMismatch
from .freegroup import gen_name
from .presentations import Presentation

TWO_PI = 4


# ---------------------------------------------------------------------------
# subdivision schemes


@dataclass(frozen=True)
class SubdivisionScheme:
    """A tree of squares tiling a disc whose boundary has ``boundary_len``
    sides.

    ``squares`` lists each square as four ``(side, direction)`` pairs read
    around its boundary, where ``side`` is ``("b", k)`` for the k-th
    boundary side of the disc (oriented along the relator) or ``("i", r)``
    for interior edge r.  ``interior`` gives each interior edge's endpoints
    as disc-boundary vertex indices (vertex k is the start of side k).
    """

    name: str
    boundary_len: int
    squares: tuple
    interior: tuple

    @property
    def square_count(self) -> int:
        return len(self.squares)

    def corner_angles(self) -> list[int]:
        """Number of square corners at each disc-boundary vertex."""
        angles = [0] * self.boundary_len
        for sq in self.squares:
            for side, d in sq:
                s, t = self._ends(side)
                angles[s if d > 0 else t] += 1
        return angles

    def _ends(self, side) -> tuple[int, int]:
        kind, r = side
        if kind == "b":
            return r, (r + 1) % self.boundary_len
        return self.interior[r]


def tree_scheme(name: str, recipe: Sequence[int], offset: int = 0, reflect: bool = False) -> SubdivisionScheme:
    """Grow a tree of squares and read its boundary as a relator disc.

    Start from one square; ``recipe[i]`` is the index of the current
    boundary side on which square ``i + 1`` is attached.  The relator's
    first letter is then placed on boundary side ``offset``; ``reflect``
    reads the boundary in the opposite direction.
    """
    # edges: id -> (u, v); boundary: list of (edge id, dir)
    edges = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (3, 0)}
    nverts = 4
    boundary = [(0, 1), (1, 1), (2, 1), (3, 1)]
    squares = [[(0, 1), (1, 1), (2, 1), (3, 1)]]
    for idx in recipe:
        e, d = boundary[idx]
        x, y = edges[e] if d > 0 else edges[e][::-1]
        p, q = nverts, nverts + 1
        nverts += 2
        f1, f2, f3 = len(edges), len(edges) + 1, len(edges) + 2
        edges[f1], edges[f2], edges[f3] = (x, p), (p, q), (q, y)
        squares.append([(f1, 1), (f2, 1), (f3, 1), (e, -d)])
        boundary[idx:idx + 1] = [(f1, 1), (f2, 1), (f3, 1)]
    n = len(boundary)
    if reflect:
        boundary = [(e, -d) for e, d in reversed(boundary)]
    boundary = boundary[offset % n:] + boundary[:offset % n]
    # vertex k of the disc = start of boundary side k
    vpos = {}
    for k, (e, d) in enumerate(boundary):
        vpos[edges[e][0] if d > 0 else edges[e][1]] = k
    side_of = {e: (k, d) for k, (e, d) in enumerate(boundary)}
    interior_ids: dict[int, int] = {}
    interior = []
    out_squares = []
    for sq in squares:
        out = []
        for e, d in sq:
            if e in side_of:
                k, bd = side_of[e]
                out.append((("b", k), d * bd))
            else:
                if e not in interior_ids:
                    interior_ids[e] = len(interior)
                    u, v = edges[e]
                    interior.append((vpos[u], vpos[v]))
                out.append((("i", interior_ids[e]), d))
        out_squares.append(tuple(out))
    return SubdivisionScheme(name, n, tuple(out_squares), tuple(interior))


SINGLE_SQUARE = tree_scheme("square", [])


# ---------------------------------------------------------------------------
# complexes


@dataclass
class SquareComplex:
    nverts: int = 0
    # edge id -> (source, target, label); label is a generator id (int) or str
    edges: list[tuple[int, int, object]] = field(default_factory=list)
    squares: list[tuple[tuple[int, int], ...]] = field(default_factory=list)
    gen_edge: dict[int, int] = field(default_factory=dict)
    marked: dict[str, set[int]] = field(default_factory=dict)
    # vertex index -> display name
    vertex_names: dict[int, str] = field(default_factory=dict)
    # vertices that came from the presentation (not from subdivision)
    original: set[int] = field(default_factory=set)

    def add_vertex(self, name: str | None = None) -> int:
        v = self.nverts
        self.nverts += 1
        if name is not None:
            self.vertex_names[v] = name
        return v

    def add_edge(self, u: int, v: int, label) -> int:
        self.edges.append((u, v, label))
        return len(self.edges) - 1

    def side_ends(self, side: tuple[int, int]) -> tuple[int, int]:
        e, d = side
        u, v, _ = self.edges[e]
        return (u, v) if d > 0 else (v, u)

    def validate(self) -> None:
        for sq in self.squares:
            if len(sq) != 4:
                raise ValueError("square must have four sides")
            for k in range(4):
                if self.side_ends(sq[k])[1] != self.side_ends(sq[(k + 1) % 4])[0]:
                    raise ValueError(f"square {sq} is not a closed edge path")

    def edge_name(self, e: int) -> str:
        lab = self.edges[e][2]
        return gen_name(lab) if isinstance(lab, int) else str(lab)

    def euler_characteristic(self) -> int:
        return self.nverts - len(self.edges) + len(self.squares)

    def canonical(self) -> tuple:
        """Labelled-complex fingerprint independent of edge/vertex ids for
        complexes whose edges all carry distinct labels."""
        names = {e: self.edge_name(e) for e in range(len(self.edges))}
        inc = sorted(
            (names[e], self.vertex_names.get(u, ""), self.vertex_names.get(v, ""))
            for e, (u, v, _) in enumerate(self.edges) if isinstance(self.edges[e][2], int)
        )
        sq = []
        for s in self.squares:
            rots = []
            for r in range(4):
                seq = s[r:] + s[:r]
                rots.append(tuple((names[e], d) for e, d in seq))
                rev = tuple((names[e], -d) for e, d in reversed(seq))
                rots.append(rev)
            sq.append(min(rots))
        return tuple(inc), tuple(sorted(sq))

    def to_dot(self) -> str:
        lines = ["digraph complex {"]
        for v in range(self.nverts):
            lines.append(f'  v{v} [label="{self.vertex_names.get(v, v)}"];')
        for e, (u, v, _) in enumerate(self.edges):
            lines.append(f'  v{u} -> v{v} [label="{self.edge_name(e)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def default_scheme_for(p: Presentation, r) -> SubdivisionScheme:
    """Pick the shipped scheme for relator ``r`` of ``p``."""
    from . import schemes

    return schemes.scheme_for(p, r)


def build_complex(p: Presentation, scheme=None) -> SquareComplex:
    """Square complex of the presentation 2-complex with each relator disc
    tiled by ``scheme`` (a SubdivisionScheme, or a callable
    ``(presentation, relator) -> SubdivisionScheme``; default: shipped
    schemes)."""
    c = SquareComplex()
    for v in range(p.vertex_count):
        c.add_vertex(f"v{v + 1}" if p.vertex_count > 1 else "v")
        c.original.add(v)
    for g in p.generators:
        s, t = p.tag(g)
        c.gen_edge[g] = c.add_edge(s, t, g)
    for name, words in p.marked.items():
        if all(len(w) == 1 for w in words):
            c.marked[name] = {c.gen_edge[abs(w[0])] for w in words}
    if scheme is None:
        pick = default_scheme_for
    elif isinstance(scheme, SubdivisionScheme):
        pick = lambda _p, _r: scheme  # noqa: E731
    else:
        pick = scheme
    for ri, r in enumerate(p.relators):
        sch = pick(p, r)
        if sch.boundary_len != len(r):
            raise ShapeMismatch(
                f"relator {ri} ({r}) has length {len(r)}, scheme {sch.name} expects {sch.boundary_len}"
            )
        # disc vertex k sits at the start of letter k
        dvert = []
        for x in r:
            s, t = p.tag(x)
            dvert.append(s if x > 0 else t)
        inner = []
        for ii, (a, b) in enumerate(sch.interior):
            inner.append(c.add_edge(dvert[a], dvert[b], f"d{ii}[{r}]"))
        for sq in sch.squares:
            sides = []
            for (kind, k), d in sq:
                if kind == "b":
                    x = r[k]
                    sides.append((c.gen_edge[abs(x)], d * (1 if x > 0 else -1)))
                else:
                    sides.append((inner[k], d))
            c.squares.append(tuple(sides))
    return c


# ---------------------------------------------------------------------------
# links


def node_id(edge: int, end: str) -> int:
    return 2 * edge + (0 if end == "+" else 1)


def node_name(c: SquareComplex, node: int) -> str:
    return c.edge_name(node // 2) + ("+" if node % 2 == 0 else "-")


@dataclass
class LinkGraph:
    vertex: int
    nodes: list[int]
    # (u, w, square index); each corner is one quarter turn
    edges: list[tuple[int, int, int]]

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        adj: dict[int, list[tuple[int, int]]] = {u: [] for u in self.nodes}
        for i, (u, w, _) in enumerate(self.edges):
            adj[u].append((w, i))
            if u != w:
                adj[w].append((u, i))
            else:
                adj[u].append((u, i))
        return adj

    def to_dot(self, c: SquareComplex | None = None) -> str:
        name = (lambda n: node_name(c, n)) if c else str
        lines = ["graph link {"]
        for u in self.nodes:
            lines.append(f'  n{u} [label="{name(u)}"];')
        for u, w, _ in self.edges:
            lines.append(f"  n{u} -- n{w};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def all_links(c: SquareComplex) -> dict[int, LinkGraph]:
    nodes: dict[int, set[int]] = {v: set() for v in range(c.nverts)}
    for e, (u, v, _) in enumerate(c.edges):
        nodes[u].add(node_id(e, "+"))
        nodes[v].add(node_id(e, "-"))
    edges: dict[int, list] = {v: [] for v in range(c.nverts)}
    for si, sq in enumerate(c.squares):
        for k in range(4):
            e_in, d_in = sq[k]
            e_out, d_out = sq[(k + 1) % 4]
            at = c.side_ends(sq[k])[1]
            n_in = node_id(e_in, "-" if d_in > 0 else "+")
            n_out = node_id(e_out, "+" if d_out > 0 else "-")
            edges[at].append((n_in, n_out, si))
    return {v: LinkGraph(v, sorted(nodes[v]), edges[v]) for v in range(c.nverts)}


def link(c: SquareComplex, v: int) -> LinkGraph:
    return all_links(c)[v]


# ---------------------------------------------------------------------------
# girth and distances


def shortest_cycle(g: LinkGraph, bound: int | None = None) -> list[int] | None:
    """A shortest cycle of ``g`` as a closed node list (first node repeated
    at the end), or ``None`` if acyclic.  With ``bound``, only cycles
    shorter than ``bound`` are searched for."""
    adj = g.adjacency()
    best_len = bound if bound is not None else float("inf")
    best = None
    for root in g.nodes:
        dist = {root: 0}
        parent: dict[int, tuple[int, int]] = {}
        queue = deque([root])
        seen_edges: set[int] = set()
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best_len:
                break
            for y, ei in adj[x]:
                if ei in seen_edges:
                    continue
                seen_edges.add(ei)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = (x, ei)
                    queue.append(y)
                else:
                    length = dist[x] + dist[y] + 1
                    if length < best_len:
                        best_len = length
                        best = _splice(root, x, y, parent)
    return best


def _splice(root, x, y, parent):
    def path(z):
        out = [z]
        while z != root:
            z = parent[z][0]
            out.append(z)
        return out[::-1]

    px, py = path(x), path(y)
    return px + py[::-1]


def girth(g: LinkGraph) -> float:
    cyc = shortest_cycle(g)
    return float("inf") if cyc is None else len(cyc) - 1


def distances_from(g: LinkGraph, source: int, limit: int | None = None, adj=None) -> dict[int, int]:
    adj = adj or g.adjacency()
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        if limit is not None and dist[x] >= limit:
            continue
        for y, _ in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class Verdict:
    ok: bool
    check: str
    details: dict = field(default_factory=dict)
    witness: list | None = None

    def __bool__(self):
        return self.ok

    def line(self) -> str:
        if self.ok:
            return "OK"
        return "VIOLATION " + " ".join(str(x) for x in (self.witness or []))


def check_large_link(c: SquareComplex, vertices: Iterable[int] | None = None) -> Verdict:
    """OK iff every vertex link has girth >= 4."""
    links = all_links(c)
    girths = {}
    for v in (vertices if vertices is not None else range(c.nverts)):
        cyc = shortest_cycle(links[v], bound=TWO_PI)
        if cyc is not None:
            return Verdict(False, "large_link", {"vertex": v, "cycle_length": len(cyc) - 1},
                           [node_name(c, n) for n in cyc])
        girths[v] = ">=4"
    return Verdict(True, "large_link", {"girth": girths})


def link_girths(c: SquareComplex, bound: int | None = None) -> dict[int, float]:
    out = {}
    for v, g in all_links(c).items():
        cyc = shortest_cycle(g, bound=bound)
        out[v] = float("inf") if cyc is None else len(cyc) - 1
    return out


def sub_nodes(c: SquareComplex, sub: Iterable[int]) -> dict[int, list[int]]:
    """Link nodes, per vertex, coming from the edges in ``sub``."""
    out: dict[int, list[int]] = {}
    for e in sub:
        u, v, _ = c.edges[e]
        out.setdefault(u, []).append(node_id(e, "+"))
        out.setdefault(v, []).append(node_id(e, "-"))
    return out


def min_separation(c: SquareComplex, sub: Iterable[int], cap: int = 8) -> dict[int, float]:
    """Per vertex of ``sub``, the minimum link distance between distinct
    nodes of ``sub`` (``inf`` when none are within ``cap``)."""
    links = all_links(c)
    out = {}
    for v, nodes in sub_nodes(c, sub).items():
        g = links[v]
        adj = g.adjacency()
        best = float("inf")
        targets = set(nodes)
        for n in nodes:
            dist = distances_from(g, n, limit=cap, adj=adj)
            for m, d in dist.items():
                if m != n and m in targets and d < best:
                    best = d
        out[v] = best
    return out


def check_ultraconvex(c: SquareComplex, sub: Iterable[int]) -> Verdict:
    sub = list(sub)
    sep = min_separation(c, sub)
    worst = min(sep.values(), default=float("inf"))
    return Verdict(worst >= TWO_PI, "ultraconvex", {"min_separation": worst, "per_vertex": sep})


def four_cycles(g: LinkGraph, limit: int = 1) -> list[list[int]]:
    """Simple cycles on four distinct nodes (up to ``limit`` of them)."""
    adj = g.adjacency()
    mids: dict[tuple[int, int], int] = {}
    found = []
    for x in g.nodes:
        nbrs = sorted({y for y, _ in adj[x] if y != x})
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                key = (nbrs[i], nbrs[j])
                other = mids.get(key)
                if other is not None and other != x:
                    found.append([key[0], other, key[1], x, key[0]])
                    if len(found) >= limit:
                        return found
                else:
                    mids[key] = x
    return found


def check_flat_exclusion(c: SquareComplex, p: Presentation, vertex: int = 0) -> Verdict:
    """Positivity and global no-repeat of the Wise blocks, and no simple
    4-cycle (a loop of length exactly 2*pi) in the link of ``vertex``."""
    positive = all(w.is_positive for blocks in p.blocks.values() for w in blocks)
    repeat = p.no_repeat_verdict() if positive else "n/a"
    cyc = four_cycles(link(c, vertex))
    ok = positive and repeat is None and not cyc
    return Verdict(ok, "flat_exclusion",
                   {"positive": positive, "no_repeat": repeat is None, "four_cycles": len(cyc)},
                   [node_name(c, n) for n in cyc[0]] if cyc else None)


# ---------------------------------------------------------------------------
# gluing


def glue(a: SquareComplex, b: SquareComplex, along: dict[int, tuple[int, int]]) -> SquareComplex:
    """Quotient of ``a`` and ``b`` identifying edge ``e`` of ``a`` with
    ``b``-edge ``f`` (``sign = -1`` reverses it) for ``along[e] = (f, sign)``.

    The induced vertex map must be well defined; it need not be injective.
    """
    if not along:
        raise NotIsomorphic("empty identification")
    targets = [f for f, _ in along.values()]
    if len(set(targets)) != len(targets):
        raise NotIsomorphic("edge map is not injective")
    vmap: dict[int, int] = {}
    for e, (f, sgn) in along.items():
        if sgn not in (1, -1):
            raise NotIsomorphic("sign must be +1 or -1")
        au, av, _ = a.edges[e]
        bu, bv, _ = b.edges[f]
        if sgn < 0:
            bu, bv = bv, bu
        for x, y in ((au, bu), (av, bv)):
            if vmap.setdefault(x, y) != y:
                raise NotIsomorphic(f"vertex {x} of the first complex would map to two vertices")
    out = SquareComplex()
    for v in range(b.nverts):
        out.add_vertex(b.vertex_names.get(v, f"b{v}"))
    out.original |= b.original
    for u, v, lab in b.edges:
        out.add_edge(u, v, lab)
    out.gen_edge.update(b.gen_edge)
    for name, es in b.marked.items():
        out.marked[name] = set(es)
    out.squares.extend(b.squares)
    # unglued vertices of a
    for v in range(a.nverts):
        if v not in vmap:
            vmap[v] = out.add_vertex(a.vertex_names.get(v, f"a{v}"))
            if v in a.original:
                out.original.add(vmap[v])
    emap: dict[int, tuple[int, int]] = {}
    for e, (u, v, lab) in enumerate(a.edges):
        if e in along:
            emap[e] = along[e]
        else:
            emap[e] = (out.add_edge(vmap[u], vmap[v], lab), 1)
    for g, e in a.gen_edge.items():
        if e not in along and g not in out.gen_edge:
            out.gen_edge[g] = emap[e][0]
    for sq in a.squares:
        out.squares.append(tuple((emap[e][0], d * emap[e][1]) for e, d in sq))
    for name, es in a.marked.items():
        if name not in out.marked:
            out.marked[name] = {emap[e][0] for e in es}
    return out


def gen_edge_map(a: SquareComplex, b: SquareComplex, pairs: Iterable[tuple[int, int, int]]):
    """Build a ``glue`` map from ``(gen in a, gen in b, sign)`` triples."""
    return {a.gen_edge[x]: (b.gen_edge[y], s) for x, y, s in pairs}


# ---------------------------------------------------------------------------
# the shipped glued complexes


def glued_chain(k: int = 2, m: int = 1, scheme=None) -> SquareComplex:
    """Complexes of the chain blocks glued along the merged a/t letters."""
    from .presentations import build_chain

    spec = build_chain(k, m)
    out = build_complex(spec.vertices[0], scheme)
    for prev, block in zip(spec.vertices, spec.vertices[1:]):
        c = build_complex(block, scheme)
        shared = [w[0] for w in prev.marked["distorted"]]
        out = glue(c, out, gen_edge_map(c, out, [(g, g, 1) for g in shared]))
    return out


def s_image_pairs(m: int, primed: bool = False) -> list[tuple[int, int, int]]:
    """Edge identifications of S_m with K: alpha_i -> s_{2i}^-1, beta_i -> s_{2i-1}."""
    from .freegroup import intern

    pairs = [(intern(f"alpha{i}"), intern(f"s{2 * i}"), -1) for i in range(1, m + 1)]
    top = m if primed else m + 1
    pairs += [(intern(f"beta{i}"), intern(f"s{2 * i - 1}"), 1) for i in range(1, top + 1)]
    return pairs


def glued_main(m: int = 2, primed: bool = False, scheme=None) -> tuple[SquareComplex, SquareComplex, SquareComplex]:
    """``K_{m,m} glued to Z_m`` along S_m (the ``k = 1`` main complex).

    Returns ``(glued, K, Z)``.
    """
    from .presentations import build_G, build_Q

    s_pres, _ = build_G(m, m - 1 if primed else m)
    k = build_complex(s_pres, scheme)
    z = build_complex(build_Q(m, primed=primed), scheme)
    return glue(z, k, gen_edge_map(z, k, s_image_pairs(m, primed))), k, z


def s_edges(z: SquareComplex) -> list[int]:
    """Edges of Z between its two vertices (the subcomplex S_m)."""
    return [e for e, (u, v, lab) in enumerate(z.edges) if isinstance(lab, int) and u != v]
