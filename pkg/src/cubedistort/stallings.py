"""Stallings foldings for finitely generated subgroups of free groups."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .freegroup import gen_name, reduce


class SubgroupGraph:
    """Basepointed labelled graph; vertex 0 is the basepoint.

    Folding is done with a union-find over vertices; adjacency maps may hold
    stale vertex ids, so every read goes through :meth:`find`.
    """

    def __init__(self):
        self._parent: list[int] = []
        self._out: list[dict[int, int]] = []
        self._in: list[dict[int, int]] = []
        self._pending: deque[tuple[int, int]] = deque()
        self.folded = False
        self.new_vertex()

    # -- construction ------------------------------------------------------

    def new_vertex(self) -> int:
        self._parent.append(len(self._parent))
        self._out.append({})
        self._in.append({})
        return len(self._parent) - 1

    def find(self, v: int) -> int:
        root = v
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[v] != root:
            self._parent[v], v = root, self._parent[v]
        return root

    def add_edge(self, u: int, label: int, v: int) -> None:
        """Add an edge labelled by generator ``label > 0`` and fold."""
        u, v = self.find(u), self.find(v)
        out, inn = self._out[u], self._in[v]
        if label in out:
            self._pending.append((out[label], v))
        else:
            out[label] = v
        if label in inn:
            self._pending.append((inn[label], u))
        else:
            inn[label] = u
        self._drain()

    def _drain(self) -> None:
        while self._pending:
            x, y = self._pending.popleft()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x  # keep the smaller id, so the basepoint survives
            self._parent[y] = x
            for table in (self._out, self._in):
                src, dst = table[y], table[x]
                for lab, w in src.items():
                    if lab in dst:
                        self._pending.append((dst[lab], w))
                    else:
                        dst[lab] = w
                table[y] = {}

    def add_loop(self, w: Sequence[int]) -> None:
        """Attach a subdivided loop reading ``w`` at the basepoint."""
        if not w:
            return
        cur = 0
        for i, x in enumerate(w):
            nxt = 0 if i == len(w) - 1 else self.new_vertex()
            if x > 0:
                self.add_edge(cur, x, nxt)
            else:
                self.add_edge(nxt, -x, cur)
            cur = nxt

    # -- queries -----------------------------------------------------------

    def vertices(self) -> list[int]:
        return [v for v in range(len(self._parent)) if self._parent[v] == v]

    def edges(self) -> list[tuple[int, int, int]]:
        out = []
        for v in self.vertices():
            for lab, w in self._out[v].items():
                out.append((v, lab, self.find(w)))
        return out

    def degree(self, v: int) -> int:
        d = 0
        for lab, w in self._out[v].items():
            d += 2 if self.find(w) == v else 1
        for lab, w in self._in[v].items():
            if self.find(w) != v:
                d += 1
        return d

    def trim(self) -> None:
        """Remove degree-1 vertices other than the basepoint, repeatedly."""
        changed = True
        while changed:
            changed = False
            for v in self.vertices():
                if v != 0 and self.degree(v) <= 1:
                    self._delete(v)
                    changed = True

    def _delete(self, v: int) -> None:
        for lab, w in list(self._out[v].items()):
            w = self.find(w)
            self._in[w].pop(lab, None)
        for lab, w in list(self._in[v].items()):
            w = self.find(w)
            self._out[w].pop(lab, None)
        self._out[v] = {}
        self._in[v] = {}
        self._parent[v] = -1 - v  # tombstone: no longer a root

    @property
    def rank(self) -> int:
        return len(self.edges()) - len(self.vertices()) + 1

    def step(self, v: int, x: int) -> int | None:
        w = self._out[v].get(x) if x > 0 else self._in[v].get(-x)
        return None if w is None else self.find(w)

    def is_folded(self) -> bool:
        for v in self.vertices():
            outs = [self.find(w) for w in self._out[v].values()]
            ins = [self.find(w) for w in self._in[v].values()]
            if len(outs) != len(self._out[v]) or len(ins) != len(self._in[v]):
                return False
        return not self._pending

    def canonical(self) -> tuple:
        return canonical_form(self.edges())

    def to_dot(self) -> str:
        lines = ["digraph stallings {"]
        for v in self.vertices():
            shape = "doublecircle" if v == 0 else "circle"
            lines.append(f'  v{v} [shape={shape}];')
        for u, lab, w in self.edges():
            lines.append(f'  v{u} -> v{w} [label="{gen_name(lab)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_subgroup(words: Iterable[Sequence[int]], alphabet=None) -> SubgroupGraph:
    g = SubgroupGraph()
    for w in words:
        g.add_loop(reduce(w))
    g.trim()
    g.folded = True
    return g


def member(g: SubgroupGraph, w: Sequence[int]) -> bool:
    v = 0
    for x in reduce(w):
        v = g.step(v, x)
        if v is None:
            return False
    return v == 0


@dataclass
class InjectivityVerdict:
    ok: bool
    rank: int
    expected: int

    def __bool__(self):
        return self.ok


def check_injective(images: Sequence[Sequence[int]], r: int | None = None) -> InjectivityVerdict:
    """A basis of a rank-r free group maps injectively iff the image
    subgroup has rank r (free groups are Hopfian)."""
    r = len(images) if r is None else r
    if len(images) != r:
        return InjectivityVerdict(False, -1, r)
    rank = build_subgroup(images).rank
    return InjectivityVerdict(rank == r, rank, r)


# ---------------------------------------------------------------------------
# independent naive folder, used to cross-check confluence


def fold_naive(words: Iterable[Sequence[int]], rng: random.Random | None = None) -> tuple:
    """Fold by repeatedly picking a random foldable pair from an explicit
    edge list.  Returns the same canonical form as
    :meth:`SubgroupGraph.canonical` after trimming."""
    rng = rng or random.Random(0)
    edges: list[tuple[int, int, int]] = []
    nv = 1
    for w in words:
        w = reduce(w)
        cur = 0
        for i, x in enumerate(w):
            nxt = 0 if i == len(w) - 1 else nv
            if nxt:
                nv += 1
            edges.append((cur, x, nxt) if x > 0 else (nxt, -x, cur))
            cur = nxt
    while True:
        pairs = []
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                a, b = edges[i], edges[j]
                if a[1] == b[1] and (a[0] == b[0] or a[2] == b[2]):
                    pairs.append((i, j))
        if not pairs:
            break
        i, j = rng.choice(pairs)
        a, b = edges[i], edges[j]
        x, y = (a[2], b[2]) if a[0] == b[0] else (a[0], b[0])
        keep, drop = min(x, y), max(x, y)
        new = []
        for k, (u, lab, v) in enumerate(edges):
            if k == j:
                continue
            new.append((keep if u == drop else u, lab, keep if v == drop else v))
        edges = new
    # trim leaves
    while True:
        deg: dict[int, int] = {}
        for u, _, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        leaves = {v for v, d in deg.items() if d == 1 and v != 0}
        if not leaves:
            break
        edges = [e for e in edges if e[0] not in leaves and e[2] not in leaves]
    return canonical_form(edges)


def canonical_form(edges: Iterable[tuple[int, int, int]]) -> tuple:
    """Isomorphism invariant of a folded basepointed graph (basepoint 0):
    BFS numbering from the basepoint, visiting moves in a fixed letter
    order.  Only meaningful for folded graphs, where moves are unique."""
    moves: dict[int, dict[int, int]] = {}
    for u, lab, v in edges:
        moves.setdefault(u, {})[lab] = v
        moves.setdefault(v, {})[-lab] = u
    order = {0: 0}
    queue = deque([0])
    out = []
    while queue:
        v = queue.popleft()
        for x in sorted(moves.get(v, {}), key=lambda y: (abs(y), -y)):
            w = moves[v][x]
            if w not in order:
                order[w] = len(order)
                queue.append(w)
            if x > 0:
                out.append((order[v], x, order[w]))
    return len(order), tuple(sorted(out))
