"""Builders for the group families: P_n blocks, two-vertex blocks Q_m / Q'_m,
the groups G_{m,k}, chains of P-blocks, the main three-vertex amalgam and
the HNN extension of a P-type block.

Every builder returns plain data.  Stable-letter actions are recorded in
``Presentation.rules``: ``rules[t][a] = W`` encodes ``t a t^-1 = W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConstraintViolated, InvalidParam, TooShort
from .freegroup import Word, gen_name, intern, invert, reduce
from .wise import carve, check_no_repeat_blocks, sigma, sigma_indices

Tag = tuple[int, int]


@dataclass
class Presentation:
    generators: list[int]
    relators: list[Word]
    marked: dict[str, list[Word]] = field(default_factory=dict)
    vertex_count: int = 1
    # generator id -> (source vertex, target vertex); only for vertex_count > 1
    tags: dict[int, Tag] = field(default_factory=dict)
    rules: dict[int, dict[int, Word]] = field(default_factory=dict)
    # carved Wise blocks per alphabet, for the global no-repeat check
    blocks: dict[str, list[Word]] = field(default_factory=dict)
    family: str = ""
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def tag(self, g: int) -> Tag:
        return self.tags.get(abs(g), (0, 0))

    def relator_closed(self, w: Word) -> bool:
        """Whether ``w`` is a closed edge path under the vertex tags."""
        if not w:
            return True
        pos = None
        start = None
        for x in w:
            s, t = self.tag(x)
            if x < 0:
                s, t = t, s
            if pos is None:
                start = s
            elif pos != s:
                return False
            pos = t
        return pos == start

    def validate(self) -> None:
        gens = set(self.generators)
        for r in self.relators:
            if not r.is_reduced:
                raise ValueError(f"relator {r} is not reduced")
            missing = r.gens() - gens
            if missing:
                names = ", ".join(sorted(gen_name(g) for g in missing))
                raise ValueError(f"relator {r} uses unknown generators {names}")
            if self.vertex_count > 1 and not self.relator_closed(r):
                raise ValueError(f"relator {r} is not a closed loop")

    def no_repeat_verdict(self):
        """``None`` if every alphabet's block set passes the global check."""
        for name, blocks in self.blocks.items():
            bad = check_no_repeat_blocks(blocks)
            if bad is not None:
                return name, bad
        return None

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        lines = ["gen: " + " ".join(gen_name(g) for g in self.generators)]
        for g in self.generators:
            if g in self.tags:
                s, t = self.tags[g]
                lines.append(f"vtx: {gen_name(g)}={s}" if s == t else f"vtx: {gen_name(g)}={s}>{t}")
        for r in self.relators:
            lines.append(f"rel: {r}")
        for name, words in self.marked.items():
            lines.append(f"sub {name}: " + "; ".join(str(w) for w in words))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        gens: list[int] = []
        rels: list[Word] = []
        marked: dict[str, list[Word]] = {}
        tags: dict[int, Tag] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, _, body = line.partition(":")
            head = head.strip()
            body = body.strip()
            if head == "gen":
                gens.extend(intern(n) for n in body.split())
            elif head == "vtx":
                name, _, spec = body.partition("=")
                src, _, tgt = spec.partition(">")
                tags[intern(name.strip())] = (int(src), int(tgt or src))
            elif head == "rel":
                rels.append(Word.parse(body))
            elif head.startswith("sub "):
                marked[head[4:].strip()] = [Word.parse(w) for w in body.split(";") if w.strip()]
            else:
                raise ValueError(f"unrecognised line {raw!r}")
        nverts = 1 + max((max(v) for v in tags.values()), default=0)
        return cls(gens, rels, marked, vertex_count=nverts, tags=tags)


@dataclass
class EdgeGroup:
    rank: int
    left_vertex: int
    right_vertex: int
    left_basis: list[Word]
    right_basis: list[Word]
    name: str = ""

    def __post_init__(self):
        if not (len(self.left_basis) == len(self.right_basis) == self.rank):
            raise ValueError("edge basis lists must both have length = rank")


@dataclass
class AmalgamSpec:
    vertices: list[Presentation]
    edges: list[EdgeGroup]
    family: str = ""
    params: dict = field(default_factory=dict)

    def presentation(self) -> Presentation:
        """Disjoint union of the vertex presentations plus one relator per
        edge-basis element equating its two images (identical images, as
        produced by merged naming, contribute nothing)."""
        gens: list[int] = []
        seen: set[int] = set()
        rels: list[Word] = []
        rules: dict[int, dict[int, Word]] = {}
        for p in self.vertices:
            for g in p.generators:
                if g not in seen:
                    seen.add(g)
                    gens.append(g)
            rels.extend(p.relators)
            for t, r in p.rules.items():
                rules.setdefault(t, {}).update(r)
        for e in self.edges:
            for u, v in zip(e.left_basis, e.right_basis):
                r = reduce(u + invert(v))
                if r:
                    rels.append(r)
        marked = dict(self.vertices[-1].marked) if self.vertices else {}
        return Presentation(gens, rels, marked, rules=rules, family=self.family, params=self.params)


def _names(prefix: str, count: int, suffix: str = "") -> list[str]:
    return [f"{prefix}{i}{suffix}" for i in range(1, count + 1)]


def _conj_relator(t: int, a: int, w: Word) -> Word:
    # t a t^-1 W^-1
    return reduce((t, a, -t) + tuple(invert(w)))


# ---------------------------------------------------------------------------
# P_n


def build_P(n: int, a_names: list[str] | None = None, t_names: list[str] | None = None) -> Presentation:
    """Block ``P_n``: generators a_1..a_{9n}, t_1..t_n, relators
    ``t_i a_j t_i^-1 = W_ij`` with ``W_ij`` the row-major length-9 blocks
    of the long word over the a's."""
    if n < 1:
        raise InvalidParam(f"P_n needs n >= 1, got {n}")
    na = 9 * n
    a_names = a_names or _names("a", na)
    t_names = t_names or _names("t", n)
    a = [intern(x) for x in a_names]
    t = [intern(x) for x in t_names]
    long_word = Word(a[i - 1] for i in sigma_indices(na))
    blocks = carve(long_word, na * n, 9)
    assert 9 * n * na == na * na == len(long_word)
    rels: list[Word] = []
    rules: dict[int, dict[int, Word]] = {}
    for i in range(n):
        rules[t[i]] = {}
        for j in range(na):
            w = blocks[i * na + j]
            rules[t[i]][a[j]] = w
            rels.append(_conj_relator(t[i], a[j], w))
    return Presentation(
        generators=a + t,
        relators=rels,
        marked={
            "distorted": [Word((x,)) for x in a],
            "ultraconvex": [Word((x,)) for x in t],
        },
        rules=rules,
        blocks={"a": blocks},
        family="P",
        params={"n": n},
    )


# ---------------------------------------------------------------------------
# Q_m and Q'_m


V1, V2 = 0, 1  # c-loops sit at V1; alpha: V1 -> V2, beta: V2 -> V1


def q_loop_words(m: int, primed: bool = False) -> dict[str, Word]:
    """Length-two loops at V1 in S_m matched to the free basis A_i, B_k of
    F_{2m} (or F_{2m-1}) under alpha_i -> s_{2i}^-1, beta_i -> s_{2i-1}.

    Odd index: ``alpha beta``; even index: ``beta^-1 alpha^-1``.
    """
    al = lambda i: intern(f"alpha{i}")  # noqa: E731
    be = lambda i: intern(f"beta{i}")  # noqa: E731
    out: dict[str, Word] = {}
    for i in range(1, m + 1):
        if i % 2:
            out[f"A{i}"] = Word((al((i + 1) // 2), be((i + 1) // 2)))
        else:
            out[f"A{i}"] = Word((-be((i + 2) // 2), -al(i // 2)))
    for k in range(1, (m - 1 if primed else m) + 1):
        if k % 2:
            out[f"B{k}"] = Word((al((m + k + 1) // 2), be((k + 1) // 2)))
        else:
            out[f"B{k}"] = Word((-be((m + k + 2) // 2), -al(k // 2)))
    return out


def build_Q(m: int, primed: bool = False, fourth_family: str = "parallel") -> Presentation:
    """Two-vertex block ``Q_m`` (``Q'_m`` when ``primed``), with ``p = 36m``.

    ``fourth_family="verbatim"`` keeps the extra ``U_{ij}^-1`` inside the
    fourth relator family exactly as displayed; ``"parallel"`` drops it so
    all four families have the same shape.
    """
    if m < 2 or m % 2:
        raise InvalidParam(f"Q_m needs an even m >= 2, got {m}")
    if fourth_family not in ("parallel", "verbatim"):
        raise InvalidParam(f"unknown fourth_family reading {fourth_family!r}")
    p = 36 * m
    kmax = m - 1 if primed else m
    nrel = (m + kmax) * p
    if p * p < 15 * (m + kmax) * p:
        raise TooShort(f"p^2 >= 15({m + kmax})p fails for p={p}")
    alpha = [intern(x) for x in _names("alpha", m)]
    beta = [intern(x) for x in _names("beta", m + 1)]
    c = [intern(x) for x in _names("c", p)]
    blocks = carve(sigma(p, "c"), nrel, 15)
    loops = q_loop_words(m, primed)

    rels: list[Word] = []
    rules: dict[str, dict[int, Word]] = {}
    idx = 0
    U_i: dict[tuple[int, int], Word] = {}
    for series, top in (("A", m), ("B", kmax)):
        for i in range(1, top + 1):
            key = f"{series}{i}"
            loop = loops[key]
            rules[key] = {}
            for j in range(p):
                U = blocks[idx]
                idx += 1
                if series == "A":
                    U_i[(i, j)] = U
                cj = (c[j],)
                if series == "B" and i % 2 == 0 and fourth_family == "verbatim":
                    body = tuple(loop) + tuple(invert(U_i[(i, j)])) + cj + tuple(invert(loop))
                else:
                    body = tuple(loop) + cj + tuple(invert(loop))
                rels.append(reduce(body + tuple(invert(U))))
                rules[key][c[j]] = U
    tags: dict[int, Tag] = {}
    for x in c:
        tags[x] = (V1, V1)
    for x in alpha:
        tags[x] = (V1, V2)
    for x in beta:
        tags[x] = (V2, V1)
    pres = Presentation(
        generators=alpha + beta + c,
        relators=rels,
        marked={
            "distorted": [Word((x,)) for x in c],
            "ultraconvex": list(loops.values()),
        },
        vertex_count=2,
        tags=tags,
        blocks={"c": blocks},
        family="Qp" if primed else "Q",
        params={"m": m, "p": p, "primed": primed, "fourth_family": fourth_family},
        extra={"loop_rules": rules, "loops": loops},
    )
    return pres


# ---------------------------------------------------------------------------
# G_{m,k}


def build_G(m: int, k: int) -> tuple[Presentation, Presentation]:
    """The s-presentation and the free-by-cyclic presentation of G_{m,k}."""
    if m < 1 or not 0 <= k <= m:
        raise InvalidParam(f"G_(m,k) needs m >= 1 and 0 <= k <= m, got ({m},{k})")
    from .automorphism import phi_images  # local: automorphism imports us

    s = [intern(x) for x in _names("s", m + k + 1)]
    rels = []
    for i in range(m):
        rels.append(Word((s[i], s[i + 1], -s[i], -s[i + 1])))
    for j in range(1, k + 1):
        # s_{m+j+1}^-1 s_j s_{m+j+1} s_{m+j}^-1
        rels.append(Word((-s[m + j], s[j - 1], s[m + j], -s[m + j - 1])))
    change = {}
    for i in range(1, m + 1):
        change[intern(f"A{i}")] = Word((-s[i], s[i - 1]))
    for j in range(1, k + 1):
        change[intern(f"B{j}")] = Word((-s[m + j], s[j - 1]))
    s_pres = Presentation(
        generators=s,
        relators=rels,
        marked={"distorted": list(change.values())},
        family="G",
        params={"m": m, "k": k},
        extra={"change_of_basis": change},
    )

    images = phi_images(m, k)
    t = intern("t")
    basis = list(images)
    fbc_rels = [_conj_relator(t, x, images[x]) for x in basis]
    fbc = Presentation(
        generators=basis + [t],
        relators=fbc_rels,
        marked={"distorted": [Word((x,)) for x in basis]},
        rules={t: dict(images)},
        family="G-fbc",
        params={"m": m, "k": k},
        extra={"change_of_basis": change},
    )
    return s_pres, fbc


# ---------------------------------------------------------------------------
# chains and amalgams


def chain_block_sizes(k: int, m: int) -> list[int]:
    base = 1 if m == 1 else 4 * m
    return [base * 9 ** i for i in range(k)]


def build_chain(k: int, m: int = 1, sizes: list[int] | None = None) -> AmalgamSpec:
    """Chain ``P_{n_0} *_{F} P_{n_1} * ...`` where the a's of block i-1 are
    literally the t's of block i (names ``a{j}@{i-1}``)."""
    if k < 1 or m < 1:
        raise InvalidParam(f"chain needs k >= 1 and m >= 1, got ({k},{m})")
    sizes = sizes or chain_block_sizes(k, m)
    blocks: list[Presentation] = []
    edges: list[EdgeGroup] = []
    for i, n in enumerate(sizes):
        a_names = _names("a", 9 * n, f"@{i}")
        if i == 0:
            t_names = _names("t", n, f"@{i}")
        else:
            if 9 * sizes[i - 1] != n:
                raise InvalidParam("consecutive chain blocks must satisfy n_i = 9 n_{i-1}")
            t_names = _names("a", n, f"@{i - 1}")
        blocks.append(build_P(n, a_names, t_names))
        if i:
            prev, cur = blocks[i - 1], blocks[i]
            edges.append(EdgeGroup(
                rank=n, left_vertex=i - 1, right_vertex=i,
                left_basis=list(prev.marked["distorted"]),
                right_basis=list(cur.marked["ultraconvex"]),
                name=f"e{i}",
            ))
    return AmalgamSpec(blocks, edges, family="chain", params={"k": k, "m": m, "sizes": sizes})


def build_main_amalgam(k: int, m: int, primed: bool = False) -> AmalgamSpec:
    """``G_{m,m} *_{F_2m} Q_m *_{F_36m} (chain)``, or the primed variant
    ``G_{m,m-1} *_{F_{2m-1}} Q'_m * ...``.

    The chain part has ``k-1`` P-blocks of sizes ``9^i * 4m`` (i >= 1), so
    that the c's of Q_m (rank 36m) meet the rank-36m rose of t's of the
    first block; with k = 1 the chain is empty.
    """
    if k < 1 or m < 2 or m % 2:
        raise InvalidParam(f"main amalgam needs k >= 1 and even m >= 2, got ({k},{m})")
    gk = m - 1 if primed else m
    s_pres, _ = build_G(m, gk)
    q = build_Q(m, primed=primed)
    loops = q.extra["loops"]
    change = s_pres.extra["change_of_basis"]
    left = [change[intern(name)] for name in loops]
    e1 = EdgeGroup(rank=len(loops), left_vertex=0, right_vertex=1,
                   left_basis=left, right_basis=list(loops.values()), name="e1")
    vertices = [s_pres, q]
    edges = [e1]
    if k > 1:
        sizes = [4 * m * 9 ** i for i in range(1, k)]
        chain = build_chain(k - 1, m, sizes=sizes)
        first = chain.vertices[0]
        edges.append(EdgeGroup(rank=36 * m, left_vertex=1, right_vertex=2,
                               left_basis=list(q.marked["distorted"]),
                               right_basis=list(first.marked["ultraconvex"]), name="e2"))
        for e in chain.edges:
            edges.append(EdgeGroup(e.rank, e.left_vertex + 2, e.right_vertex + 2,
                                   e.left_basis, e.right_basis, e.name))
        vertices.extend(chain.vertices)
    return AmalgamSpec(vertices, edges, family="main", params={"k": k, "m": m, "primed": primed})


def check_hnn_params(n: int, m: int) -> None:
    if n < 1 or m < 1:
        raise InvalidParam("HNN parameters must be positive")
    if 9 * m * n > m * m:
        raise ConstraintViolated("9mn <= m^2", f"9mn <= m^2 fails: 9*{m}*{n} = {9 * m * n} > {m * m}")
    if 9 * m > n * n:
        raise ConstraintViolated("9m <= n^2", f"9m <= n^2 fails: 9*{m} = {9 * m} > {n * n}")


def build_hnn(n: int, m: int) -> Presentation:
    """HNN group H with t's acting on the a's and s sending a_l to W_l over
    the t's (n = number of t's, m = number of a's)."""
    check_hnn_params(n, m)
    a = [intern(x) for x in _names("a", m)]
    t = [intern(x) for x in _names("t", n)]
    s = intern("s")
    a_blocks = carve(sigma(m, "a"), m * n, 9)
    t_blocks = carve(sigma(n, "t"), m, 9)
    rels: list[Word] = []
    rules: dict[int, dict[int, Word]] = {}
    for i in range(n):
        rules[t[i]] = {}
        for j in range(m):
            w = a_blocks[i * m + j]
            rules[t[i]][a[j]] = w
            rels.append(_conj_relator(t[i], a[j], w))
    rules[s] = {}
    for j in range(m):
        rules[s][a[j]] = t_blocks[j]
        rels.append(_conj_relator(s, a[j], t_blocks[j]))
    return Presentation(
        generators=a + t + [s],
        relators=rels,
        marked={"distorted": [Word((x,)) for x in a], "ultraconvex": [Word((x,)) for x in t]},
        rules=rules,
        blocks={"a": a_blocks, "t": t_blocks},
        family="hnn",
        params={"n": n, "m": m},
    )
