"""Witness words for subgroup distortion, compressed rewriting into the
distorted subgroup, exact length measurement, and growth classification.

Lengths are exact: Python ints while they fit in ``EXACT_BITS`` bits, and
:class:`Tower` values (``base ** (mult * exponent)``, nested) beyond that.
Floats only appear in :func:`iter_log` and :func:`classify_growth`, which
are estimates by nature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .automorphism import phi
from .errors import BadLetter, CapExceeded, InsufficientData, InvalidParam, NotInSubgroup, TowerOverflow
from .freegroup import (
    Concat, Empty, Inverse, Power, Slp, Terminal, Word, concat_all, gen_name, intern, reduce,
    slp_expand, substitute,
)
from .presentations import Presentation, build_chain, build_hnn, build_P, build_Q, chain_block_sizes

EXACT_BITS = 1 << 20
# conjugators longer than this are not unrolled into SLP levels
MAX_LEVELS = 1_000
# chain blocks with more a-letters than this are not built explicitly
MAX_BLOCK_LETTERS = 729


# ---------------------------------------------------------------------------
# exact big lengths


@dataclass(frozen=True)
class Tower:
    """The number ``base ** (mult * exponent)``; ``exponent`` is an int or
    another Tower."""

    base: int
    exponent: Union[int, "Tower"]
    mult: int = 1

    @property
    def height(self) -> int:
        e = self.exponent
        return 1 + (e.height if isinstance(e, Tower) else 0)

    def __str__(self) -> str:
        e = self.exponent
        inner = str(e) if isinstance(e, int) else f"({e})"
        if self.mult != 1:
            inner = f"{self.mult}*{inner}"
        return f"{self.base}^{{{inner}}}"

    def _key(self):
        # log-log size, for ordering towers of equal height
        return iter_log(self, self.height)


Length = Union[int, Tower]


def tower_pow(base: int, exponent: Length, mult: int = 1, exact_bits: int = EXACT_BITS) -> Length:
    """``base ** (mult * exponent)``, as an int when it fits in ``exact_bits``."""
    if isinstance(exponent, int):
        e = mult * exponent
        if e * math.log2(base) <= exact_bits:
            return base ** e
    return Tower(base, exponent, mult)


def length_str(x: Length) -> str:
    return str(x)


class Scaled:
    """``coef * value`` with a huge ``value`` (an int too large for a float, or
    a Tower); produced by :func:`iter_log`."""

    __slots__ = ("coef", "value")

    def __init__(self, coef: float, value):
        self.coef = coef
        self.value = value

    def __repr__(self):
        return f"Scaled({self.coef!r}, {self.value})"


def _ln(x):
    if isinstance(x, Scaled):
        inner = _ln(x.value)
        if isinstance(inner, Scaled):
            return inner  # ln(coef) is negligible next to ln(value)
        return math.log(x.coef) + inner
    if isinstance(x, Tower):
        # ln(b^(mult*E)) = mult * ln(b) * E
        c = x.mult * math.log(x.base)
        e = x.exponent
        if isinstance(e, int) and e < 1e300:
            return c * e
        return Scaled(c, e)
    if isinstance(x, int):
        if x <= 0:
            raise ValueError("log of a non-positive length")
        return math.log(x)
    if x <= 0:
        raise ValueError("log of a non-positive value")
    return math.log(x)


def iter_log(x, k: int):
    """``ln`` applied ``k`` times; returns a float, or a :class:`Scaled`
    when the value is still beyond float range."""
    for _ in range(k):
        x = _ln(x)
    if isinstance(x, int):
        return float(x) if x < 1e300 else Scaled(1.0, x)
    return x


def exceeds_iterated_exp(length: Length, x: float, k: int) -> bool:
    """Whether ``length > exp^k(x)``, compared as ``ln^k(length) > x``."""
    y = length
    for _ in range(k):
        if not isinstance(y, (Tower, Scaled)) and y <= 0:
            return False
        y = _ln(y)
    if isinstance(y, Scaled):
        return True
    if isinstance(y, int) and y >= 1e300:
        return True
    return y > x


# ---------------------------------------------------------------------------
# SLP helpers


def slp_substitute(s: Slp, images: Mapping[int, Slp]) -> Slp:
    """Apply a letter -> SLP substitution to every terminal of ``s``
    (letters without an image stay put).  Shared nodes stay shared."""
    memo: dict[int, Slp] = {}
    stack = [(s, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in memo:
            continue
        if isinstance(node, Terminal):
            img = images.get(abs(node.letter))
            if img is None:
                memo[id(node)] = node
            else:
                memo[id(node)] = img if node.letter > 0 else Inverse(img)
        elif isinstance(node, Empty):
            memo[id(node)] = node
        elif not ready:
            stack.append((node, True))
            for child in _children(node):
                if id(child) not in memo:
                    stack.append((child, False))
        elif isinstance(node, Concat):
            memo[id(node)] = Concat(memo[id(node.left)], memo[id(node.right)])
        elif isinstance(node, Power):
            memo[id(node)] = Power(memo[id(node.base)], node.exponent)
        elif isinstance(node, Inverse):
            memo[id(node)] = Inverse(memo[id(node.operand)])
    return memo[id(s)]


def _children(node):
    if isinstance(node, Concat):
        return (node.left, node.right)
    if isinstance(node, Power):
        return (node.base,)
    if isinstance(node, Inverse):
        return (node.operand,)
    return ()


def _rules_of(p) -> Mapping[int, Mapping[int, Sequence[int]]]:
    return p.rules if isinstance(p, Presentation) else p


def conj_expand(p, conjugator, target: int) -> Slp:
    """SLP for ``u target u^-1`` rewritten into the subgroup, where ``u`` is
    a positive word (or positive SLP) over stable letters of ``p``.

    ``p`` is a :class:`Presentation` or a rules mapping
    ``{stable: {letter: image}}`` meaning ``stable letter stable^-1 = image``.
    """
    rules = _rules_of(p)
    if isinstance(conjugator, Slp):
        if not conjugator.positive:
            raise BadLetter("conjugator SLP is not positive")
        if conjugator.length > MAX_LEVELS:
            raise CapExceeded(f"conjugator has {conjugator.length} letters > {MAX_LEVELS}")
        conjugator = slp_expand(conjugator)
    # the last letter of u acts first, so walk u from the right
    letters = list(reversed(conjugator))
    for x in letters:
        if x < 0 or x not in rules:
            raise BadLetter(f"conjugator letter {Word((x,))} is not a positive stable letter")
    # which letters are needed at each level, innermost first
    need: list[set[int]] = [{target}]
    for x in letters:
        nxt: set[int] = set()
        for a in need[-1]:
            img = rules[x].get(a)
            if img is None:
                raise BadLetter(f"{Word((x,))} does not act on {Word((a,))}")
            nxt.update(abs(y) for y in img)
        need.append(nxt)
    level = {a: Terminal(a) for a in need[-1]}
    for r in range(len(letters) - 1, -1, -1):
        act = rules[letters[r]]
        level = {
            a: concat_all([level[y] if y > 0 else Inverse(level[-y]) for y in act[a]])
            for a in need[r]
        }
    return level[target]


# ---------------------------------------------------------------------------
# small-scale rewriting oracle


def rewrite_small(p, w: Sequence[int], cap: int = 10 ** 6, subgroup: set[int] | None = None) -> Word:
    """Rewrite ``w`` into the subgroup by repeatedly replacing an innermost
    ``x u x^-1`` (``x`` a stable letter, ``u`` over letters ``x`` acts on)
    by the image of ``u``.  Raises NotInSubgroup when stable letters are
    left over, CapExceeded when the word grows past ``cap``."""
    rules = _rules_of(p)
    if subgroup is None and isinstance(p, Presentation) and "distorted" in p.marked:
        subgroup = {abs(x) for b in p.marked["distorted"] for x in b}
    w = list(reduce(w))
    while True:
        hit = _innermost(w, rules)
        if hit is None:
            break
        i, j = hit
        x = w[i]
        mid = substitute(w[i + 1:j], rules[x])
        w = list(reduce(w[:i] + list(mid) + w[j + 1:]))
        if len(w) > cap:
            raise CapExceeded(f"rewrite reached {len(w)} letters > cap {cap}")
    leftover = [y for y in w if abs(y) in rules and (subgroup is None or abs(y) not in subgroup)]
    if leftover:
        raise NotInSubgroup(f"stable letters remain: {Word(leftover)}")
    if subgroup is not None:
        stray = [y for y in w if abs(y) not in subgroup]
        if stray:
            raise NotInSubgroup(f"letters outside the subgroup remain: {Word(stray)}")
    return Word(w)


def _innermost(w: list[int], rules) -> tuple[int, int] | None:
    best = None
    for i, x in enumerate(w):
        if x <= 0 or x not in rules:
            continue
        dom = rules[x]
        j = i + 1
        while j < len(w) and abs(w[j]) in dom and w[j] != -x:
            j += 1
        if j < len(w) and w[j] == -x:
            if best is None or j - i < best[1] - best[0]:
                best = (i, j)
    return best


# ---------------------------------------------------------------------------
# samples


@dataclass
class DistortionSample:
    n: int
    ambient_len: int
    subgroup_len: Length
    family: str = ""
    params: dict = field(default_factory=dict)
    ambient: str = ""
    element: object = None

    def log_iterates(self, k: int = 3) -> list:
        out = []
        for j in range(1, k + 1):
            try:
                out.append(iter_log(self.subgroup_len, j))
            except ValueError:
                break
        return out


def _fmt_word(letters) -> str:
    return str(Word(letters))


def witness_P(n_block: int, k: int, p: Presentation | None = None) -> DistortionSample:
    """``t1^k a1 t1^-k`` in ``P_{n_block}``; its subgroup length is 9^k."""
    if k < 0:
        raise InvalidParam("k must be >= 0")
    p = p or build_P(n_block)
    t1 = p.marked["ultraconvex"][0][0]
    a1 = p.marked["distorted"][0][0]
    slp = conj_expand(p, Word((t1,) * k), a1)
    amb = f"{Word((t1,))}^{k} {Word((a1,))} {Word((-t1,))}^{k}"
    return DistortionSample(k, 2 * k + 1, slp.length, "P", {"n": n_block, "k": k}, amb, slp)


def _conjugate_ambient(u_len: int) -> int:
    return 2 * u_len + 1


def witness_chain(k: int, m: int, n: int, max_levels: int = MAX_LEVELS,
                  exact_bits: int = EXACT_BITS) -> DistortionSample:
    """Level 1 is ``t1^n a1 t1^-n`` in the first block; level i+1 conjugates
    ``a1`` of block i by the level-i element (whose letters are the stable
    letters of block i).  Each level raises 9 to the previous length."""
    if k < 1 or n < 1 or m < 1:
        raise InvalidParam("witness_chain needs k, m, n >= 1")
    sizes = chain_block_sizes(k, m)
    spec = None
    if 9 * sizes[min(1, k - 1)] <= MAX_BLOCK_LETTERS:
        spec = build_chain(min(k, 2), m, sizes=sizes[:min(k, 2)])
    first = spec.vertices[0] if spec else build_P(sizes[0])
    elem = witness_P(sizes[0], n, first).element
    length: Length = elem.length
    ambient = 2 * n + 1
    levels = [length]
    for i in range(1, k):
        ambient = _conjugate_ambient(ambient)
        block = spec.vertices[i] if spec and i < len(spec.vertices) else None
        if elem is not None and block is not None and isinstance(length, int) and length <= max_levels:
            a1 = block.marked["distorted"][0][0]
            elem = conj_expand(block, elem, a1)
            length = elem.length
        else:
            elem = None
            if isinstance(length, int) and length.bit_length() > 8 * exact_bits:
                raise TowerOverflow("exponent beyond the tower budget")
            length = tower_pow(9, length, exact_bits=exact_bits)
        levels.append(length)
    return DistortionSample(n, ambient, length, "chain", {"k": k, "m": m, "levels": levels},
                            f"level-{k} nested conjugate of a1", elem)


def witness_Gmm(m: int, n: int, copies: int | None = None, cap: int = 10 ** 7) -> DistortionSample:
    """``t^n B_m^c t^-n`` in G_{m,m} with ``c = copies`` (default ``2n``),
    whose subgroup form is the reduced product of ``c`` copies of
    ``phi^n(B_m)``."""
    if m < 1 or n < 0:
        raise InvalidParam("witness_Gmm needs m >= 1, n >= 0")
    c = 2 * n if copies is None else copies
    aut = phi(m, m, cap=cap)
    bm = intern(f"B{m}")
    img = aut.apply_iter(bm, n)
    out = reduce(tuple(img) * c)
    amb = f"t^{n} B{m}^{c} t^-{n}"
    return DistortionSample(n, 2 * n + c, len(out), "Gmm", {"m": m, "n": n, "copies": c}, amb, out)


def gmm_ambient_word(m: int, n: int, copies: int | None = None) -> Word:
    c = 2 * n if copies is None else copies
    t, bm = intern("t"), intern(f"B{m}")
    return Word((t,) * n + (bm,) * c + (-t,) * n)


def split_linear(w: Word) -> tuple[Word, Word]:
    """Split off the longest suffix made of inverse A-letters."""
    j = len(w)
    while j > 0 and w[j - 1] < 0 and _is_a_letter(w[j - 1]):
        j -= 1
    return Word(w[:j]), Word(w[j:])


def _is_a_letter(x: int) -> bool:
    name = gen_name(abs(x))
    return name[:1] == "A" and name[1:].isdigit()


def q_factor(m: int, q: Presentation | None = None) -> int:
    """Per-letter growth factor of the Q-block rewriting, measured as the
    longest image word among the loop actions (all U words have the same
    length, so this is exact)."""
    q = q or build_Q(m)
    lens = {len(u) for r in q.extra["loop_rules"].values() for u in r.values()}
    if len(lens) != 1:
        raise InvalidParam(f"Q-block images have mixed lengths {sorted(lens)}")
    return lens.pop()


def q_rules(q: Presentation) -> dict[int, dict[int, Word]]:
    """Loop actions of Q keyed by the free-by-cyclic basis letters A_i, B_k."""
    return {intern(name): dict(r) for name, r in q.extra["loop_rules"].items()}


def witness_main(k: int, m: int, n: int, cap: int = 10 ** 7, max_levels: int = MAX_LEVELS,
                 exact_bits: int = EXACT_BITS) -> DistortionSample:
    """Level 0: ``w_1`` = positive part of ``phi^{2n}(B_m)``, an element of
    F_2m spelled ``t^{2n} B_m t^{-2n} l^{-1}``.  Level 1 conjugates ``c_1`` in
    Q_m by ``w_1`` (read as loops); level i >= 2 conjugates ``a_1`` of chain
    block i-1."""
    if m < 2 or m % 2 or k < 0 or n < 1:
        raise InvalidParam("witness_main needs even m >= 2, k >= 0, n >= 1")
    aut = phi(m, m, cap=cap)
    full = aut.apply_iter(intern(f"B{m}"), 2 * n)
    w1, tail = split_linear(full)
    ambient = 4 * n + 1 + len(tail)
    levels: list[Length] = [len(w1)]
    params = {"k": k, "m": m, "n": n, "tail_len": len(tail), "w1_positive": w1.is_positive}
    elem: object = w1
    length: Length = len(w1)
    if k >= 1:
        q = build_Q(m)
        factor = q_factor(m, q)
        params["q_factor"] = factor
        ambient = _conjugate_ambient(ambient)
        if len(w1) <= 12:
            elem = conj_expand(q_rules(q), w1, q.marked["distorted"][0][0])
            length = elem.length
        else:
            elem = None
            length = tower_pow(factor, len(w1), exact_bits=exact_bits)
        levels.append(length)
    for _ in range(2, k + 1):
        ambient = _conjugate_ambient(ambient)
        elem = None
        length = tower_pow(9, length, exact_bits=exact_bits)
        levels.append(length)
    params["levels"] = levels
    return DistortionSample(n, ambient, length, "main", params, "nested conjugates of w_1", elem)


def witness_hnn(n_t: int, m_a: int, depth: int, p: Presentation | None = None,
                exact_bits: int = EXACT_BITS) -> DistortionSample:
    """``v_0 = a1``, ``v_{j+1} = (s v_j s^-1) a1 (s v_j s^-1)^-1``.

    ``s v_j s^-1`` is the positive t-word obtained by replacing each a_l of
    v_j with W_l (9 letters), and conjugating a1 by a positive t-word of
    length L multiplies by 9 per letter, so len(v_{j+1}) = 9^(9 len(v_j)).
    Ambient length: 1, then 2L + 5.
    """
    if depth < 0:
        raise InvalidParam("depth must be >= 0")
    p = p or build_hnn(n_t, m_a)
    a1 = p.marked["distorted"][0][0]
    s = intern("s")
    elem: object = Terminal(a1)
    length: Length = 1
    ambient = 1
    levels = [length]
    for _ in range(depth):
        ambient = 2 * ambient + 5
        conj_len = 9 * length if isinstance(length, int) else None
        if elem is not None and conj_len is not None and conj_len <= MAX_LEVELS:
            images = {a: concat_all([Terminal(x) for x in w]) for a, w in p.rules[s].items()}
            conj = slp_substitute(elem, images)
            elem = conj_expand(p, conj, a1)
            length = elem.length
        else:
            elem = None
            length = tower_pow(9, length, mult=9, exact_bits=exact_bits)
        levels.append(length)
    return DistortionSample(depth, ambient, length, "hnn", {"n": n_t, "m": m_a, "levels": levels},
                            f"depth-{depth} nested conjugate of a1", elem)


# ---------------------------------------------------------------------------
# growth classification


@dataclass
class GrowthClass:
    height: int
    degree: float
    slopes: list[float]

    def __iter__(self):
        return iter((self.height, self.degree))


def _local_slopes(xs, ys):
    return [(math.log(ys[i + 1]) - math.log(ys[i])) / (math.log(xs[i + 1]) - math.log(xs[i]))
            for i in range(len(xs) - 1)]


def _fit_slope(xs, ys) -> float:
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den if den else 0.0


def classify_growth(samples, max_height: int = 6, use_ambient: bool = False,
                    threshold: float = 0.5) -> GrowthClass:
    """Estimate ``(k, d)`` with ``L(x) ~ exp^k(x^d)``.

    Take logs of the lengths until the log-log local slopes stop growing
    (their own log-log trend drops below ``threshold``); ``k`` is the
    number of logs taken, ``d`` the last local slope.
    """
    pts = []
    for s in samples:
        if isinstance(s, DistortionSample):
            x, y = (s.ambient_len if use_ambient else s.n), s.subgroup_len
        else:
            x, y = s
        pts.append((x, y))
    pts = [(x, y) for x, y in pts if x > 0]
    if len(pts) < 5:
        raise InsufficientData(f"need at least 5 samples with n > 0, got {len(pts)}")
    pts.sort(key=lambda q: q[0])
    xs = [q[0] for q in pts]
    if len(set(xs)) != len(xs):
        raise InsufficientData("sample abscissae must be distinct")
    for k in range(max_height + 1):
        try:
            ys = [iter_log(y, k) for _, y in pts]
        except ValueError:
            raise InsufficientData(f"lengths too small to take {k} logs") from None
        if any(isinstance(y, Scaled) for y in ys):
            continue
        keep = [(x, y) for x, y in zip(xs, ys) if y > 0]
        if len(keep) < 3:
            raise InsufficientData(f"too few positive values after {k} logs")
        kx = [q[0] for q in keep]
        ky = [q[1] for q in keep]
        slopes = _local_slopes(kx, ky)
        if all(s > 0 for s in slopes):
            mids = [math.log((kx[i] + kx[i + 1]) / 2) for i in range(len(slopes))]
            trend = _fit_slope(mids, [math.log(s) for s in slopes])
        else:
            trend = 0.0
        if trend < threshold:
            return GrowthClass(k, slopes[-1], slopes)
    raise InsufficientData(f"no polynomial regime within {max_height} logs")
