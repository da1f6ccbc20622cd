"""Free group words, explicit and compressed.

Letters are nonzero integers: ``+g`` for the generator with interned id ``g``
and ``-g`` for its inverse.  Generator names are interned in a process-wide
registry so that words built by different modules compare by identity of the
integer ids alone.

Compressed words are straight-line programs (SLPs): immutable DAG nodes whose
length is cached as an exact Python integer at construction time.
"""

from __future__ import annotations

import re
import threading
from typing import Iterable, Sequence

from .errors import CapExceeded

_lock = threading.Lock()
_ids: dict[str, int] = {}
_names: list[str] = [""]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_@']*$")


def intern(name: str) -> int:
    """Return the id of generator ``name``, registering it if needed."""
    gid = _ids.get(name)
    if gid is not None:
        return gid
    if not _NAME_RE.match(name):
        raise ValueError(f"invalid generator name {name!r}")
    with _lock:
        gid = _ids.get(name)
        if gid is None:
            gid = len(_names)
            _names.append(name)
            _ids[name] = gid
    return gid


def gen_name(letter: int) -> str:
    return _names[abs(letter)]


def letter(name: str, sign: int = 1) -> int:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * intern(name)


def letter_str(x: int) -> str:
    return gen_name(x) if x > 0 else gen_name(x) + "^-1"


class Word(tuple):
    """A finite sequence of signed letters (not necessarily reduced)."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return super().__new__(cls, letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``t1 a1 t1^-1`` style text; ``x^k`` repeats ``x`` (or its
        inverse for negative ``k``)."""
        out: list[int] = []
        for tok in text.split():
            name, _, exp = tok.partition("^")
            k = int(exp) if exp else 1
            x = intern(name)
            if k < 0:
                out.extend([-x] * (-k))
            else:
                out.extend([x] * k)
        return cls(out)

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "Word":
        return cls(intern(n) for n in names)

    def __str__(self) -> str:
        return " ".join(letter_str(x) for x in self)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __add__(self, other):
        return Word(tuple.__add__(self, other))

    def __getitem__(self, item):
        r = tuple.__getitem__(self, item)
        return Word(r) if isinstance(item, slice) else r

    def __mul__(self, other):
        if isinstance(other, Word):
            return concat(self, other)
        return NotImplemented

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def inverse(self) -> "Word":
        return invert(self)

    @property
    def is_positive(self) -> bool:
        return all(x > 0 for x in self)

    @property
    def is_reduced(self) -> bool:
        return all(self[i] != -self[i + 1] for i in range(len(self) - 1))

    def gens(self) -> set[int]:
        return {abs(x) for x in self}


EMPTY = Word()


def reduce(w: Iterable[int]) -> Word:
    stack: list[int] = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(stack)


def cyclic_reduce(w: Iterable[int]) -> Word:
    r = reduce(w)
    i, j = 0, len(r)
    while j - i >= 2 and r[i] == -r[j - 1]:
        i += 1
        j -= 1
    return r[i:j]


def concat(u: Sequence[int], v: Sequence[int]) -> Word:
    return reduce(tuple(u) + tuple(v))


def invert(u: Sequence[int]) -> Word:
    return reduce(-x for x in reversed(u))


def power(u: Sequence[int], k: int) -> Word:
    if k < 0:
        u, k = invert(u), -k
    return reduce(tuple(u) * k)


def substitute(w: Sequence[int], images: dict[int, Sequence[int]]) -> Word:
    """Apply the homomorphism sending generator ``g`` to ``images[g]`` and
    fixing generators not in ``images``; the result is reduced."""
    out: list[int] = []
    for x in w:
        img = images.get(abs(x))
        if img is None:
            piece: Sequence[int] = (x,)
        elif x > 0:
            piece = img
        else:
            piece = [-y for y in reversed(img)]
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(out)


# ---------------------------------------------------------------------------
# straight-line programs


class Slp:
    """Base class of SLP nodes.  ``length`` is the exact letter count of the
    expansion (no reduction); ``positive`` means no inverse letters occur."""

    __slots__ = ("length", "positive", "__weakref__")

    def __len__(self):  # pragma: no cover - lengths can exceed sys.maxsize
        return self.length

    def expand(self, cap: int | None = None) -> Word:
        return slp_expand(self, cap)


class Terminal(Slp):
    __slots__ = ("letter",)

    def __init__(self, letter: int):
        self.letter = letter
        self.length = 1
        self.positive = letter > 0

    def __repr__(self):
        return f"Terminal({letter_str(self.letter)})"


class Concat(Slp):
    __slots__ = ("left", "right")

    def __init__(self, left: Slp, right: Slp):
        self.left = left
        self.right = right
        self.length = left.length + right.length
        self.positive = left.positive and right.positive


class Power(Slp):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Slp, exponent: int):
        if exponent < 0:
            raise ValueError("Power exponent must be non-negative")
        self.base = base
        self.exponent = exponent
        self.length = exponent * base.length
        # x^0 is the empty word, which is positive
        self.positive = base.positive or exponent == 0


class Inverse(Slp):
    __slots__ = ("operand",)

    def __init__(self, operand: Slp):
        self.operand = operand
        self.length = operand.length
        self.positive = operand.length == 0


class Empty(Slp):
    __slots__ = ()

    def __init__(self):
        self.length = 0
        self.positive = True


def concat_all(nodes: Sequence[Slp]) -> Slp:
    """Balanced binary concatenation of ``nodes``."""
    nodes = list(nodes)
    if not nodes:
        return Empty()
    while len(nodes) > 1:
        nxt = [Concat(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    return nodes[0]


def slp_from_word(w: Sequence[int]) -> Slp:
    return concat_all([Terminal(x) for x in w])


def slp_length(s: Slp) -> int:
    return s.length


def slp_expand(s: Slp, cap: int | None = None) -> Word:
    """Expand ``s`` into an explicit (unreduced) word.

    Raises :class:`CapExceeded` if the expansion is longer than ``cap``.
    """
    if cap is not None and s.length > cap:
        raise CapExceeded(f"SLP length {s.length} exceeds cap {cap}")
    out: list[int] = []
    # (node, inverted) pairs; processed right-to-left off the stack
    stack: list[tuple[Slp, bool]] = [(s, False)]
    while stack:
        node, inv = stack.pop()
        if isinstance(node, Terminal):
            out.append(-node.letter if inv else node.letter)
        elif isinstance(node, Concat):
            if inv:
                stack.append((node.left, True))
                stack.append((node.right, True))
            else:
                stack.append((node.right, False))
                stack.append((node.left, False))
        elif isinstance(node, Power):
            stack.extend([(node.base, inv)] * node.exponent)
        elif isinstance(node, Inverse):
            stack.append((node.operand, not inv))
        elif isinstance(node, Empty):
            pass
        else:  # pragma: no cover
            raise TypeError(f"unknown SLP node {node!r}")
    return Word(out)
