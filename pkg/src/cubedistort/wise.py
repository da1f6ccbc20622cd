"""Wise's long positive word with no repeated two-letter subwords."""

from __future__ import annotations

from typing import Sequence

from .errors import InvalidParam, NotPositive, TooShort
from .freegroup import Word, intern


def sigma_indices(m: int) -> list[int]:
    """Letter indices (1-based) of the long word over ``m`` letters.

    Group ``i`` (for i < m) is ``i i (i+1) i (i+2) ... i m``; the word ends
    with a single ``m``.
    """
    if m < 1:
        raise InvalidParam(f"m must be >= 1, got {m}")
    out: list[int] = []
    for i in range(1, m):
        out.append(i)
        for j in range(i + 1, m + 1):
            out.append(i)
            out.append(j)
    out.append(m)
    return out


def sigma(m: int, prefix: str = "a") -> Word:
    """The positive word of length ``m**2`` over ``prefix1 .. prefix{m}``."""
    ids = [intern(f"{prefix}{i}") for i in range(1, m + 1)]
    return Word(ids[i - 1] for i in sigma_indices(m))


def check_no_repeat(w: Sequence[int]) -> tuple[int, int] | None:
    """Return ``None`` if every two-letter subword of ``w`` occurs at most
    once, else the 1-based start positions of the first repeat found."""
    if any(x < 0 for x in w):
        raise NotPositive("check_no_repeat needs a positive word")
    seen: dict[tuple[int, int], int] = {}
    for pos in range(len(w) - 1):
        pair = (w[pos], w[pos + 1])
        if pair in seen:
            return seen[pair] + 1, pos + 1
        seen[pair] = pos
    return None


def check_no_repeat_blocks(blocks: Sequence[Sequence[int]]):
    """Global version over a collection of words.

    Returns ``None`` or ``((block, pos), (block, pos))`` for the first
    two-letter word seen twice (block and position indices are 1-based).
    """
    seen: dict[tuple[int, int], tuple[int, int]] = {}
    for b, w in enumerate(blocks, 1):
        if any(x < 0 for x in w):
            raise NotPositive(f"block {b} is not positive")
        for pos in range(len(w) - 1):
            pair = (w[pos], w[pos + 1])
            if pair in seen:
                return seen[pair], (b, pos + 1)
            seen[pair] = (b, pos + 1)
    return None


def carve(w: Sequence[int], count: int, length: int) -> list[Word]:
    """First ``count`` disjoint consecutive blocks of ``length`` letters."""
    if count < 0 or length < 0:
        raise InvalidParam("count and length must be non-negative")
    if count * length > len(w):
        raise TooShort(
            f"need {count} x {length} = {count * length} letters, word has {len(w)}"
        )
    return [Word(w[i * length:(i + 1) * length]) for i in range(count)]
