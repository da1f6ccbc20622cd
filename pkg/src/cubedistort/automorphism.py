"""The free-group automorphisms phi_{m,k} and their iterates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidParam, SizeLimit
from .freegroup import Word, intern, invert, reduce, substitute

DEFAULT_CAP = 10 ** 7


def _A(i: int) -> int:
    return intern(f"A{i}")


def _B(j: int) -> int:
    return intern(f"B{j}")


def phi_images(m: int, k: int) -> dict[int, Word]:
    """Images of A_1..A_m, B_1..B_k (in that order)."""
    out: dict[int, Word] = {}
    for i in range(1, m + 1):
        pre = [_A(r) for r in range(1, i)]
        out[_A(i)] = reduce(pre + [_A(i)] + [-x for x in reversed(pre)])
    prefix = [_A(r) for r in range(1, m + 1)]
    for j in range(1, k + 1):
        tail = [-_A(r) for r in range(j - 1, 0, -1)]
        out[_B(j)] = reduce(prefix + [_B(r) for r in range(1, j + 1)] + tail)
    return out


@dataclass
class Automorphism:
    basis: list[int]
    images: dict[int, Word]
    cap: int = DEFAULT_CAP
    _powers: list[dict[int, Word]] = field(default_factory=list, repr=False)

    def apply(self, w) -> Word:
        return substitute(w, self.images)

    def power_images(self, n: int) -> dict[int, Word]:
        """Images of the basis under phi^n, via phi^n(x) = phi^{n-1}(phi(x))."""
        if n < 0:
            raise InvalidParam("n must be >= 0")
        if not self._powers:
            self._powers.append({x: Word((x,)) for x in self.basis})
        while len(self._powers) <= n:
            prev = self._powers[-1]
            nxt = {x: substitute(self.images[x], prev) for x in self.basis}
            longest = max(len(w) for w in nxt.values())
            if longest > self.cap:
                raise SizeLimit(f"phi^{len(self._powers)} image has {longest} letters > cap {self.cap}")
            self._powers.append(nxt)
        return self._powers[n]

    def apply_iter(self, x, n: int) -> Word:
        """Reduced word for phi^n(x); ``x`` is a letter or a word."""
        imgs = self.power_images(n)
        if isinstance(x, int):
            return imgs[x] if x > 0 else invert(imgs[-x])
        return substitute(x, imgs)

    def apply_iter_stepwise(self, w, n: int) -> Word:
        """phi^n(w) by n successive substitutions, reducing after each step."""
        w = reduce(w)
        for _ in range(n):
            w = self.apply(w)
            if len(w) > self.cap:
                raise SizeLimit(f"intermediate length {len(w)} > cap {self.cap}")
        return w

    def growth(self, n: int) -> int:
        return max(len(w) for w in self.power_images(n).values())


def phi(m: int, k: int, cap: int = DEFAULT_CAP) -> Automorphism:
    if m < 1 or not 1 <= k <= m:
        raise InvalidParam(f"phi_(m,k) needs 1 <= k <= m, got ({m},{k})")
    images = phi_images(m, k)
    return Automorphism(list(images), images, cap=cap)


def closed_prodA(m: int, k: int, n: int) -> Word:
    """A_1^n ... A_{k-1}^n A_k A_{k-1}^-n ... A_1^-n."""
    if m < 1 or not 1 <= k <= m or n < 0:
        raise InvalidParam(f"closed_prodA needs 1 <= k <= m and n >= 0, got ({m},{k},{n})")
    head = [_A(r) for r in range(1, k) for _ in range(n)]
    return reduce(head + [_A(k)] + [-x for x in reversed(head)])


def linear_form_parts(m: int, k: int, n: int, aut: Automorphism | None = None):
    """Split phi^n(B_k) as prefix * u * B_k * suffix.

    Returns ``(u, word)`` with ``u = None`` when the word does not have the
    expected prefix ``A_1^n..A_m^n`` and suffix ``B_k A_{k-1}^-n .. A_1^-n``.
    """
    aut = aut or phi(m, m)
    w = aut.apply_iter(_B(k), n)
    prefix = [_A(r) for r in range(1, m + 1) for _ in range(n)]
    suffix = [_B(k)] + [-_A(r) for r in range(k - 1, 0, -1) for _ in range(n)]
    if len(w) < len(prefix) + len(suffix):
        return None, w
    if list(w[:len(prefix)]) != prefix or list(w[len(w) - len(suffix):]) != suffix:
        return None, w
    return Word(w[len(prefix):len(w) - len(suffix)]), w


def verify_linear_form(m: int, k: int, n: int) -> bool:
    aut = phi(m, m)
    u, _ = linear_form_parts(m, k, n, aut)
    return u is not None and u.is_positive
