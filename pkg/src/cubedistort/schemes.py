"""The shipped subdivision schemes.

Every relator disc is cut into a tree of squares (see
:func:`complexes.tree_scheme`).  The recipes below were found by
exhaustive search over all trees of the required size and all placements
of the relator on the disc boundary; the test-suite re-runs the link
checks that selected them.

P-type discs (``t a t^-1 W^-1``, 12 sides, 5 squares): a central square
with one square on each side.  The t-corners get two quarter turns each,
which is what keeps the t-rose ultra-convex.

Q-type discs (``loop c loop^-1 U^-1``, 20 sides, 9 squares): corner
angles ``2 3 2 2 3 2 | 1 1 2 2 1 2 2 2 2 1 2 2 1 1``; the two corners at
the second vertex get three quarter turns, the corners around ``c`` two.
"""

from __future__ import annotations

from .complexes import SINGLE_SQUARE, SubdivisionScheme, tree_scheme
from .errors import ShapeMismatch

P_SCHEME = tree_scheme("P-plus", [0, 1, 2, 3])
Q_SCHEME = tree_scheme("Q-tree9", [0, 0, 1, 2, 3, 3, 4, 16], offset=19)

P_ANGLES = (2, 2, 2, 2, 1, 1, 2, 2, 2, 2, 1, 1)
Q_ANGLES = (2, 3, 2, 2, 3, 2, 1, 1, 2, 2, 1, 2, 2, 2, 2, 1, 2, 2, 1, 1)

BY_LENGTH: dict[int, SubdivisionScheme] = {
    4: SINGLE_SQUARE,
    12: P_SCHEME,
    20: Q_SCHEME,
}


def scheme_for(p, r) -> SubdivisionScheme:
    """Shipped scheme for relator ``r`` (chosen by boundary length)."""
    try:
        return BY_LENGTH[len(r)]
    except KeyError:
        raise ShapeMismatch(f"no shipped scheme for relator {r} of length {len(r)}") from None


SHIPPED = (SINGLE_SQUARE, P_SCHEME, Q_SCHEME)
