"""Cardinal B-splines on the integer knots ``0, 1, ..., p+1``.

Each spline is tabulated once as ``p+1`` polynomial pieces in the global
variable ``s``; piece ``j`` is valid on ``[j, j+1)``.  Evaluation is
right-continuous at the knots.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .exact_core import as_rational
from .polynomial import Poly

__all__ = [
    "CardinalSpline",
    "cardinal_spline",
    "cardinal_eval",
    "cardinal_inner",
    "cardinal_symmetry_check",
]


class CardinalSpline:
    """Tabulated cardinal B-spline of degree ``p``.

    Attributes
    ----------
    p : int
        Degree.
    pieces : tuple of Poly
        ``pieces[j]`` is the restriction to ``[j, j+1)`` in the variable ``s``.
    """

    __slots__ = ("p", "pieces")

    def __init__(self, p: int, pieces: tuple):
        self.p = p
        self.pieces = pieces

    @property
    def support(self) -> tuple[int, int]:
        return (0, self.p + 1)

    def piece_index(self, s: Fraction) -> int | None:
        j = math.floor(s)
        if j < 0 or j > self.p:
            return None
        return j

    def __call__(self, s, k: int = 0) -> Fraction:
        return cardinal_eval(self.p, k, s)


@lru_cache(maxsize=None)
def cardinal_spline(p: int) -> CardinalSpline:
    """Return the tabulated ``Phi_p`` built by the degree recurrence."""
    if p < 0:
        raise ValueError("degree must be non-negative")
    if p == 0:
        return CardinalSpline(0, (Poly([1]),))
    prev = cardinal_spline(p - 1).pieces
    s = Poly.x()
    left = s * Fraction(1, p)
    right = (Poly([p + 1]) - s) * Fraction(1, p)
    pieces = []
    for j in range(p + 1):
        piece = Poly()
        if j <= p - 1:
            piece = piece + left * prev[j]
        if j >= 1:
            piece = piece + right * prev[j - 1].shift(-1)
        pieces.append(piece)
    return CardinalSpline(p, tuple(pieces))


@lru_cache(maxsize=None)
def _derived_pieces(p: int, k: int) -> tuple:
    return tuple(piece.deriv(k) for piece in cardinal_spline(p).pieces)


def cardinal_eval(p: int, k: int, s) -> Fraction:
    """Exact value of the ``k``-th derivative of ``Phi_p`` at ``s``.

    Parameters
    ----------
    p : int
        Degree, ``p >= 0``.
    k : int
        Derivative order, ``0 <= k <= p``.  For ``k = p`` the derivative is
        piecewise constant and the right limit is returned at knots.
    s : rational-like
        Evaluation point.
    """
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    if k > p:
        raise ValueError("derivative order exceeds degree")
    s = as_rational(s)
    j = math.floor(s)
    if j < 0 or j > p:
        return Fraction(0)
    return _derived_pieces(p, k)[j](s)


def cardinal_inner(p: int, k1: int, k2: int, j: int) -> Fraction:
    """Return ``int d^k1 Phi_p(s) d^k2 Phi_p(s + j) ds`` exactly.

    Uses the convolution identity that reduces the integral to a single
    value of a derivative of ``Phi_{2p+1}`` at ``p + 1 - j``.
    """
    if min(k1, k2) < 0 or max(k1, k2) > p:
        raise ValueError("derivative orders must lie in [0, p]")
    if k1 + k2 > 2 * p + 1:
        raise ValueError("total derivative order exceeds 2p+1")
    sign = -1 if k2 % 2 else 1
    return sign * cardinal_eval(2 * p + 1, k1 + k2, p + 1 - j)


def _left_limit(p: int, k: int, s: Fraction) -> Fraction:
    j = math.ceil(s) - 1
    if j < 0 or j > p:
        return Fraction(0)
    return _derived_pieces(p, k)[j](s)


def cardinal_symmetry_check(p: int, k: int, s) -> bool:
    """Check the reflection symmetry of ``Phi_{2p+1}`` about ``p + 1``.

    For the top derivative ``k = 2p+1`` the function jumps at the knots, so
    the right limit at ``p+1+s`` is compared with the left limit at ``p+1-s``.
    """
    s = as_rational(s)
    q = 2 * p + 1
    if not 0 <= k <= q:
        raise ValueError("derivative order must lie in [0, 2p+1]")
    sign = -1 if k % 2 else 1
    right = cardinal_eval(q, k, p + 1 + s)
    if k == q:
        left = _left_limit(q, k, p + 1 - s)
    else:
        left = cardinal_eval(q, k, p + 1 - s)
    return right == sign * left
