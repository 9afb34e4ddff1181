"""Maximal-regularity spline spaces on uniform meshes of ``[0, T]``.

Basis functions are built with the Cox-de Boor recursion, element by element,
in the local coordinate ``u = (t - t_e) / h`` of each element.  The local
basis on an element depends only on the open knot vector relative to that
element, so it is cached by that relative signature; all interior elements
share one entry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .cardinal import cardinal_spline
from .exact_core import as_rational, format_rational
from .polynomial import Poly

__all__ = [
    "KnotVector",
    "PiecewisePolynomial",
    "SplineBasis",
    "build_basis",
    "basis_inner",
    "local_basis",
    "central_identity_holds",
]


@dataclass(frozen=True)
class KnotVector:
    """Open knot vector with ``p+1`` fold end knots and simple interior knots."""

    p: int
    N: int
    T: Fraction

    def __post_init__(self):
        if self.p < 1 or self.N < 1:
            raise ValueError("need p >= 1 and N >= 1")
        object.__setattr__(self, "T", as_rational(self.T))
        if self.T <= 0:
            raise ValueError("T must be positive")

    @property
    def h(self) -> Fraction:
        return self.T / self.N

    def index_knots(self) -> list[int]:
        """Knots in units of ``h``: ``clamp(j - p, 0, N)`` for ``j = 0..N+2p``."""
        return [min(max(j - self.p, 0), self.N) for j in range(self.N + 2 * self.p + 1)]

    @property
    def knots(self) -> list[Fraction]:
        return [self.h * t for t in self.index_knots()]


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piecewise polynomial on a uniform subset of elements of ``[0, T]``.

    ``pieces[e]`` is the polynomial in the local variable ``u`` on element
    ``e``, i.e. on ``[e h, (e+1) h)``.  Missing elements mean zero.
    """

    h: Fraction
    N: int
    pieces: dict = field(default_factory=dict)

    def __call__(self, t, k: int = 0) -> Fraction:
        t = as_rational(t)
        T = self.h * self.N
        if t < 0 or t > T:
            return Fraction(0)
        x = t / self.h
        e = min(math.floor(x), self.N - 1)
        piece = self.pieces.get(e)
        if piece is None:
            return Fraction(0)
        return piece.deriv(k)(x - e) / self.h**k

    def deriv(self, k: int = 1) -> "PiecewisePolynomial":
        scale = Fraction(1) / self.h**k
        return PiecewisePolynomial(
            self.h, self.N, {e: q.deriv(k) * scale for e, q in self.pieces.items()}
        )

    def __add__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        out = dict(self.pieces)
        for e, q in other.pieces.items():
            out[e] = out.get(e, Poly()) + q
        return PiecewisePolynomial(self.h, self.N, {e: q for e, q in out.items() if not q.is_zero()})

    def __sub__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        neg = PiecewisePolynomial(other.h, other.N, {e: -q for e, q in other.pieces.items()})
        return self + neg

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.pieces.values())

    @property
    def breakpoints(self) -> list[Fraction]:
        return [self.h * e for e in range(self.N + 1)]


@lru_cache(maxsize=None)
def local_basis(p: int, rel_knots: tuple) -> tuple:
    """Active degree-``p`` basis on one element, in the local variable ``u``.

    Parameters
    ----------
    rel_knots : tuple of int
        The ``2p+2`` knots ``tau_e .. tau_{e+2p+1}`` minus the element's left
        end, in units of ``h``; the element itself is ``[rel[p], rel[p+1]] = [0, 1]``.

    Returns
    -------
    tuple of Poly
        ``p+1`` polynomials, for the basis functions ``e .. e+p``.
    """
    u = Poly.x()
    r = rel_knots
    # B[i] holds the degree-q function starting at knot index i (local index)
    funcs = {p: Poly([1])}
    for q in range(1, p + 1):
        new = {}
        for i in range(p - q, p + 1):
            acc = Poly()
            left = funcs.get(i)
            if left is not None:
                den = r[i + q] - r[i]
                if den:  # 0/0 terms are dropped
                    acc = acc + (u - r[i]) * Fraction(1, den) * left
            right = funcs.get(i + 1)
            if right is not None:
                den = r[i + q + 1] - r[i + 1]
                if den:
                    acc = acc + (Poly([r[i + q + 1]]) - u) * Fraction(1, den) * right
            new[i] = acc
        funcs = new
    return tuple(funcs[i] for i in range(p + 1))


class SplineBasis:
    """All ``N+p`` B-splines of degree ``p`` on the open uniform knot vector.

    Attributes
    ----------
    knot_vector : KnotVector
    elements : list of tuple of Poly
        ``elements[e][a]`` is basis function ``e + a`` on element ``e``.
    """

    def __init__(self, knot_vector: KnotVector):
        self.knot_vector = knot_vector
        p, N = knot_vector.p, knot_vector.N
        idx = knot_vector.index_knots()
        self.elements = []
        for e in range(N):
            rel = tuple(idx[e + i] - e for i in range(2 * p + 2))
            self.elements.append(local_basis(p, rel))

    @property
    def p(self) -> int:
        return self.knot_vector.p

    @property
    def N(self) -> int:
        return self.knot_vector.N

    @property
    def h(self) -> Fraction:
        return self.knot_vector.h

    def __len__(self) -> int:
        return self.N + self.p

    def support(self, j: int) -> range:
        """Element indices where ``phi_j`` may be nonzero."""
        return range(max(0, j - self.p), min(self.N, j + 1))

    def function(self, j: int) -> PiecewisePolynomial:
        if not 0 <= j < len(self):
            raise IndexError("basis index out of range")
        pieces = {e: self.elements[e][j - e] for e in self.support(j)}
        return PiecewisePolynomial(self.h, self.N, pieces)

    @property
    def functions(self) -> list[PiecewisePolynomial]:
        return [self.function(j) for j in range(len(self))]

    def to_json(self) -> str:
        """Breakpoints and per-element local coefficients, Rationals as strings."""
        data = {
            "p": self.p,
            "N": self.N,
            "T": format_rational(self.knot_vector.T),
            "breakpoints": [format_rational(b) for b in self.knot_vector.knots[self.p : self.p + self.N + 1]],
            "local_variable": "u = (t - t_e) / h",
            "functions": [
                {
                    "index": j,
                    "pieces": {
                        str(e): [format_rational(c) for c in q.c]
                        for e, q in self.function(j).pieces.items()
                    },
                }
                for j in range(len(self))
            ],
        }
        return json.dumps(data, indent=1)


def build_basis(p: int, N: int, T) -> SplineBasis:
    """Build the open-knot spline basis of degree ``p`` with ``N`` elements on ``[0, T]``."""
    return SplineBasis(KnotVector(p, N, as_rational(T)))


@lru_cache(maxsize=4096)
def _local_inner(a: Poly, b: Poly, k1: int, k2: int) -> Fraction:
    return (a.deriv(k1) * b.deriv(k2)).integrate(0, 1)


def basis_inner(basis: SplineBasis, i: int, j: int, k1: int, k2: int) -> Fraction:
    """Exact ``int_0^T d^k1 phi_i  d^k2 phi_j dt``."""
    n = len(basis)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("basis index out of range")
    if not (0 <= k1 <= basis.p and 0 <= k2 <= basis.p):
        raise ValueError("derivative orders must lie in [0, p]")
    lo = max(i, j) - basis.p
    hi = min(i, j)
    acc = Fraction(0)
    for e in range(max(lo, 0), min(hi, basis.N - 1) + 1):
        loc = basis.elements[e]
        acc += _local_inner(loc[i - e], loc[j - e], k1, k2)
    return acc * basis.h ** (1 - k1 - k2)


def central_identity_holds(basis: SplineBasis, j: int) -> bool:
    """Check ``phi_j(t) == Phi_p(t/h - j + p)`` piece by piece."""
    p = basis.p
    pieces = cardinal_spline(p).pieces
    f = basis.function(j)
    for e in range(basis.N):
        m = e - j + p
        expected = pieces[m].shift(m) if 0 <= m <= p else Poly()
        if f.pieces.get(e, Poly()) != expected:
            return False
    return True
