"""Dense univariate polynomials with exact rational coefficients.

A small immutable type used by the spline code (pieces in a local variable),
by the Chebyshev transform and by the Sturm root counter.  Coefficients are
stored lowest degree first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["Poly", "sturm_sequence", "count_roots_interval", "squarefree_chain"]


def _trim(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Polynomial ``sum_i c[i] x**i`` with :class:`Fraction` coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        self.c = _trim([Fraction(a) for a in coeffs])

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Poly":
        obj = cls.__new__(cls)
        obj.c = coeffs
        return obj

    @classmethod
    def constant(cls, a) -> "Poly":
        return cls([a])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.c) - 1

    @property
    def lead(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, i: int) -> Fraction:
        return self.c[i] if 0 <= i < len(self.c) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == Poly([other]).c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        return f"Poly({[str(a) for a in self.c]})"

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return Poly._raw(_trim(out))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(tuple(-a for a in self.c))

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly([other]) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            s = Fraction(other)
            if s == 0:
                return Poly._raw(())
            return Poly._raw(tuple(a * s for a in self.c))
        if not self.c or not other.c:
            return Poly._raw(())
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                out[i + j] += a * b
        return Poly._raw(_trim(out))

    __rmul__ = __mul__

    def __call__(self, x):
        """Horner evaluation; works for Fraction, float, complex or mpmath input."""
        acc = 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def evalf(self, x: float) -> float:
        acc = 0.0
        for a in reversed(self.c):
            acc = acc * x + float(a)
        return acc

    def deriv(self, k: int = 1) -> "Poly":
        c = self.c
        for _ in range(k):
            c = tuple(i * c[i] for i in range(1, len(c)))
        return Poly._raw(c)

    def antideriv(self) -> "Poly":
        return Poly._raw((Fraction(0),) + tuple(a / (i + 1) for i, a in enumerate(self.c)))

    def integrate(self, a=0, b=1) -> Fraction:
        """Exact definite integral over ``[a, b]``."""
        anti = self.antideriv()
        return anti(Fraction(b)) - anti(Fraction(a))

    def shift(self, a) -> "Poly":
        """Return ``x -> self(x + a)``."""
        a = Fraction(a)
        out = Poly()
        for coef in reversed(self.c):
            out = out * Poly([a, 1]) + coef
        return out

    def scale_var(self, s) -> "Poly":
        """Return ``x -> self(s * x)``."""
        s = Fraction(s)
        return Poly._raw(tuple(a * s**i for i, a in enumerate(self.c)))

    def compose(self, other: "Poly") -> "Poly":
        out = Poly()
        for coef in reversed(self.c):
            out = out * other + coef
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        dq = len(rem) - len(other.c)
        if dq < 0:
            return Poly(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.c[-1]
        for i in range(dq, -1, -1):
            f = rem[i + len(other.c) - 1] / lead
            quot[i] = f
            if f:
                for j, b in enumerate(other.c):
                    rem[i + j] -= f * b
        return Poly(quot), Poly(rem[: len(other.c) - 1])

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def monic(self) -> "Poly":
        return self * (1 / self.lead) if self.c else self

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def to_float_list(self) -> list[float]:
        return [float(a) for a in self.c]


def squarefree_chain(p: Poly) -> list[Poly]:
    """Return ``[p, gcd(p, p'), gcd(g1, g1'), ...]`` down to a constant.

    A root of multiplicity ``r`` is a root of exactly the first ``r`` members.
    """
    chain = [p]
    g = p
    while g.degree > 0:
        g = g.gcd(g.deriv())
        if g.degree <= 0:
            break
        chain.append(g)
    return chain


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.deriv()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        seq.append(-(seq[-2] % seq[-1]))
    return [s for s in seq if not s.is_zero()]


def _sign_changes(seq: Sequence[Poly], x: Fraction) -> int:
    signs = [v > 0 for v in (s(x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_interval(p: Poly, a, b) -> int:
    """Number of distinct real roots of ``p`` in the closed interval ``[a, b]``.

    Exact: endpoint roots are divided out first, then a Sturm sequence of the
    squarefree part counts the roots in the open interval.
    """
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("need a < b")
    if p.is_zero():
        raise ValueError("zero polynomial has no finite root count")
    if p.degree == 0:
        return 0
    q = p // p.gcd(p.deriv())  # squarefree part
    count = 0
    for end in (a, b):
        if q(end) == 0:
            count += 1
            q = q // Poly([-end, 1])
    if q.degree <= 0:
        return count
    seq = sturm_sequence(q)
    return count + _sign_changes(seq, a) - _sign_changes(seq, b)
