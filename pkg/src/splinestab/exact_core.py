"""Exact rational scalars, Bernoulli numbers and even zeta values.

All exact quantities in the package are :class:`fractions.Fraction`
instances.  Values of the Riemann zeta function at even integers enter only
through the rational numbers ``zeta(2m) / pi**(2m)``, so every threshold
derived from them stays exact.
"""

from __future__ import annotations

import re
import threading
from fractions import Fraction
from math import comb, factorial

import mpmath

__all__ = [
    "Rational",
    "as_rational",
    "format_rational",
    "bernoulli",
    "zeta_even_coeff",
    "odd_half_integer_sum_coeff",
    "compare_pi_power",
    "pi_power_interval",
]

Rational = Fraction

_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def as_rational(value) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings may use the ``"a/b"`` syntax or plain decimal notation
    (``"0.25"``, ``"-1e-3"``); decimal strings are read exactly, not through
    a binary float.  Floats are converted exactly as well.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        if _DECIMAL.match(text):
            return Fraction(text)
        raise ValueError(f"not a rational number: {value!r}")
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    """Serialize ``q`` as a ``"num/den"`` string (denominator always written)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


_bernoulli_cache: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli(m: int) -> Fraction:
    """Return the Bernoulli number ``B_m`` with the convention ``B_1 = -1/2``.

    Uses the recurrence ``sum_{j=0}^{m} C(m+1, j) B_j = 0``, memoized across
    calls.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m < len(_bernoulli_cache):
        return _bernoulli_cache[m]
    with _bernoulli_lock:
        cache = _bernoulli_cache
        while len(cache) <= m:
            n = len(cache)
            if n > 1 and n % 2 == 1:
                cache.append(Fraction(0))
                continue
            acc = sum(comb(n + 1, j) * cache[j] for j in range(n))
            cache.append(-acc / (n + 1))
        return cache[m]


def zeta_even_coeff(m: int) -> Fraction:
    """Return ``zeta(2m) / pi**(2m)`` as an exact rational, ``m >= 1``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    sign = 1 if m % 2 == 1 else -1
    return sign * bernoulli(2 * m) * 2 ** (2 * m - 1) / factorial(2 * m)


def odd_half_integer_sum_coeff(m: int) -> Fraction:
    """Return ``sum_{j in Z} (pi + 2 j pi)**(-2m)``, which is rational.

    Equivalently ``(2**(2m) - 1) / 2**(2m-1) * zeta(2m) / pi**(2m)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return Fraction(2 ** (2 * m) - 1, 2 ** (2 * m - 1)) * zeta_even_coeff(m)


_iv_lock = threading.Lock()


def pi_power_interval(k: int, dps: int = 100):
    """Interval enclosure of ``pi**k`` at ``dps`` decimal digits."""
    iv = mpmath.iv
    with _iv_lock:
        saved = iv.dps
        iv.dps = dps
        try:
            return iv.pi ** k
        finally:
            iv.dps = saved


def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    val = Fraction(int(man)) * (Fraction(2) ** exp)
    return -val if sign else val


def compare_pi_power(q, k: int, dps: int = 100, max_dps: int = 100_000) -> int:
    """Return the sign of ``q - pi**k`` for a rational ``q``.

    ``pi**k`` is enclosed in an interval whose endpoints are converted to
    exact rationals; the working precision doubles until ``q`` lies outside
    the enclosure.  ``pi**k`` is irrational for ``k != 0``, so the loop
    terminates for every rational input.
    """
    q = as_rational(q)
    if k == 0:
        return (q > 1) - (q < 1)
    while dps <= max_dps:
        lo, hi = (_raw_to_fraction(r) for r in pi_power_interval(k, dps)._mpi_)
        if q < lo:
            return -1
        if q > hi:
            return 1
        dps *= 2
    raise ArithmeticError("could not separate q from pi**k")
