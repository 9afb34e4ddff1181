"""Spline symbols, the function F_p and the sharp thresholds rho_p, delta_p^k.

The symbols are the trigonometric polynomials generated by the Toeplitz band
of the mass, stiffness and ``k``-th derivative matrices, e.g.

    M_p(theta) = Phi(p+1) + sum_{j=1}^{p} Phi(p+1-j) 2 cos(j theta)

with ``Phi = Phi_{2p+1}``.  At ``theta = pi`` the cosines are ``+-1`` and the
values are exact rationals; they are also available in closed form through
even zeta values, and both routes are compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .cardinal import cardinal_eval
from .exact_core import as_rational, compare_pi_power, zeta_even_coeff

__all__ = [
    "SymbolValue",
    "Thresholds",
    "symbol_eval",
    "symbol_at_pi_exact",
    "symbol_at_pi_zeta",
    "symbol_at_pi_finite",
    "F_eval",
    "F_at_pi_exact",
    "threshold_rho",
    "threshold_delta",
    "thresholds",
    "monotonicity_check",
    "zero_count_F",
    "c_M",
    "rho_exceeds_pi2",
    "RouteMismatch",
]


class RouteMismatch(AssertionError):
    """The finite-sum and closed-form values at pi disagree."""


@dataclass(frozen=True)
class SymbolValue:
    theta: float
    M: float
    B: float
    D_k: float


@lru_cache(maxsize=None)
def _band_values(p: int, order: int) -> tuple:
    """``d^order Phi_{2p+1}(p+1-j)`` for ``j = 0..p``."""
    q = 2 * p + 1
    return tuple(cardinal_eval(q, order, p + 1 - j) for j in range(p + 1))


def _symbol(p: int, order: int, theta) -> float:
    vals = _band_values(p, order)
    j = np.arange(1, p + 1)
    theta = np.asarray(theta, dtype=float)
    cos = np.cos(np.multiply.outer(theta, j))
    return float(vals[0]) + cos @ (2.0 * np.array([float(v) for v in vals[1:]]))


def symbol_eval(p: int, k: int, theta) -> SymbolValue:
    """Evaluate ``M_p``, ``B_p`` and ``D_p^k`` at ``theta`` by the finite cosine sums."""
    if p < 1 or not 0 <= k <= p:
        raise ValueError("need p >= 1 and 0 <= k <= p")
    th = float(theta)
    return SymbolValue(
        th,
        float(_symbol(p, 0, th)),
        float(_symbol(p, 2, th)),
        float(_symbol(p, 2 * k, th)),
    )


def _finite_at_pi(p: int, order: int) -> Fraction:
    vals = _band_values(p, order)
    return vals[0] + sum(2 * v * (-1) ** j for j, v in enumerate(vals) if j > 0)


def symbol_at_pi_finite(p: int, k: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(M, B, D_k)`` at ``pi`` from the finite sums with exact spline values."""
    return _finite_at_pi(p, 0), _finite_at_pi(p, 2), _finite_at_pi(p, 2 * k)


def _mass_at_pi_zeta(p: int) -> Fraction:
    # M_p(pi) = 2 (2^{2p+2} - 1) zeta(2p+2) / pi^{2p+2}; p = 0 gives 1
    return 2 * (2 ** (2 * p + 2) - 1) * zeta_even_coeff(p + 1)


def symbol_at_pi_zeta(p: int, k: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(M, B, D_k)`` at ``pi`` from the even zeta closed forms."""
    M = _mass_at_pi_zeta(p)
    B = -8 * (2 ** (2 * p) - 1) * zeta_even_coeff(p)
    D = (-1) ** k * 2 ** (2 * k) * _mass_at_pi_zeta(p - k)
    return M, B, D


def symbol_at_pi_exact(p: int, k: int) -> tuple[Fraction, Fraction, Fraction]:
    """Exact ``(M, B, D_k)`` at ``pi``; both routes must agree.

    Raises
    ------
    RouteMismatch
        If the finite-sum and zeta routes differ.
    """
    if p < 1 or not 0 <= k <= p:
        raise ValueError("need p >= 1 and 0 <= k <= p")
    a = symbol_at_pi_finite(p, k)
    b = symbol_at_pi_zeta(p, k)
    if a != b:
        raise RouteMismatch(f"symbol routes disagree for p={p}, k={k}: {a} != {b}")
    return a


def F_eval(p: int, k: int, theta, rho, delta) -> float:
    """``F = B_p + rho (M_p + delta (-1)^k D_p^k)`` at ``theta`` (vectorized in theta)."""
    sign = -1.0 if k % 2 else 1.0
    M = _symbol(p, 0, theta)
    B = _symbol(p, 2, theta)
    D = _symbol(p, 2 * k, theta)
    return B + float(rho) * (M + float(delta) * sign * D)


def F_at_pi_exact(p: int, k: int, rho, delta) -> Fraction:
    M, B, D = symbol_at_pi_exact(p, k)
    rho, delta = as_rational(rho), as_rational(delta)
    return B + rho * (M + delta * (-1) ** k * D)


def threshold_rho(p: int, check: bool = True) -> Fraction:
    """``rho_p = -B_p(pi) / M_p(pi)`` as an exact rational.

    The zeta route gives ``4 (2^{2p}-1)/(2^{2p+2}-1) zeta(2p)/zeta(2p+2) pi^2``
    where the powers of pi cancel; ``check`` compares with the finite sums.
    """
    if p < 1:
        raise ValueError("need p >= 1")
    M, B, _ = symbol_at_pi_zeta(p, 0)
    rho = -B / M
    if check:
        Mf, Bf, _ = symbol_at_pi_finite(p, 0)
        if -Bf / Mf != rho:
            raise RouteMismatch(f"threshold_rho routes disagree for p={p}")
    return rho


def threshold_delta(p: int, k: int | None = None, check: bool = True) -> Fraction:
    """``delta_p^k = -M_p(pi) / ((-1)^k D_p^k(pi))``; ``k`` defaults to ``p``."""
    k = p if k is None else k
    if p < 1 or not 1 <= k <= p:
        raise ValueError("need 1 <= k <= p")
    M, _, D = symbol_at_pi_zeta(p, k)
    delta = -M / ((-1) ** k * D)
    if check:
        Mf, _, Df = symbol_at_pi_finite(p, k)
        if -Mf / ((-1) ** k * Df) != delta:
            raise RouteMismatch(f"threshold_delta routes disagree for p={p}, k={k}")
    return delta


@dataclass(frozen=True)
class Thresholds:
    p: int
    rho_p: Fraction
    delta_p: Fraction
    delta_p_k: dict = field(default_factory=dict)


def thresholds(p: int) -> Thresholds:
    table = {k: threshold_delta(p, k) for k in range(1, p + 1)}
    return Thresholds(p, threshold_rho(p), table[p], table)


def rho_exceeds_pi2(p: int) -> bool:
    """Exact decision of ``rho_p > pi^2`` with an interval enclosure of pi."""
    return compare_pi_power(threshold_rho(p, check=False), 2) > 0


def monotonicity_check(p: int, k: int, rho, delta, grid_size: int = 1024) -> bool:
    """True iff ``F / M_p`` strictly decreases on a uniform grid inside ``(0, pi)``."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    theta = np.pi * np.arange(1, grid_size + 1) / (grid_size + 1)
    ratio = F_eval(p, k, theta, rho, delta) / _symbol(p, 0, theta)
    return bool(np.all(np.diff(ratio) < 0))


def zero_count_F(p: int, k: int, rho, delta) -> int:
    """Number of zeros of ``F`` in ``[-pi, pi]`` under the monotone regime.

    ``F(0) = rho > 0`` and ``F/M`` decreases on ``(0, pi)``, so there are two
    zeros (one per half period, counted by even symmetry) iff ``F(pi) <= 0``;
    the sign of ``F(pi)`` is decided exactly.
    """
    rho, delta = as_rational(rho), as_rational(delta)
    if delta > 0:
        raise ValueError("delta > 0 lies outside the proven monotone regime")
    if rho <= 0:
        raise ValueError("rho must be positive")
    return 2 if F_at_pi_exact(p, k, rho, delta) <= 0 else 0


def c_M(M: int, dps: int = 50):
    """``C_M = pi^{2M-2} / ((1 - 2^{-2M}) zeta(2M))`` in high precision."""
    if M < 1:
        raise ValueError("need M >= 1")
    with mpmath.workdps(dps):
        z = zeta_even_coeff(M)
        factor = 1 - mpmath.mpf(2) ** (-2 * M)
        return +(1 / (factor * mpmath.mpf(z.numerator) / z.denominator * mpmath.pi**2))
