"""Invariant suite behind the ``verify`` subcommand.

Every check returns ``(name, ok, detail)``; sizes are kept small so the whole
suite runs in well under a minute.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import mpmath

from .cardinal import cardinal_eval, cardinal_inner, cardinal_spline
from .exact_core import bernoulli, compare_pi_power, zeta_even_coeff
from .galerkin import assemble, scaled_system, structure_report, system_matrix
from .polynomial import Poly
from .spline_space import build_basis, central_identity_holds
from .symbols import symbol_at_pi_exact, threshold_rho, zero_count_F
from .toeplitz import (
    SelfReciprocalPolynomial,
    chebyshev_transform,
    classify_roots,
    conditioning_verdict,
    exact_type,
)
from .galerkin import band_spec

__all__ = ["run_checks", "CHECKS"]


def _bernoulli_recurrence():
    bad = [m for m in range(1, 41) if sum(comb(m + 1, j) * bernoulli(j) for j in range(m + 1)) != 0]
    return not bad, f"failures at {bad}" if bad else "m = 1..40"


def _zeta_bounds():
    with mpmath.workdps(100):
        for m in range(1, 21):
            z = zeta_even_coeff(m)
            val = mpmath.mpf(z.numerator) / z.denominator * mpmath.pi ** (2 * m)
            if not (z > 0 and 1 < val < 1 + mpmath.mpf(1) / (2 * m - 1)):
                return False, f"bound fails at m={m}"
    return True, "m = 1..20"


def _zeta_ratio():
    for m in range(1, 51):
        # Z(m+1)/Z(m) pi^2 < 4(2^{2m}-1)/(2^{2m+2}-1)  <=>  pi^2 < bound * Z(m)/Z(m+1)
        bound = Fraction(4 * (2 ** (2 * m) - 1), 2 ** (2 * m + 2) - 1) * zeta_even_coeff(m) / zeta_even_coeff(m + 1)
        if compare_pi_power(bound, 2) <= 0:
            return False, f"fails at m={m}"
    return True, "m = 1..50"


def _partition_of_unity():
    rng = random.Random(0)
    for p in range(0, 12):
        for _ in range(20):
            s = Fraction(rng.randint(0, 1000 * (p + 1)), 1000)
            total = sum(cardinal_eval(p, 0, s - j) for j in range(-p - 2, p + 3))
            if total != 1:
                return False, f"p={p}, s={s}"
    return True, "p = 0..11"


def _continuity():
    for p in range(1, 12):
        pieces = cardinal_spline(p).pieces
        for k in range(p):
            for j in range(1, p + 1):
                if pieces[j - 1].deriv(k)(j) != pieces[j].deriv(k)(j):
                    return False, f"p={p}, k={k}, knot {j}"
    return True, "p = 1..11"


def _inner_symmetry():
    for p in range(1, 9):
        for k1 in range(p + 1):
            for k2 in range(p + 1):
                for j in range(-p - 1, p + 2):
                    if cardinal_inner(p, k1, k2, j) != cardinal_inner(p, k2, k1, -j):
                        return False, f"p={p}, ({k1},{k2},{j})"
    return True, "p = 1..8"


def _basis_identities():
    for p in range(1, 6):
        for N in (p, 2 * p + 1, 12):
            basis = build_basis(p, N, N)
            for e, loc in enumerate(basis.elements):
                if sum(loc, Poly()) != Poly([1]):
                    return False, f"partition p={p}, N={N}, element {e}"
            for j in range(p, N):
                if not central_identity_holds(basis, j):
                    return False, f"central p={p}, N={N}, j={j}"
    return True, "p = 1..5"


def _matrix_structure():
    for p in range(1, 6):
        for N in (3 * p + 1, 3 * p + 4):
            for kind, k in (("mass", 0), ("stiffness", 1), ("deriv", p)):
                mat = assemble(p, N, 1, kind, k)
                rep = structure_report(mat)
                if not rep.is_persymmetric or not rep.band_rows_match:
                    return False, f"p={p}, N={N}, {kind}"
                if p > 1 and rep.corner_anomaly_count != 2 * p * p - 3:
                    return False, f"anomalies p={p}, N={N}, {kind}: {rep.corner_anomaly_count}"
            if assemble(p, N, 1, "deriv", 0) != assemble(p, N, 1, "mass"):
                return False, "D^{p,0} != M"
            if assemble(p, N, 1, "deriv", 1) != assemble(p, N, 1, "stiffness"):
                return False, "D^{p,1} != B"
    return True, "p = 1..5"


def _scale_independence():
    for p in range(1, 5):
        N = 3 * p + 2
        ref = None
        for h in (Fraction(1), Fraction(1, 3), Fraction(7, 5)):
            mats = (
                assemble(p, N, h * N, "mass").scale(1 / h),
                assemble(p, N, h * N, "stiffness").scale(h),
                assemble(p, N, h * N, "deriv", p).scale(h ** (2 * p - 1)),
            )
            if ref is None:
                ref = mats
            elif mats != ref:
                return False, f"p={p}, h={h}"
        rho, delta = Fraction(7, 3), Fraction(-1, 50)
        a = system_matrix(p, N, N, rho, delta, p)
        b = system_matrix(p, N, Fraction(N, 2), 4 * rho, delta, p).scale(Fraction(1, 2))
        if a != b or a != scaled_system(p, N + p - 1, rho, delta, p):
            return False, f"scaled system p={p}"
    return True, "p = 1..4"


def _dual_route():
    for p in range(1, 9):
        for k in range(1, p + 1):
            symbol_at_pi_exact(p, k)
    return True, "p = 1..8, 1 <= k <= p"


def _rho_above_pi2():
    for p in range(1, 51):
        if compare_pi_power(threshold_rho(p, check=False), 2) <= 0:
            return False, f"p={p}"
    return True, "p = 1..50"


def _classification_routes():
    rng = random.Random(1)
    for p in range(1, 4):
        for _ in range(10):
            rho = Fraction(rng.randint(1, 4000), rng.randint(1, 40))
            delta = -Fraction(rng.randint(0, 100), rng.randint(1, 10**p * 100))
            spec = band_spec(p, rho, delta, p)
            q = SelfReciprocalPolynomial.from_coeffs(spec.coeffs)
            exact = conditioning_verdict(exact_type(q), spec.m, spec.k)
            flt = conditioning_verdict(classify_roots(spec.coeffs), spec.m, spec.k)
            if exact.cls != flt.cls:
                return False, f"p={p}, rho={rho}, delta={delta}"
            u2 = exact.evidence.u == 2
            if u2 != (zero_count_F(p, p, rho, delta) == 2):
                return False, f"zero count p={p}, rho={rho}, delta={delta}"
    return True, "p = 1..3, 10 random pairs each"


def _chebyshev_identity():
    rng = random.Random(2)
    for _ in range(20):
        p = rng.randint(1, 6)
        g = [Fraction(rng.randint(1, 9))] + [Fraction(rng.randint(-9, 9)) for _ in range(p)]
        q = SelfReciprocalPolynomial(tuple(g))
        t = chebyshev_transform(q)
        for _ in range(5):
            z = Fraction(rng.choice([-1, 1]) * rng.randint(1, 50), rng.randint(1, 50))
            if z**p * t(z + 1 / z) != q(z):
                return False, f"g={g}, z={z}"
    return True, "20 random polynomials"


CHECKS = [
    ("bernoulli recurrence", _bernoulli_recurrence),
    ("even zeta bounds", _zeta_bounds),
    ("zeta ratio inequality", _zeta_ratio),
    ("cardinal partition of unity", _partition_of_unity),
    ("cardinal continuity", _continuity),
    ("cardinal inner symmetry", _inner_symmetry),
    ("basis identities", _basis_identities),
    ("matrix structure", _matrix_structure),
    ("scale independence", _scale_independence),
    ("symbol dual route", _dual_route),
    ("rho_p above pi^2", _rho_above_pi2),
    ("classification routes", _classification_routes),
    ("chebyshev identity", _chebyshev_identity),
]


def run_checks() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, never hide
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
