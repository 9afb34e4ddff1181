"""Conditioning of perturbed Toeplitz band families.

A family of band Toeplitz matrices with coefficients ``c_{-m} .. c_k`` is
classified by the location of the zeros of its associated polynomial
``q(z) = sum_j c_j z^{m+j}``.  For self-reciprocal polynomials the unit
circle zeros are counted exactly through the Chebyshev transform and a
Sturm sequence; a floating companion-matrix route is kept as cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact_core import as_rational
from .polynomial import Poly, count_roots_interval, squarefree_chain

__all__ = [
    "BandSpec",
    "AssociatedPolynomial",
    "SelfReciprocalPolynomial",
    "TypeTriple",
    "ConditioningVerdict",
    "HypothesisViolation",
    "assoc_poly",
    "classify_roots",
    "exact_type",
    "conditioning_verdict",
    "chebyshev_transform",
    "count_roots_interval",
    "boundary_products",
    "classify_family",
    "classify_system",
    "casorati_G2",
    "CasoratiResult",
    "multiplicity_factors",
]


class HypothesisViolation(ValueError):
    """An outer codiagonal has a zero entry and no band reduction applies."""


@dataclass(frozen=True)
class BandSpec:
    """Toeplitz band ``c_{-m} .. c_k`` with lower width ``m`` and upper width ``k``."""

    m: int
    k: int
    coeffs: tuple
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        coeffs = tuple(as_rational(c) if not isinstance(c, float) else c for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.m + self.k + 1:
            raise ValueError("need m + k + 1 coefficients")
        if self.m < 0 or self.k < 0:
            raise ValueError("band widths must be non-negative")
        if self.validate and (coeffs[0] == 0 or coeffs[-1] == 0):
            raise ValueError("invalid BandSpec: outer coefficients must be nonzero")

    def coeff(self, d: int):
        """Coefficient on the ``d``-th codiagonal, zero outside the band."""
        if -self.m <= d <= self.k:
            return self.coeffs[d + self.m]
        return 0

    def trimmed(self) -> "BandSpec":
        """Drop vanishing outer coefficients, shrinking ``m`` and ``k``."""
        c = list(self.coeffs)
        m, k = self.m, self.k
        while c and c[0] == 0 and m > 0:
            c.pop(0)
            m -= 1
        while c and c[-1] == 0 and k > 0:
            c.pop()
            k -= 1
        return BandSpec(m, k, tuple(c))

    def toeplitz(self, n: int) -> np.ndarray:
        out = np.zeros((n, n))
        for d in range(-self.m, self.k + 1):
            out += float(self.coeff(d)) * np.eye(n, k=d)
        return out


@dataclass(frozen=True)
class AssociatedPolynomial:
    """``q(z) = sum_{j=-m}^{k} c_j z^{m+j}``, coefficients lowest degree first."""

    coeffs: tuple
    m: int
    k: int

    @property
    def degree(self) -> int:
        return self.m + self.k

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs)

    def poly(self) -> Poly:
        return Poly(self.coeffs)

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def is_self_reciprocal(self) -> bool:
        return tuple(self.coeffs) == tuple(reversed(self.coeffs))


@dataclass(frozen=True)
class SelfReciprocalPolynomial:
    """Palindromic polynomial of degree ``2p`` given by ``g_0 .. g_p``."""

    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(as_rational(c) for c in self.g))
        if not self.g or self.g[0] == 0:
            raise ValueError("invalid self-reciprocal polynomial: g_0 must be nonzero")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "SelfReciprocalPolynomial":
        coeffs = [as_rational(c) for c in coeffs]
        if len(coeffs) % 2 != 1 or coeffs != coeffs[::-1]:
            raise ValueError("coefficients are not palindromic of even degree")
        return cls(tuple(coeffs[: len(coeffs) // 2 + 1]))

    @property
    def p(self) -> int:
        return len(self.g) - 1

    @property
    def coeffs(self) -> tuple:
        return self.g + tuple(reversed(self.g[:-1]))

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


@dataclass(frozen=True)
class TypeTriple:
    s: int
    u: int
    l: int
    eta: int = 0

    def as_list(self) -> list[int]:
        return [self.s, self.u, self.l]


@dataclass(frozen=True)
class ConditioningVerdict:
    """Verdict ``well``, ``weak`` (with ``eta``) or ``exponential``.

    ``covered`` is false for types the classification theorem leaves open
    (all zeros on the unit circle); those are reported as ``weak``.
    """

    cls: str
    evidence: TypeTriple
    eta: int | None = None
    covered: bool = True
    route: str = "float"
    fallback: bool = False

    def label(self) -> str:
        return f"weak({self.eta})" if self.cls == "weak" else self.cls


def assoc_poly(spec: BandSpec) -> AssociatedPolynomial:
    if spec.coeffs[0] == 0 or spec.coeffs[-1] == 0:
        raise ValueError("invalid BandSpec: outer coefficients must be nonzero")
    return AssociatedPolynomial(tuple(spec.coeffs), spec.m, spec.k)


def _coeff_list(q) -> list:
    if isinstance(q, (AssociatedPolynomial, SelfReciprocalPolynomial)):
        return list(q.coeffs)
    if isinstance(q, Poly):
        return list(q.c)
    return list(q)


def _cluster(roots: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Group roots closer than ``tol``; returns (centroid, multiplicity)."""
    remaining = list(roots)
    out = []
    while remaining:
        z = remaining.pop(0)
        group = [z]
        changed = True
        while changed:
            changed = False
            for w in list(remaining):
                if min(abs(w - g) for g in group) <= tol:
                    group.append(w)
                    remaining.remove(w)
                    changed = True
        out.append((complex(np.mean(group)), len(group)))
    return out


def classify_roots(q, unit_tol: float | None = None, cluster_tol: float | None = None) -> TypeTriple:
    """Root type ``(s, u, l)`` from companion-matrix eigenvalues.

    A root is on the unit circle when ``||z| - 1| <= unit_tol``.  Multiple
    roots split at about ``eps^(1/r)`` in floating point, so roots closer than
    ``cluster_tol`` (default ``1e-5``, scaled like ``unit_tol``) are merged and
    their centroid is classified.
    """
    coeffs = [float(c) for c in _coeff_list(q)]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise ValueError("degree must be at least 1")
    lead0 = abs(coeffs[0]) if coeffs[0] != 0 else 1.0
    scale = 1 + max(abs(c) for c in coeffs) / lead0
    if unit_tol is None:
        unit_tol = 1e-8 * scale
    if cluster_tol is None:
        cluster_tol = 1e-5 * scale
    roots = np.roots(coeffs[::-1])
    if not np.all(np.isfinite(roots)) or len(roots) != len(coeffs) - 1:
        raise ArithmeticError("root finding failed")
    s = u = l = eta = 0
    for z, mult in _cluster(roots, cluster_tol):
        r = abs(z)
        if abs(r - 1) <= unit_tol:
            u += mult
            eta = max(eta, mult)
        elif r < 1:
            s += mult
        else:
            l += mult
    return TypeTriple(s, u, l, eta)


def chebyshev_transform(q: SelfReciprocalPolynomial) -> Poly:
    """``Tq(x) = sum_{j<p} 2 g_j T_{p-j}(x/2) + g_p``; satisfies ``z^p Tq(z + 1/z) = q(z)``."""
    if not isinstance(q, SelfReciprocalPolynomial):
        q = SelfReciprocalPolynomial.from_coeffs(_coeff_list(q))
    p = q.p
    # C_n(x) = 2 T_n(x/2): C_0 = 2, C_1 = x, C_{n+1} = x C_n - C_{n-1}
    cheb = [Poly([2]), Poly.x()]
    for _ in range(2, p + 1):
        cheb.append(Poly.x() * cheb[-1] - cheb[-2])
    out = Poly([q.g[p]])
    for j in range(p):
        out = out + cheb[p - j] * q.g[j]
    return out


def exact_type(q: SelfReciprocalPolynomial) -> TypeTriple:
    """Exact root type of a self-reciprocal polynomial.

    Each root of ``Tq`` in ``(-2, 2)`` of multiplicity ``r`` gives a conjugate
    pair of unit zeros of multiplicity ``r``; a root at ``+-2`` of
    multiplicity ``r`` gives ``z = +-1`` with multiplicity ``2r``.
    """
    t = chebyshev_transform(q)
    chain = squarefree_chain(t)
    u = 0
    eta = 0
    for r, g in enumerate(chain, start=1):
        closed = count_roots_interval(g, -2, 2)
        ends = sum(1 for e in (-2, 2) if g(Fraction(e)) == 0)
        inner = closed - ends
        u += 2 * inner + 2 * ends
        if inner:
            eta = max(eta, r)
        if ends:
            eta = max(eta, 2 * r)
    deg = 2 * q.p
    s = (deg - u) // 2
    return TypeTriple(s, u, s, eta)


def conditioning_verdict(t: TypeTriple, m: int, k: int, route: str = "float") -> ConditioningVerdict:
    """Apply the root-type classification to a family with widths ``(m, k)``."""
    if t.s + t.u + t.l != m + k:
        raise ValueError("type triple inconsistent with degree m + k")
    if t.u == 0 and t.s == m and t.l == k:
        return ConditioningVerdict("well", t, None, True, route)
    if t.u > 0 and (t.l == k or t.s == m):
        return ConditioningVerdict("weak", t, t.eta, True, route)
    if t.s + t.l > 0:
        return ConditioningVerdict("exponential", t, None, True, route)
    # every zero on the unit circle: outside the theorem
    return ConditioningVerdict("weak", t, t.eta, False, route)


def boundary_products(q: SelfReciprocalPolynomial) -> tuple[Fraction, Fraction, bool]:
    """``(prod (x_j - 2), prod (x_j + 2), necessary condition)`` over roots of ``Tq``."""
    if not isinstance(q, SelfReciprocalPolynomial):
        q = SelfReciprocalPolynomial.from_coeffs(_coeff_list(q))
    p, g0 = q.p, q.g[0]
    q1, qm1 = q(Fraction(1)), q(Fraction(-1))
    prod_minus = (-1) ** p * q1 / g0
    prod_plus = qm1 / g0
    ok = (-1) ** p * qm1 * q1 <= 0
    return prod_minus, prod_plus, ok


def _check_block(block, m: int, k: int) -> None:
    if block is None:
        return
    size = len(block)
    for d in (-m, k):
        for r in range(size):
            c = r + d
            if 0 <= c < len(block[r]) and block[r][c] == 0:
                raise HypothesisViolation(f"zero entry on outer codiagonal {d} of a perturbation block")


def classify_family(spec: BandSpec, top_left_perturbation=None, bottom_right_perturbation=None,
                    exact: bool = True) -> ConditioningVerdict:
    """Verdict of a perturbed band family, transferred from its Toeplitz part.

    The perturbation blocks must keep the outer codiagonals free of zeros.
    The exact Sturm route is used for self-reciprocal rational bands.
    """
    if spec.coeffs[0] == 0 or spec.coeffs[-1] == 0:
        raise HypothesisViolation("outer band coefficient vanishes")
    _check_block(top_left_perturbation, spec.m, spec.k)
    _check_block(bottom_right_perturbation, spec.m, spec.k)
    q = assoc_poly(spec)
    if exact and q.exact and q.is_self_reciprocal() and q.degree % 2 == 0:
        t = exact_type(SelfReciprocalPolynomial.from_coeffs(q.coeffs))
        return conditioning_verdict(t, spec.m, spec.k, route="sturm")
    return conditioning_verdict(classify_roots(q), spec.m, spec.k, route="float")


def classify_system(p: int, rho, delta, k: int | None = None, n: int | None = None,
                    exact: bool = True) -> ConditioningVerdict:
    """Classify the scaled system family ``K_n^{p,k}(rho, delta)``.

    Outer codiagonals of a sample matrix are checked entry by entry.  When a
    whole outer codiagonal pair vanishes the band is reduced and the check is
    repeated on the new outer codiagonals; a partial zero raises
    :class:`HypothesisViolation`.
    """
    from .galerkin import band_spec, scaled_system

    k = p if k is None else k
    rho, delta = as_rational(rho), as_rational(delta)
    full_m, full_k = p + 1, p - 1
    spec = band_spec(p, rho, delta, k)
    n = n or 6 * p + 6
    mat = scaled_system(p, n, rho, delta, k)
    for d in (-spec.m, spec.k):
        if any(v == 0 for v in mat.codiagonal(d)):
            raise HypothesisViolation(f"zero entry on outer codiagonal {d}")
    for d in range(spec.k + 1, full_k + 1):
        if any(v != 0 for v in mat.codiagonal(d)):
            raise HypothesisViolation(f"codiagonal {d} vanishes only partially")
    for d in range(spec.m + 1, full_m + 1):
        if any(v != 0 for v in mat.codiagonal(-d)):
            raise HypothesisViolation(f"codiagonal {-d} vanishes only partially")
    verdict = classify_family(spec, exact=exact)
    if (spec.m, spec.k) != (full_m, full_k):
        verdict = ConditioningVerdict(verdict.cls, verdict.evidence, verdict.eta, verdict.covered,
                                      verdict.route, True)
    return verdict


def multiplicity_factors(poly: Poly) -> dict[int, Poly]:
    """Squarefree factors ``{r: f_r}`` with ``poly = c * prod f_r^r``."""
    chain = squarefree_chain(poly) + [Poly([1])]
    parts = [chain[i] // chain[i + 1] for i in range(len(chain) - 1)]
    parts.append(Poly([1]))
    out = {}
    for r in range(1, len(parts)):
        f = parts[r - 1] // parts[r]
        if f.degree > 0:
            out[r] = f
    return out


@dataclass
class CasoratiResult:
    G2: np.ndarray | None
    rank: int | None
    singular_values: np.ndarray | None
    Y2_singular: bool = False
    roots: list = field(default_factory=list)


def casorati_G2(spec: BandSpec, top_left_block, rank_tol: float = 1e-10) -> CasoratiResult:
    """Casorati-based block ``G_2`` for a family perturbed in its top-left corner.

    The recurrence is read in the transposed orientation, with widths
    ``(k, m)``.  Solution columns are ordered by increasing root modulus; a
    simple root ``z`` gives ``z^j`` and a double root gives the pair
    ``(z^j, (j+1) z^j)``, ``j = 0 .. m+k-1``.  With ``Y1`` the first ``m``
    columns and ``Y2`` the next ``m+k`` columns of the first ``m+k`` rows of
    the transposed perturbed matrix, the result is
    ``W^{-1}[k:, :] Y2^{-1} Y1``.
    """
    m, k = spec.m, spec.k
    size = m + k
    q = assoc_poly(spec)
    # transposed family: coefficients reversed
    tpoly = Poly(tuple(reversed(q.coeffs))) if q.exact else None
    cols = []
    if tpoly is not None:
        factors = multiplicity_factors(tpoly)
        if any(r >= 3 for r in factors):
            raise NotImplementedError("roots of multiplicity >= 3 are unsupported")
        roots = []
        for r, f in factors.items():
            for z in np.roots(f.to_float_list()[::-1]):
                roots.append((complex(z), r))
    else:
        tt = classify_roots(list(reversed(q.coeffs)))
        if tt.eta >= 3:
            raise NotImplementedError("roots of multiplicity >= 3 are unsupported")
        coeffs = [float(c) for c in reversed(q.coeffs)]
        roots = _cluster(np.roots(coeffs[::-1]), 1e-5)
        if any(r >= 3 for _, r in roots):
            raise NotImplementedError("roots of multiplicity >= 3 are unsupported")
    roots.sort(key=lambda zr: (abs(zr[0]), zr[0].real, zr[0].imag))
    j = np.arange(size)
    for z, r in roots:
        base = z ** j
        cols.append(base)
        if r == 2:
            cols.append((j + 1) * base)
    W = np.array(cols).T
    if np.all(np.abs(W.imag) == 0):
        W = W.real
    # perturbed matrix, large enough to hold rows 0..size-1 of its transpose
    n0 = 2 * size + m + k
    C = spec.toeplitz(n0)
    block = np.asarray(top_left_block, dtype=float)
    C[: block.shape[0], : block.shape[1]] = block
    Ct = C.T
    Y1 = Ct[:size, :m]
    Y2 = Ct[:size, m : m + size]
    if np.linalg.matrix_rank(Y2) < size:
        return CasoratiResult(None, None, None, True, roots)
    G2 = np.linalg.inv(W)[k:, :] @ np.linalg.solve(Y2, Y1)
    if np.iscomplexobj(G2) and np.max(np.abs(G2.imag)) < 1e-12 * max(1.0, np.max(np.abs(G2))):
        G2 = G2.real
    sv = np.linalg.svd(G2, compute_uv=False)
    rank = int(np.sum(sv > rank_tol * sv[0])) if sv[0] > 0 else 0
    return CasoratiResult(G2, rank, sv, False, roots)
