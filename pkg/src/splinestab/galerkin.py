"""Exact Galerkin matrices of the spline time discretization.

Indexing follows the trial/test split of the scheme: with ``n = N + p - 1``,
row ``r`` (0-based) is tested against ``phi_r`` and column ``c`` holds the
trial function ``phi_{c+1}``.  In 1-based notation
``A[l, j] = int d^k phi_j  d^k phi_{l-1}``.

The system family is ``K = -B + mu M + mu delta h^{2k} D^{p,k}`` and its
scaled version ``K_n = h K`` depends on ``(mu, h)`` only through
``rho = mu h^2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cardinal import cardinal_eval, cardinal_inner
from .exact_core import as_rational, format_rational
from .spline_space import build_basis
from .toeplitz import BandSpec

__all__ = [
    "ExactMatrix",
    "StructureReport",
    "assemble",
    "system_matrix",
    "scaled_system",
    "band_spec",
    "structure_report",
    "outer_codiagonals",
    "critical_rho",
    "exceptional_deltas",
    "kind_order",
]


class ExactMatrix:
    """Square matrix of Fractions stored by its nonzero entries.

    Parameters
    ----------
    n : int
        Size.
    entries : dict
        ``{(r, c): Fraction}`` with 0-based indices; zeros are dropped.
    meta : dict, optional
        ``p``, ``kind`` and the parameters used to build the matrix.
    """

    def __init__(self, n: int, entries: dict, meta: dict | None = None):
        self.n = n
        self.entries = {rc: Fraction(v) for rc, v in entries.items() if v != 0}
        self.meta = dict(meta or {})

    def __getitem__(self, rc) -> Fraction:
        r, c = rc
        if not (0 <= r < self.n and 0 <= c < self.n):
            raise IndexError("matrix index out of range")
        return self.entries.get((r, c), Fraction(0))

    def entry(self, l: int, j: int) -> Fraction:
        """1-based access."""
        return self[l - 1, j - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.n != other.n:
            raise ValueError("size mismatch")
        out = dict(self.entries)
        for rc, v in other.entries.items():
            out[rc] = out.get(rc, 0) + v
        return ExactMatrix(self.n, out)

    def __neg__(self) -> "ExactMatrix":
        return self.scale(-1)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, s) -> "ExactMatrix":
        s = Fraction(s)
        return ExactMatrix(self.n, {rc: v * s for rc, v in self.entries.items()}, self.meta)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def to_numpy(self) -> np.ndarray:
        """Round every exact entry once to double precision."""
        out = np.zeros((self.n, self.n))
        for (r, c), v in self.entries.items():
            out[r, c] = float(v)
        return out

    def codiagonal(self, offset: int) -> list[Fraction]:
        """Entries ``A[i, i + offset]`` in order of increasing row."""
        rows = range(max(0, -offset), min(self.n, self.n - offset))
        return [self[i, i + offset] for i in rows]

    def bandwidths(self) -> tuple[int, int]:
        """``(lower, upper)`` extent of the nonzero pattern."""
        lower = max((r - c for r, c in self.entries), default=0)
        upper = max((c - r for r, c in self.entries), default=0)
        return max(lower, 0), max(upper, 0)

    def to_json(self) -> str:
        meta = {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in self.meta.items()
                if k != "band"}
        return json.dumps(
            {
                "n": self.n,
                "meta": meta,
                "entries": [[r, c, format_rational(v)] for (r, c), v in sorted(self.entries.items())],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ExactMatrix":
        data = json.loads(text)
        entries = {(r, c): as_rational(v) for r, c, v in data["entries"]}
        return cls(data["n"], entries, data.get("meta"))

    def to_matrix_market(self) -> str:
        lines = ["%%MatrixMarket matrix coordinate real general"]
        for key, val in self.meta.items():
            if key != "band":
                lines.append(f"% {key}: {format_rational(val) if isinstance(val, Fraction) else val}")
        lines.append(f"{self.n} {self.n} {len(self.entries)}")
        for (r, c), v in sorted(self.entries.items()):
            lines.append(f"{r + 1} {c + 1} {float(v):.17g}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"ExactMatrix(n={self.n}, nnz={len(self.entries)}, meta={self.meta.get('kind')})"


def kind_order(kind: str, k: int | None = None) -> int:
    """Derivative order of a matrix kind (``mass``, ``stiffness``, ``deriv``)."""
    if kind == "mass":
        return 0
    if kind == "stiffness":
        return 1
    if kind.startswith("deriv"):
        if ":" in kind:
            return int(kind.split(":", 1)[1])
        if k is None:
            raise ValueError("deriv kind needs an order k")
        return k
    raise ValueError(f"unknown matrix kind {kind!r}")


@lru_cache(maxsize=None)
def _element_matrix(local: tuple, k: int) -> tuple:
    der = [q.deriv(k) for q in local]
    return tuple(tuple((a * b).integrate(0, 1) for b in der) for a in der)


@lru_cache(maxsize=64)
def _unit_entries(p: int, N: int, k: int) -> tuple:
    """Entries of the ``h = 1`` matrix of derivative order ``k``."""
    basis = build_basis(p, N, N)
    n = N + p - 1
    acc: dict = {}
    for e, local in enumerate(basis.elements):
        mat = _element_matrix(local, k)
        for a in range(p + 1):
            r = e + a  # test function phi_r
            if r >= n:
                continue
            for b in range(p + 1):
                c = e + b - 1  # trial function phi_{c+1}
                if c < 0:
                    continue
                acc[(r, c)] = acc.get((r, c), 0) + mat[a][b]
    return tuple(sorted((rc, v) for rc, v in acc.items() if v != 0))


def _unit_band(p: int, k: int) -> dict:
    """Toeplitz band of the ``h = 1`` order-``k`` matrix, keyed by column offset."""
    return {d: cardinal_inner(p, k, k, d + 1) for d in range(-p - 1, p)}


def assemble(p: int, N: int, T, kind: str, k: int | None = None) -> ExactMatrix:
    """Assemble the exact mass, stiffness or ``k``-th derivative matrix.

    Parameters
    ----------
    p, N : int
        Degree and number of elements.
    T : rational-like
        Final time.
    kind : {"mass", "stiffness", "deriv"}
        ``"deriv"`` needs ``k``; ``"deriv:k"`` is also accepted.

    Returns
    -------
    ExactMatrix
        Size ``N + p - 1``.  Scaled as ``h^{1-2k}`` times the unit-mesh matrix.
    """
    if p < 1 or N < 1:
        raise ValueError("need p >= 1 and N >= 1")
    order = kind_order(kind, k)
    if not 0 <= order <= p:
        raise ValueError("derivative order must lie in [0, p]")
    T = as_rational(T)
    h = T / N
    s = h ** (1 - 2 * order)
    entries = {rc: v * s for rc, v in _unit_entries(p, N, order)}
    band = {d: v * s for d, v in _unit_band(p, order).items()}
    meta = {"p": p, "N": N, "T": T, "h": h, "kind": kind.split(":")[0], "k": order, "band": band}
    return ExactMatrix(N + p - 1, entries, meta)


def _combine(n, parts, meta) -> ExactMatrix:
    acc: dict = {}
    band: dict = {}
    for coeff, entries, bnd in parts:
        if coeff == 0:
            continue
        for rc, v in entries:
            acc[rc] = acc.get(rc, 0) + coeff * v
        for d, v in bnd.items():
            band[d] = band.get(d, 0) + coeff * v
    meta["band"] = band
    return ExactMatrix(n, acc, meta)


def system_matrix(p: int, N: int, T, mu, delta, k: int) -> ExactMatrix:
    """``K = -B + mu M + mu delta h^{2k} D^{p,k}`` for the given mesh."""
    T, mu, delta = as_rational(T), as_rational(mu), as_rational(delta)
    if not 1 <= k <= p:
        raise ValueError("need 1 <= k <= p")
    h = T / N
    n = N + p - 1
    parts = []
    for coeff, order in ((-1 / h, 1), (mu * h, 0), (mu * delta * h ** (2 * k) * h ** (1 - 2 * k), k)):
        parts.append((coeff, _unit_entries(p, N, order), _unit_band(p, order)))
    meta = {"p": p, "N": N, "T": T, "h": h, "mu": mu, "delta": delta, "k": k, "kind": "system"}
    return _combine(n, parts, meta)


def scaled_system(p: int, n: int, rho, delta, k: int) -> ExactMatrix:
    """``K_n = h K`` expressed through ``rho = mu h^2`` alone."""
    rho, delta = as_rational(rho), as_rational(delta)
    if n < p + 1:
        raise ValueError("need n >= p + 1")
    if not 1 <= k <= p:
        raise ValueError("need 1 <= k <= p")
    N = n - p + 1
    parts = [
        (Fraction(-1), _unit_entries(p, N, 1), _unit_band(p, 1)),
        (rho, _unit_entries(p, N, 0), _unit_band(p, 0)),
        (rho * delta, _unit_entries(p, N, k), _unit_band(p, k)),
    ]
    meta = {"p": p, "N": N, "n": n, "rho": rho, "delta": delta, "k": k, "kind": "scaled_system"}
    return _combine(n, parts, meta)


def band_spec(p: int, rho, delta, k: int) -> BandSpec:
    """Toeplitz band of ``K_n^{p,k}(rho, delta)``.

    Coefficient at column offset ``d`` (``-p-1 <= d <= p-1``) is
    ``F(|d+1|)`` with ``F(j) = d2Phi(p+1-j) + rho (Phi(p+1-j) + delta (-1)^k d^{2k}Phi(p+1-j))``
    evaluated on ``Phi_{2p+1}``.  Outer coefficients that vanish are trimmed.
    """
    rho, delta = as_rational(rho), as_rational(delta)
    q = 2 * p + 1
    sign = -1 if k % 2 else 1

    def f(j):
        x = p + 1 - j
        return cardinal_eval(q, 2, x) + rho * (cardinal_eval(q, 0, x) + delta * sign * cardinal_eval(q, 2 * k, x))

    coeffs = [f(abs(d + 1)) for d in range(-p - 1, p)]
    return BandSpec(p + 1, p - 1, tuple(coeffs), validate=False).trimmed()


@dataclass(frozen=True)
class StructureReport:
    is_persymmetric: bool
    band_rows_range: tuple | None
    corner_anomaly_count: int
    outer_codiagonal_nonzero: bool
    effective_band: tuple
    band_rows_match: bool = True


def structure_report(mat: ExactMatrix) -> StructureReport:
    """Check persymmetry, Toeplitz band rows, corner anomalies and outer codiagonals.

    Rows and ranges are 1-based.  Band rows are ``2p+1 .. N-p`` (empty when
    ``N < 3p+1``).  Anomalies are counted in the top-left corner only, i.e.
    entries of rows ``1..2p`` that differ from the Toeplitz extension of the
    band; persymmetry mirrors them to the bottom-right corner.
    """
    n, p = mat.n, mat.meta["p"]
    N = n - p + 1
    band = mat.meta.get("band", {})
    pers = all(mat[n - 1 - c, n - 1 - r] == v for (r, c), v in mat.entries.items())
    pers = pers and all(((n - 1 - c, n - 1 - r) in mat.entries) for (r, c) in mat.entries)

    first, last = 2 * p + 1, N - p
    rows = (first, last) if last >= first else None

    def expected(r, c):
        return band.get(c - r, Fraction(0))

    match = True
    if rows:
        for l in range(first, last + 1):
            r = l - 1
            for c in range(n):
                if mat[r, c] != expected(r, c):
                    match = False
    anomalies = 0
    for r in range(min(2 * p, n)):
        for c in range(n):
            if mat[r, c] != expected(r, c):
                anomalies += 1
    lower, upper = mat.bandwidths()
    outer = [p - 1, -p - 1]
    nonzero = all(v != 0 for off in outer for v in mat.codiagonal(off))
    return StructureReport(pers, rows, anomalies, nonzero, (lower, upper), match)


def _codiag_parts(p: int, k: int, offset: int, count: int) -> list[tuple]:
    """``(a, b, c)`` per entry so that the entry equals ``a + rho (b + c delta)``."""
    N = 3 * p + 2
    mats = [dict(_unit_entries(p, N, o)) for o in (1, 0, k)]
    out = []
    for i in range(count):
        rc = (i, i + offset)
        out.append((-mats[0].get(rc, 0), mats[1].get(rc, 0), mats[2].get(rc, 0)))
    return [tuple(Fraction(x) for x in t) for t in out]


def outer_codiagonals(p: int, rho, delta, k: int | None = None) -> tuple[list, list]:
    """Leading entries of the ``(p-1)``-th and ``(p-2)``-th upper codiagonals.

    Returns ``(K_star, K_hash)`` with ``p+1`` and ``p+2`` entries of the scaled
    system ``K_n^{p,k}(rho, delta)``; ``k`` defaults to ``p``.
    """
    if not 2 <= p <= 8:
        raise ValueError("unsupported degree: only 2 <= p <= 8 is covered")
    k = p if k is None else k
    rho, delta = as_rational(rho), as_rational(delta)
    star = [a + rho * (b + c * delta) for a, b, c in _codiag_parts(p, k, p - 1, p + 1)]
    hsh = [a + rho * (b + c * delta) for a, b, c in _codiag_parts(p, k, p - 2, p + 2)]
    return star, hsh


def critical_rho(p: int, delta, k: int | None = None) -> Fraction | None:
    """Positive ``rho`` at which the whole ``(p-1)``-th codiagonal vanishes, if any."""
    if not 2 <= p <= 8:
        raise ValueError("unsupported degree: only 2 <= p <= 8 is covered")
    k = p if k is None else k
    delta = as_rational(delta)
    parts = _codiag_parts(p, k, p - 1, p + 1)
    a, b, c = parts[0]
    den = b + c * delta
    if den == 0:
        return None
    rho = -a / den
    if rho <= 0:
        return None
    if any(x + rho * (y + z * delta) != 0 for x, y, z in parts):
        return None
    return rho


def exceptional_deltas(p: int, k: int | None = None) -> list[Fraction]:
    """Values of ``delta`` where an entry of ``K_hash`` vanishes at the critical ``rho``.

    At ``rho = -A/(B + C delta)`` each entry ``a + rho (b + c delta)`` has the
    numerator ``a (B + C delta) - A (b + c delta)``, linear in ``delta``.
    """
    k = p if k is None else k
    A, B, C = _codiag_parts(p, k, p - 1, 1)[0]
    out = set()
    for a, b, c in _codiag_parts(p, k, p - 2, p + 2):
        lin, const = a * C - A * c, a * B - A * b
        if lin != 0:
            out.add(-const / lin)
    return sorted(out)
