"""Floating-point condition number experiments.

Matrices are assembled exactly and rounded once to double precision.  Each
sweep point records ``kappa`` and a sentinel flag: ``singular`` when
``sigma_min < eps sigma_max``, ``saturated`` when ``kappa > 1e15`` and
``nan`` when the computation produced no finite value.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import scipy.linalg

from .exact_core import as_rational, format_rational
from .galerkin import scaled_system, system_matrix
from .symbols import threshold_delta, threshold_rho

__all__ = [
    "SATURATION",
    "CondResult",
    "SweepPoint",
    "SweepResult",
    "cond",
    "cond_report",
    "sigma_min",
    "sigma_min_mp",
    "sweep",
    "figure_sweeps",
    "FIGURES",
    "loglog_slope",
]

SATURATION = 1e15
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class CondResult:
    kappa: float
    flag: str  # "", "singular", "saturated" or "nan"


def cond_report(A: np.ndarray, norm: str = "two") -> CondResult:
    """Condition number with sentinel flag.

    ``one`` and ``inf`` use an explicit LU-based inverse; ``two`` uses the
    singular values.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if not np.all(np.isfinite(A)):
        return CondResult(float("nan"), "nan")
    sv = np.linalg.svd(A, compute_uv=False)
    smax, smin = sv[0], sv[-1]
    if smax == 0 or smin < EPS * smax:
        return CondResult(float("inf"), "singular")
    if norm == "two":
        kappa = smax / smin
    elif norm in ("one", "inf"):
        ordv = 1 if norm == "one" else np.inf
        inv = scipy.linalg.inv(A)
        kappa = np.linalg.norm(A, ordv) * np.linalg.norm(inv, ordv)
    else:
        raise ValueError(f"unknown norm {norm!r}")
    if not np.isfinite(kappa):
        return CondResult(float("nan"), "nan")
    if kappa > SATURATION:
        return CondResult(kappa, "saturated")
    return CondResult(float(kappa), "")


def cond(A: np.ndarray, norm: str = "two") -> float:
    """Condition number in the ``one``, ``two`` or ``inf`` norm; ``inf`` if singular."""
    return cond_report(A, norm).kappa


def sigma_min(A: np.ndarray) -> float:
    """Smallest singular value from the SVD."""
    return float(np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)[-1])


def sigma_min_mp(A, dps: int | None = None, tol: float = 1e-12, maxiter: int = 200) -> float:
    """Smallest singular value in multiprecision by inverse iteration.

    Intended for nearly singular banded matrices whose smallest singular value
    is far below double-precision resolution.  ``A`` may hold exact rationals.
    The working precision defaults to ``0.6 n + 40`` digits.
    """
    rows = A.to_dense() if hasattr(A, "to_dense") else [list(r) for r in np.asarray(A, dtype=object)]
    n = len(rows)
    dps = dps or int(0.6 * n) + 40
    with mpmath.workdps(dps):
        def conv(v):
            if isinstance(v, Fraction):
                return mpmath.mpf(v.numerator) / v.denominator
            return mpmath.mpf(v)

        LU = [[conv(v) for v in row] for row in rows]
        # dense storage, but loops skip structural zeros so banded input is cheap
        piv = list(range(n))
        for j in range(n):
            r = max(range(j, n), key=lambda i: abs(LU[i][j]))
            if LU[r][j] == 0:
                return 0.0
            if r != j:
                LU[j], LU[r] = LU[r], LU[j]
                piv[j], piv[r] = piv[r], piv[j]
            pivot = LU[j][j]
            cols = [c for c in range(j + 1, n) if LU[j][c] != 0]
            for i in range(j + 1, n):
                if LU[i][j] == 0:
                    continue
                f = LU[i][j] / pivot
                LU[i][j] = f
                row_i, row_j = LU[i], LU[j]
                for c in cols:
                    row_i[c] -= f * row_j[c]

        nz_lower = [[c for c in range(i) if LU[i][c] != 0] for i in range(n)]
        nz_upper = [[c for c in range(i + 1, n) if LU[i][c] != 0] for i in range(n)]

        def solve(b):  # A x = b with P A = L U
            y = [b[piv[i]] for i in range(n)]
            for i in range(n):
                y[i] -= mpmath.fsum(LU[i][c] * y[c] for c in nz_lower[i])
            for i in range(n - 1, -1, -1):
                y[i] = (y[i] - mpmath.fsum(LU[i][c] * y[c] for c in nz_upper[i])) / LU[i][i]
            return y

        upper_t = [[] for _ in range(n)]
        lower_t = [[] for _ in range(n)]
        for i in range(n):
            for c in nz_upper[i]:
                upper_t[c].append(i)
            for c in nz_lower[i]:
                lower_t[c].append(i)

        def solve_t(b):  # A^T x = b: U^T L^T P x = b
            z = list(b)
            for i in range(n):
                z[i] = (z[i] - mpmath.fsum(LU[r][i] * z[r] for r in upper_t[i])) / LU[i][i]
            for i in range(n - 1, -1, -1):
                z[i] -= mpmath.fsum(LU[r][i] * z[r] for r in lower_t[i])
            x = [mpmath.mpf(0)] * n
            for i in range(n):
                x[piv[i]] = z[i]
            return x

        x = [mpmath.mpf(1) / mpmath.sqrt(n)] * n
        lam_old = mpmath.mpf(0)
        lam = mpmath.mpf(0)
        for _ in range(maxiter):
            y = solve_t(x)
            z = solve(y)
            lam = mpmath.fsum(v * v for v in y)
            norm = mpmath.sqrt(mpmath.fsum(v * v for v in z))
            x = [v / norm for v in z]
            if lam_old and abs(lam - lam_old) <= tol * lam:
                break
            lam_old = lam
        return float(1 / mpmath.sqrt(lam))


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


@dataclass(frozen=True)
class SweepPoint:
    param: float
    kappa: float
    norm: str
    flag: str
    n_or_N: int
    rho: Fraction | None
    delta: Fraction
    h: Fraction | None


@dataclass
class SweepResult:
    axis: str
    points: list
    meta: dict = field(default_factory=dict)

    def kappas(self) -> np.ndarray:
        return np.array([pt.kappa for pt in self.points])

    def params(self) -> np.ndarray:
        return np.array([pt.param for pt in self.points])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "k", "n_or_N", "rho", "delta", "h", "norm", "kappa", "sentinel_flag"])
        p, k = self.meta.get("p"), self.meta.get("k")
        for pt in self.points:
            if pt.flag == "saturated":
                kap = "≥1e15"
            elif pt.flag == "singular":
                kap = "inf"
            elif pt.flag == "nan":
                kap = "nan"
            else:
                kap = repr(pt.kappa)
            w.writerow([
                p, k, pt.n_or_N,
                "" if pt.rho is None else format_rational(pt.rho),
                format_rational(pt.delta),
                "" if pt.h is None else format_rational(pt.h),
                pt.norm, kap, pt.flag,
            ])
        return buf.getvalue()

    def to_svg(self, path: str, logx: bool = False, title: str | None = None,
               vlines: tuple = ()) -> None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        x = self.params()
        y = np.array([min(pt.kappa, SATURATION) if pt.flag != "nan" else np.nan for pt in self.points])
        ax.plot(x, y, marker=".", lw=1)
        ax.set_yscale("log")
        if logx:
            ax.set_xscale("log")
        for v in vlines:
            ax.axvline(float(v), ls="--", color="gray", lw=0.8)
        ax.set_xlabel(self.axis)
        ax.set_ylabel(f"kappa ({self.points[0].norm if self.points else 'two'})")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def _point(p, k, axis, fixed, value, norm):
    value = as_rational(value)
    if axis in ("rho", "delta_abs"):
        n = int(fixed["n"])
        rho = value if axis == "rho" else as_rational(fixed["rho"])
        delta = -abs(value) if axis == "delta_abs" else as_rational(fixed.get("delta", 0))
        mat = scaled_system(p, n, rho, delta, k)
        size, h = n, None
    elif axis in ("h", "N"):
        mu, T = as_rational(fixed["mu"]), as_rational(fixed.get("T", 1))
        delta = as_rational(fixed.get("delta", 0))
        N = int(value) if axis == "N" else int(round(T / value))
        mat = system_matrix(p, N, T, mu, delta, k)
        rho, size, h = None, N, T / N
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    res = cond_report(mat.to_numpy(), norm)
    param = float(value) if axis != "h" else float(h)
    if axis == "delta_abs":
        param = float(abs(value))
    return SweepPoint(param, res.kappa, norm, res.flag, size, rho, delta, h)


def sweep(p: int, k: int, axis: str, fixed: dict, grid, norm: str = "two",
          workers: int = 1) -> SweepResult:
    """Condition numbers along one parameter axis.

    Parameters
    ----------
    axis : {"rho", "delta_abs", "h", "N"}
        ``rho`` and ``delta_abs`` use the scaled family with ``fixed["n"]``
        (and ``fixed["delta"]`` or ``fixed["rho"]``); ``h`` and ``N`` use the
        unscaled system with ``fixed["mu"]``, ``fixed["T"]`` and
        ``fixed["delta"]``, where ``N = T/h`` is rounded to an integer.
    grid : iterable
        Parameter values; floats are converted exactly, strings may be ``a/b``.
    """
    grid = list(grid)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            pts = list(ex.map(lambda v: _point(p, k, axis, fixed, v, norm), grid))
    else:
        pts = [_point(p, k, axis, fixed, v, norm) for v in grid]
    pts.sort(key=lambda pt: pt.param)
    meta = {"p": p, "k": k, "axis": axis, **{key: str(v) for key, v in fixed.items()}}
    return SweepResult(axis, pts, meta)


def _frange(a, b, count):
    a, b = as_rational(a), as_rational(b)
    return [a + (b - a) * Fraction(i, count - 1) for i in range(count)]


def _logrange(a, b, count):
    out = []
    la, lb = math.log10(a), math.log10(b)
    for i in range(count):
        out.append(as_rational(f"{10 ** (la + (lb - la) * i / (count - 1)):.6e}"))
    return out


# figure templates: degrees, axis, fixed parameters and grid
FIGURES = {
    4: dict(degrees=(1, 2, 3), axis="rho", fixed={"n": 1000, "delta": 0}, grid=("lin", "8", "13", 101)),
    5: dict(degrees=(4, 5), axis="rho", fixed={"n": 2000, "delta": 0}, grid=("lin", "9.84", "9.92", 81)),
    6: dict(degrees=(1, 2, 3), axis="h", fixed={"mu": 10000, "T": 10, "delta": 0}, grid=("N", 278, 357)),
    7: dict(degrees=(1, 2, 3, 4, 5, 6), axis="delta_abs", fixed={"n": 1000, "rho": 20000},
            grid=("log", 1e-8, 0.3, 61)),
    8: dict(degrees=(1, 2, 3, 4, 5, 6), axis="N", fixed={"mu": 10000, "T": 1, "delta": 0},
            grid=("pow2", 7, 12)),
    9: dict(degrees=(1, 2, 3, 4, 5, 6), axis="N", fixed={"mu": 10000, "T": 1, "delta": "delta_p"},
            grid=("pow2", 7, 12)),
}


def figure_sweeps(figure: int, scale: float = 1.0, degrees=None, workers: int = 1) -> list[SweepResult]:
    """Run the sweeps of one figure template.

    ``scale < 1`` shrinks the matrix size (``n``) or drops the finest
    refinement levels, for quick runs.
    """
    tpl = FIGURES[figure]
    out = []
    for p in degrees or tpl["degrees"]:
        fixed = dict(tpl["fixed"])
        kind, *args = tpl["grid"]
        if "n" in fixed:
            fixed["n"] = max(p + 1, int(round(fixed["n"] * scale)))
        if fixed.get("delta") == "delta_p":
            fixed["delta"] = threshold_delta(p)
        if kind == "lin":
            grid = _frange(*args)
        elif kind == "log":
            grid = _logrange(*args)
        elif kind == "N":
            lo, hi = args
            T = as_rational(fixed["T"])
            grid = [T / N for N in range(lo, hi + 1)]
        elif kind == "pow2":
            lo, hi = args
            drop = 0 if scale >= 1 else max(0, int(round(math.log2(1 / scale))))
            grid = [2**j for j in range(lo, max(lo + 1, hi - drop) + 1)]
        res = sweep(p, p, tpl["axis"], fixed, grid, workers=workers)
        res.meta["figure"] = figure
        res.meta["threshold"] = {
            4: lambda: float(threshold_rho(p)),
            5: lambda: float(threshold_rho(p)),
            6: lambda: math.sqrt(threshold_rho(p) / as_rational(fixed["mu"])),
            7: lambda: float(abs(threshold_delta(p))),
        }.get(figure, lambda: None)()
        out.append(res)
    return out
