"""Independent floating-point oracles used by the tests."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import BSpline


def open_knots(p: int, N: int, T: float) -> np.ndarray:
    inner = np.linspace(0.0, T, N + 1)
    return np.concatenate([np.zeros(p), inner, np.full(p, T)])


def quadrature_matrix(p: int, N: int, T: float, k: int) -> np.ndarray:
    """Gauss-Legendre assembly of int d^k phi_j d^k phi_{l-1} with scipy B-splines."""
    t = open_knots(p, N, T)
    nb = N + p
    x, w = np.polynomial.legendre.leggauss(p + 2)
    h = T / N
    nodes = (np.arange(N)[:, None] + (x[None, :] + 1) / 2) * h
    weights = np.tile(w * h / 2, N)
    pts = nodes.ravel()
    vals = np.empty((nb, pts.size))
    for j in range(nb):
        c = np.zeros(nb)
        c[j] = 1.0
        spl = BSpline(t, c, p, extrapolate=False)
        vals[j] = np.nan_to_num(spl.derivative(k)(pts) if k else spl(pts))
    gram = (vals * weights) @ vals.T
    # rows test phi_r (r = 0..n-1), columns trial phi_{c+1}
    return gram[: nb - 1, 1:]


def cardinal_quadrature(p: int, k1: int, k2: int, j: int) -> float:
    """Gauss-Legendre value of int d^k1 Phi_p(s) d^k2 Phi_p(s + j) ds."""
    knots = np.arange(p + 2, dtype=float)
    spl = BSpline.basis_element(knots, extrapolate=False)
    x, w = np.polynomial.legendre.leggauss(p + 2)
    total = 0.0
    for a in range(-abs(j) - 1, p + abs(j) + 2):
        s = a + (x + 1) / 2
        f = np.nan_to_num(spl.derivative(k1)(s) if k1 else spl(s))
        g = np.nan_to_num(spl.derivative(k2)(s + j) if k2 else spl(s + j))
        total += np.sum(w / 2 * f * g)
    return float(total)
