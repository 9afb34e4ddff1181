import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import BSpline

from oracles import open_knots
from splinestab.polynomial import Poly
from splinestab.spline_space import (
    KnotVector,
    PiecewisePolynomial,
    basis_inner,
    build_basis,
    central_identity_holds,
)


def test_knot_vector():
    kv = KnotVector(2, 4, 2)
    assert kv.h == F(1, 2)
    assert kv.index_knots() == [0, 0, 0, 1, 2, 3, 4, 4, 4]
    assert kv.knots[-1] == 2


@pytest.mark.parametrize("args", [(0, 3, 1), (2, 0, 1), (2, 3, 0), (2, 3, -1)])
def test_knot_vector_guards(args):
    with pytest.raises(ValueError):
        KnotVector(*args)


@pytest.mark.parametrize("p,N,T", [(1, 3, 1), (2, 5, 2), (3, 7, F(7, 3)), (4, 4, 1), (5, 11, 3), (3, 2, 1)])
def test_basis_against_scipy(p, N, T):
    basis = build_basis(p, N, T)
    assert len(basis) == N + p
    t = open_knots(p, N, float(T))
    xs = np.linspace(0, float(T), 97)[:-1] + 1e-3
    for j, f in enumerate(basis.functions):
        c = np.zeros(N + p)
        c[j] = 1.0
        ref = np.nan_to_num(BSpline(t, c, p, extrapolate=False)(xs))
        ours = [float(f(F(x).limit_denominator(10**9))) for x in xs]
        assert np.allclose(ours, ref, atol=1e-10), j


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 12), st.fractions(min_value=0, max_value=1, max_denominator=101))
def test_partition_of_unity(p, N, frac):
    basis = build_basis(p, N, N)
    t = frac * N
    assert sum(f(t) for f in basis.functions) == 1


@pytest.mark.parametrize("p", range(1, 6))
def test_central_identity(p):
    basis = build_basis(p, 3 * p + 2, 1)
    for j in range(p, basis.N):
        assert central_identity_holds(basis, j)
    # for p = 1 the boundary hat is a truncated cardinal spline as well
    assert central_identity_holds(basis, 0) == (p == 1)


def test_piecewise_ops():
    f = PiecewisePolynomial(F(1, 2), 2, {0: Poly([0, 1]), 1: Poly([1])})
    assert f(F(1, 4)) == F(1, 2)
    assert f.deriv()(F(1, 4)) == 2
    assert (f - f).is_zero()
    assert (f + f)(F(3, 4)) == 2
    assert f(3) == 0
    assert f.breakpoints == [0, F(1, 2), 1]


def test_function_index_guard():
    basis = build_basis(2, 3, 1)
    with pytest.raises(IndexError):
        basis.function(5)


def test_basis_inner_scaling():
    # mass scales with h, stiffness with 1/h
    b1, b2 = build_basis(2, 6, 6), build_basis(2, 6, 3)
    assert basis_inner(b2, 3, 4, 0, 0) == basis_inner(b1, 3, 4, 0, 0) / 2
    assert basis_inner(b2, 3, 4, 1, 1) == basis_inner(b1, 3, 4, 1, 1) * 2
    assert basis_inner(b1, 0, 7, 0, 0) == 0


def test_basis_inner_guards():
    b = build_basis(2, 4, 1)
    with pytest.raises(IndexError):
        basis_inner(b, 0, 99, 0, 0)
    with pytest.raises(ValueError):
        basis_inner(b, 0, 1, 3, 0)


def test_to_json():
    data = json.loads(build_basis(2, 3, 1).to_json())
    assert data["p"] == 2 and len(data["functions"]) == 5
    assert data["breakpoints"] == ["0/1", "1/3", "2/3", "1/1"]
