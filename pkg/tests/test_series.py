import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_hermite

from psmzi.errors import CapOverflowError, OrderExceedsCapError, VarSetMismatchError
from psmzi.series import (MAX_TERMS, ExponentPoly, TruncatedSeries, VarSet, exp_series,
                          exp_series_naive, mixed_partial, mixed_partials, multiply)

XY = ("x", "y")
XYZ = ("x", "y", "z")

finite = st.floats(-1.5, 1.5, allow_nan=False)
cplx = st.builds(complex, finite, finite)


@st.composite
def polys(draw, vars=XYZ):
    k = len(vars)
    lin = [draw(cplx) for _ in range(k)]
    quad = [[draw(cplx) if i <= j else 0 for j in range(k)] for i in range(k)]
    return ExponentPoly(vars, 0.0, lin, quad)


caps_st = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))


def test_varset_rejects_duplicates():
    with pytest.raises(ValueError):
        VarSet(("x", "x"))
    with pytest.raises(KeyError):
        VarSet(XY).index("z")


def test_poly_coefficients_and_evaluation():
    p = ExponentPoly.linear(XY, {"x": 2.0}) * ExponentPoly.linear(XY, {"y": 3.0}) + 1.0
    assert p.coeff() == 1.0
    assert p.coeff("x", "y") == p.coeff("y", "x") == 6.0
    assert p.coeff("x") == 0.0
    assert p((1.0, 2.0)) == 13.0
    assert p.degree == 2


def test_poly_product_degree_limit():
    x = ExponentPoly.linear(XY, {"x": 1.0})
    with pytest.raises(ValueError):
        (x * x) * x


def test_poly_var_mismatch():
    with pytest.raises(VarSetMismatchError):
        ExponentPoly.linear(XY, {"x": 1}) + ExponentPoly.linear(XYZ, {"x": 1})


def test_restrict_keeps_cross_terms():
    p = (ExponentPoly.linear(XYZ, {"x": 1, "z": 2}) * ExponentPoly.linear(XYZ, {"y": 1, "z": 1}))
    q = p.restrict(("z", "x"))
    assert q.coeff("x", "z") == p.coeff("x", "z") == 1.0
    assert q.coeff("z", "z") == 2.0
    assert q((0.3, 0.7)) == pytest.approx(p((0.7, 0.0, 0.3)))


@pytest.mark.parametrize("c,k", [(0.5, 0), (0.5, 4), (-2.0 + 1j, 3), (3.0, 6)])
def test_exp_of_linear(c, k):
    s = exp_series(ExponentPoly.linear(("x",), {"x": c}), (k,))
    assert mixed_partial(s, (k,)) == pytest.approx(c ** k, rel=1e-14)


@pytest.mark.parametrize("x", [-1.3, 0.0, 0.4, 2.0])
def test_hermite_generating_function(x):
    # exp(2 x t - t^2) = sum H_k(x) t^k / k!
    p = ExponentPoly(("t",), 0.0, [2 * x], [[-1.0]])
    s = exp_series(p, (8,))
    for k in range(9):
        assert mixed_partial(s, (k,)).real == pytest.approx(eval_hermite(k, x), rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(polys(), caps_st)
def test_recurrence_matches_power_sum(p, caps):
    assert exp_series(p, caps).allclose(exp_series_naive(p, caps), rtol=1e-12, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), caps_st)
def test_exp_additivity(p, q, caps):
    lhs = exp_series(p + q, caps)
    rhs = multiply(exp_series(p, caps), exp_series(q, caps))
    assert lhs.allclose(rhs, rtol=1e-11, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(polys(), polys(), caps_st)
def test_mixed_partial_linearity(p, q, caps):
    a, b = exp_series(p, caps), exp_series(q, caps)
    s = a * 2.0 + b * (1 - 0.5j)
    for orders in np.ndindex(*(c + 1 for c in caps)):
        want = 2.0 * mixed_partial(a, orders) + (1 - 0.5j) * mixed_partial(b, orders)
        assert mixed_partial(s, orders) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_multiply_commutes_and_has_unit():
    p = ExponentPoly(XY, 0.0, [0.3, -1j], [[0.2, 0.5], [0, 1.0]])
    a = exp_series(p, (3, 2))
    b = TruncatedSeries.from_poly(p, (3, 2))
    one = TruncatedSeries.constant(XY, (3, 2))
    assert multiply(a, b).allclose(multiply(b, a))
    assert multiply(a, one).allclose(a)


def test_mixed_partial_matches_finite_differences():
    p = ExponentPoly(XY, 0.0, [0.4, -0.3], [[0.25, 0.6], [0, -0.15]])
    s = exp_series(p, (2, 2))
    h = 1e-3

    def f(x, y):
        return np.exp(p((x, y))).real

    fd_xy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
    fd_xx = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h)
    assert mixed_partial(s, (1, 1)).real == pytest.approx(fd_xy, rel=1e-6)
    assert mixed_partial(s, (2, 0)).real == pytest.approx(fd_xx, rel=1e-6)
    assert mixed_partial(s, {"y": 1}).real == pytest.approx(-0.3)


def test_mixed_partials_table():
    p = ExponentPoly(XY, 0.0, [1.0, 2.0], [[0.5, 0.1], [0, 0.0]])
    s = exp_series(p, (2, 3))
    table = mixed_partials(s)
    for idx in np.ndindex(table.shape):
        assert table[idx] == pytest.approx(mixed_partial(s, idx))


def test_errors():
    p = ExponentPoly.linear(XY, {"x": 1.0})
    s = exp_series(p, (2, 2))
    with pytest.raises(OrderExceedsCapError):
        mixed_partial(s, (3, 0))
    with pytest.raises(ValueError):
        exp_series(p + 1.0, (2, 2))
    with pytest.raises(CapOverflowError):
        exp_series(p, (MAX_TERMS, 1))
    with pytest.raises(VarSetMismatchError):
        multiply(s, exp_series(p, (2, 1)))
    with pytest.raises(ValueError):
        mixed_partial(s, (1,))


def test_from_poly_drops_terms_beyond_caps():
    p = ExponentPoly(XY, 0.0, [1.0, 1.0], [[3.0, 2.0], [0, 5.0]])
    s = TruncatedSeries.from_poly(p, (1, 2))
    assert s.coefficient((1, 1)) == 2.0
    assert s.coefficient((0, 2)) == 5.0
    assert s.caps == (1, 2)
