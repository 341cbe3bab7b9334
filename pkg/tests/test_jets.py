import numpy as np
import pytest

from contactgeo.jets import (
    Jet,
    alternate,
    constant,
    cos,
    exp,
    jet_einsum,
    jet_inv,
    jet_stack,
    log,
    seed,
    sin,
    sqrt,
)


def analytic_scalar(c):
    """f = sin(x) * exp(y) + x^2 y with closed-form first/second partials."""
    x, y = c
    f = np.sin(x) * np.exp(y) + x**2 * y
    grad = np.array([np.cos(x) * np.exp(y) + 2 * x * y,
                     np.sin(x) * np.exp(y) + x**2])
    hess = np.array([
        [-np.sin(x) * np.exp(y) + 2 * y, np.cos(x) * np.exp(y) + 2 * x],
        [np.cos(x) * np.exp(y) + 2 * x, np.sin(x) * np.exp(y)],
    ])
    return f, grad, hess


def test_seed_shapes():
    j = seed(np.array([1.0, 2.0, 3.0]))
    assert j.order == 2
    assert j.val.shape == (3,)
    assert np.allclose(j.d, np.eye(3))
    assert np.allclose(j.dd, 0.0)
    assert seed(np.zeros(3), order=1).order == 1
    assert seed(np.zeros(3), order=0).order == 0


def test_scalar_expression_derivatives():
    c = np.array([0.4, -0.7])
    j = seed(c)
    f = sin(j[0]) * exp(j[1]) + j[0] ** 2 * j[1]
    val, grad, hess = analytic_scalar(c)
    assert abs(f.val - val) < 1e-14
    assert np.max(np.abs(f.d - grad)) < 1e-14
    assert np.max(np.abs(f.dd - hess)) < 1e-13


def test_unary_functions_derivative_consistency():
    c = np.array([0.9])
    j = seed(c)[0]
    for fn, dfn in ((sin, lambda v: np.cos(v)),
                    (cos, lambda v: -np.sin(v)),
                    (exp, np.exp),
                    (sqrt, lambda v: 0.5 / np.sqrt(v)),
                    (log, lambda v: 1.0 / v)):
        out = fn(j)
        assert abs(out.d[0] - dfn(c[0])) < 1e-13


def test_division_and_power():
    c = np.array([1.3])
    x = seed(c)[0]
    y = (1.0 / x) * x
    assert abs(y.val - 1.0) < 1e-14
    assert np.max(np.abs(y.d)) < 1e-13
    assert np.max(np.abs(y.dd)) < 1e-12
    p = x**3
    assert abs(p.d[0] - 3 * c[0] ** 2) < 1e-13
    assert abs(p.dd[0, 0] - 6 * c[0]) < 1e-13


def test_jet_einsum_product_rule():
    c = np.array([0.3, 0.8])
    j = seed(c)
    # A_{i} = c_i^2, B_i = sin(c_i); (A . B) derivatives by hand.
    A = jet_stack([j[0] ** 2, j[1] ** 2])
    B = jet_stack([sin(j[0]), sin(j[1])])
    s = jet_einsum("i,i->", A, B)
    expected = (c**2 * np.sin(c)).sum()
    grad = 2 * c * np.sin(c) + c**2 * np.cos(c)
    assert abs(s.val - expected) < 1e-14
    assert np.max(np.abs(s.d - grad)) < 1e-13


def test_jet_einsum_rejects_reserved_letters():
    j = seed(np.zeros(2))
    with pytest.raises(ValueError):
        jet_einsum("Z,Z->", j, j)


def test_jet_inv_derivatives():
    c = np.array([0.2, -0.4])
    j = seed(c)
    # M = I + small symmetric coordinate-dependent part.
    M = jet_einsum(",ij->ij", j[0] * 0.0 + 1.0, np.eye(2)) + jet_einsum(
        ",ij->ij", j[0] * j[1], np.array([[0.0, 1.0], [1.0, 0.0]])
    )
    Minv = jet_inv(M)
    prod = jet_einsum("ij,jk->ik", M, Minv)
    assert np.max(np.abs(prod.val - np.eye(2))) < 1e-14
    assert np.max(np.abs(prod.d)) < 1e-13
    assert np.max(np.abs(prod.dd)) < 1e-12


def test_constant_and_stack():
    k = constant(np.ones((2, 2)), nvars=3)
    assert k.order == 2
    assert np.max(np.abs(k.d)) == 0.0
    j = seed(np.array([1.0, 2.0, 3.0]))
    st = jet_stack([j[0], j[1] * 2.0])
    assert st.val.shape == (2,)
    assert np.allclose(st.d, [[1, 0, 0], [0, 2, 0]])


def test_alternate_antisymmetrizes():
    rng = np.random.default_rng(0)
    T = rng.standard_normal((3, 3, 3))
    A = alternate(T, 3)
    assert np.max(np.abs(A + A.swapaxes(0, 1))) < 1e-14
    assert np.max(np.abs(A + A.swapaxes(1, 2))) < 1e-14
    # idempotent on antisymmetric input
    assert np.max(np.abs(alternate(A, 3) - A)) < 1e-14


def test_truncate_orders():
    j = seed(np.zeros(2))
    assert j.truncate(1).order == 1
    assert j.truncate(0).order == 0
    assert (Jet(np.zeros(2), np.zeros((2, 2))) + j).order == 1
