import numpy as np

from contactgeo.connections import (
    covariant_derivative,
    curvature,
    curvature_lowered,
    killing_residual,
    levi_civita,
    torsion,
    torsion_lowered,
    totally_skew_residual,
)
from contactgeo.fields import Chart, TensorField, use_engine
from contactgeo.jets import jet_stack

CHART = Chart("curved", 2)


def polar_like_metric():
    # g = diag(1, x0^2 + 2): a warped product with known Christoffels.
    def func(x):
        f = x[0] * x[0] + 2.0
        one = x[0] * 0.0 + 1.0
        row0 = jet_stack([one, x[0] * 0.0])
        row1 = jet_stack([x[0] * 0.0, f])
        return jet_stack([row0, row1])

    return TensorField((0, 2), func, CHART, "g")


def test_levi_civita_flat_vanishes(flat_model):
    S = flat_model.structures["cart"]
    p = np.array([0.3, -0.4, 1.0, 0.2, 0.0])
    assert np.max(np.abs(S.lc.gamma(p))) < 1e-14


def test_levi_civita_warped_product_closed_form():
    g = polar_like_metric()
    conn = levi_civita(g)
    p = np.array([0.7, 1.1])
    r2 = p[0] ** 2 + 2.0
    gamma = conn.gamma(p)
    # Gamma^0_{11} = -x0, Gamma^1_{01} = Gamma^1_{10} = x0 / (x0^2 + 2)
    assert abs(gamma[0, 1, 1] + p[0]) < 1e-12
    assert abs(gamma[1, 0, 1] - p[0] / r2) < 1e-12
    assert abs(gamma[1, 1, 0] - p[0] / r2) < 1e-12
    assert np.max(np.abs(torsion(conn, p))) < 1e-13


def test_metric_is_parallel(s5_model, s5_points):
    for p in s5_points[:3]:
        S = s5_model.structure_at(p)
        nabla_g = covariant_derivative(S.lc, S.g, p)
        assert np.max(np.abs(nabla_g)) < 1e-12


def test_curvature_symmetries(s5_model, s5_points):
    p = s5_points[0]
    S = s5_model.structure_at(p)
    g = S.g.value(p)
    cv = curvature(S.lc, p, g)
    low = curvature_lowered(cv, g)
    # antisymmetry in the operator pair and in the last pair
    assert np.max(np.abs(low + low.transpose(1, 0, 2, 3))) < 1e-12
    assert np.max(np.abs(low + low.transpose(0, 1, 3, 2))) < 1e-12
    # first Bianchi identity
    bianchi = low + low.transpose(1, 2, 0, 3) + low.transpose(2, 0, 1, 3)
    assert np.max(np.abs(bianchi)) < 1e-12


def test_unit_sphere_is_einstein(s5_model, s5_points):
    for p in s5_points[:3]:
        S = s5_model.structure_at(p)
        g = S.g.value(p)
        cv = curvature(S.lc, p, g)
        assert np.max(np.abs(cv.Ric - 4.0 * g)) < 1e-11
        assert abs(cv.Scal - 20.0) < 1e-10


def test_curvature_fd_engine_agrees(s5_model, s5_points):
    p = s5_points[0]
    S = s5_model.structure_at(p)
    g = S.g.value(p)
    cv_ad = curvature(S.lc, p, g)
    with use_engine("fd", 5e-3):
        cv_fd = curvature(levi_civita(S.g), p, g)
    assert np.max(np.abs(cv_fd.Ric - cv_ad.Ric)) < 1e-5


def test_reeb_field_is_killing(s5_model, s5_points):
    for p in s5_points[:3]:
        S = s5_model.structure_at(p)
        res = killing_residual(S.g, S.xi, p)
        assert res["killing"] < 1e-12
        assert res["half_deta"] < 1e-12


def test_torsion_lowered_and_skew_residual(s5_model, s5_points):
    p = s5_points[0]
    S = s5_model.structure_at(p)
    g = S.g.value(p)
    assert np.max(np.abs(torsion_lowered(S.lc, g, p))) < 1e-12
    assert totally_skew_residual(S.lc, g, p) < 1e-12
