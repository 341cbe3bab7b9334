import math

import numpy as np
import pytest

from contactgeo.connections import curvature, torsion_lowered, totally_skew_residual
from contactgeo.deform import circle_family, d_homothety
from contactgeo.fields import exterior_derivative
from contactgeo.models import d_homothety_quadruple
from contactgeo.ngts import (
    NGTS_RICCI_REFERENCE,
    connection_path_residual,
    metricity_residuals,
    nabla_phi_residuals,
    ngts_connection,
    ngts_connection_closed,
    ngts_curvature_residuals,
    ngts_ricci_fit,
    printed_display_residuals,
    torsion_residuals,
)

T_ANGLE = 0.8


@pytest.fixture(scope="module")
def member(s5_model):
    """One circle-family member with its deformation and connections."""
    cid = next(iter(s5_model.charts))
    S_nc0 = s5_model.nc_structures[cid]
    Q0 = s5_model.su2[cid]
    S_nc, Q_t = circle_family(S_nc0, Q0, T_ANGLE)
    _, Q_s = circle_family(S_nc0, Q0, T_ANGLE + math.pi / 2.0)
    S_bar = d_homothety(S_nc, 1.5)
    return {
        "cid": cid,
        "S_nc": S_nc,
        "Q_t": Q_t,
        "Q_s": Q_s,
        "Q_bar": d_homothety_quadruple(Q_t, 1.5),
        "S_bar": S_bar,
        "se": s5_model.structures[cid],
        "phi0": S_nc0.phi,
        "conn": ngts_connection(S_bar),
    }


@pytest.fixture(scope="module")
def member_points(s5_model, s5_points, member):
    return [p for p in s5_points if p.chart_id == member["cid"]]


def test_metricity_identities_hold(member, member_points):
    for p in member_points[:3]:
        res = metricity_residuals(member["S_bar"], member["conn"], p)
        for key, value in res.items():
            assert value < 1e-12, key


def test_sign_flipped_displays_deviate_but_only_by_the_sign(member, member_points):
    p = member_points[0]
    res = printed_display_residuals(member["S_bar"], member["conn"], p)
    # the +1/6 eta-bracket variants cannot hold for the metricity connection
    assert res["display_g"] > 0.1
    assert res["display_F"] > 0.1
    # ... and the discrepancy is exactly the sign of the eta bracket
    assert res["sign_flip_only"] < 1e-12


def test_torsion_is_skew_and_matches_family_form(member, member_points):
    for p in member_points[:2]:
        S, conn = member["S_bar"], member["conn"]
        g = S.g.value(p)
        assert totally_skew_residual(conn, g, p) < 1e-12
        res = torsion_residuals(S, conn, member["Q_bar"], member["phi0"],
                                T_ANGLE, 1.0, p)
        assert res["dF"] < 1e-12
        # the wedge form needs the deformed (barred) quadruple
        assert res["family_wedge"] < 1e-12
        assert res["family_sincos"] < 1e-12


def test_torsion_family_requires_barred_quadruple(member, member_points):
    # using the undeformed quadruple misstates the identity: this guards the
    # harness against silently passing the wrong data
    p = member_points[0]
    res = torsion_residuals(member["S_bar"], member["conn"], member["Q_t"],
                            member["phi0"], T_ANGLE, 1.0, p)
    assert res["family_wedge"] > 1e-3


def test_closed_form_equals_structure_formula(member, member_points):
    closed = ngts_connection_closed(member["se"], member["Q_s"].phi(2),
                                    member["Q_s"].om2)
    for p in member_points[:3]:
        g = member["se"].g.value(p)
        assert connection_path_residual(member["conn"], closed, g, p) < 1e-12


def test_torsion_angle_shift_matters(member, member_points):
    # building the closed form at angle t instead of t + pi/2 gives a
    # different connection
    closed_wrong = ngts_connection_closed(member["se"], member["Q_t"].phi(2),
                                          member["Q_t"].om2)
    p = member_points[0]
    g = member["se"].g.value(p)
    assert connection_path_residual(member["conn"], closed_wrong, g, p) > 1e-3


def test_nabla_phi_formulas(member, member_points):
    for p in member_points[:2]:
        res = nabla_phi_residuals(member["Q_t"], member["S_nc"].h, 1.0, p)
        for key, value in res.items():
            assert value < 1e-12, key


def test_ricci_fit_coefficients(member, member_points):
    samples = []
    for p in member_points:
        se = member["se"]
        g = se.g.value(p)
        cv = curvature(member["conn"], p, g)
        samples.append((g, se.eta.value(p), member["Q_s"].om1.value(p), cv.Ric))
    (c1, c2, c3), resid = ngts_ricci_fit(samples)
    assert resid < 1e-12
    # directly computed coefficients; they differ from the quoted reference
    # in the first two entries, which the harness reports as a flagged claim
    assert abs(c1 - 11.0 / 3.0) < 1e-10
    assert abs(c2 + 2.0 / 3.0) < 1e-10
    assert abs(c3 - 4.0 / 3.0) < 1e-10
    assert abs(c3 - NGTS_RICCI_REFERENCE[2]) < 1e-10


def test_closed_curvature_displays_are_deviating_claims(member, member_points):
    p = member_points[0]
    res = ngts_curvature_residuals(member["se"], member["Q_s"], member["conn"], p)
    # quoted closed forms do not match the direct curvature; the residuals
    # are order one and stable, which the report layer flags
    assert res["curvature_closed"] > 0.1
    assert res["curvature_xi"] > 0.1
    assert res["ricci_closed"] > 0.1


def test_reeb_curvature_direct_fit(member, member_points):
    # R(Z,X) xi~ = 3/4 [eta~(X) Z - eta~(Z) X]
    #            + 1/2 [eta~(X) BZ - eta~(Z) BX] - 1/3 Omega^s_1(Z,X) xi~
    p = member_points[0]
    se = member["se"]
    g = se.g.value(p)
    eta = se.eta.value(p)
    xi = se.xi.value(p)
    B = member["Q_s"].phi(1).value(p)
    OmB = member["Q_s"].om1.value(p)
    eye = np.eye(5)
    cv = curvature(member["conn"], p, g)
    r_xi = np.einsum("kijl,l->kij", cv.R, xi)
    rhs = (0.75 * (np.einsum("j,ki->kij", eta, eye)
                   - np.einsum("i,kj->kij", eta, eye))
           + 0.5 * (np.einsum("j,ki->kij", eta, B)
                    - np.einsum("i,kj->kij", eta, B))
           - np.einsum("ij,k->kij", OmB, xi) / 3.0)
    assert np.max(np.abs(r_xi - rhs)) < 1e-12


def test_flat_model_connection_is_levi_civita(flat_model):
    S = flat_model.structures["cart"]
    conn = ngts_connection(S)
    p = np.array([0.4, -0.2, 0.9, 0.1, -0.5])
    assert np.max(np.abs(conn.gamma(p) - S.lc.gamma(p))) < 1e-14
    g = S.g.value(p)
    assert np.max(np.abs(torsion_lowered(conn, g, p))) < 1e-14
    assert np.max(np.abs(exterior_derivative(S.F, p))) < 1e-14
