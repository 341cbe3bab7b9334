import numpy as np

from contactgeo.structures import (
    acm_residuals,
    anc_relations_residuals,
    class_residuals,
    eta_einstein_fit,
    h_tensor,
    su2_system_residuals,
)
from contactgeo.connections import curvature, levi_civita
from contactgeo.deform import d_homothety
from contactgeo.models import d_homothety_quadruple

from conftest import pts_on_chart


def test_acm_residuals_on_models(flat_model, s5_model, s5_points):
    p_flat = np.array([0.2, -0.6, 0.4, 1.1, -0.3])
    assert max(acm_residuals(flat_model.structures["cart"], p_flat).values()) < 1e-13
    for p in s5_points[:3]:
        assert max(acm_residuals(s5_model.structure_at(p), p).values()) < 1e-12


def test_class_residuals_discriminate(flat_model, s5_model, s5_points):
    p_flat = np.array([0.2, -0.6, 0.4, 1.1, -0.3])
    res_flat = class_residuals(flat_model.structures["cart"], p_flat)
    assert res_flat["cosymplectic"] < 1e-13
    p = s5_points[0]
    S = s5_model.structure_at(p)
    res = class_residuals(S, p)
    assert res["sasakian"] < 1e-12
    # the Sasakian sphere is not nearly cosymplectic and not in the deformed
    # class: the classifier must separate these
    assert res["nearly_cosymplectic"] > 0.1
    assert res["anc"] > 0.1
    S_nc = s5_model.nc_structures[p.chart_id]
    res_nc = class_residuals(S_nc, p)
    assert res_nc["nearly_cosymplectic"] < 1e-12
    assert res_nc["sasakian"] > 0.1


def test_h_tensor_scale_extraction(s5_model, s5_points):
    cid, pts = pts_on_chart(s5_model, s5_points)
    ht = h_tensor(s5_model.structures[cid], pts)
    assert ht.lam is not None
    assert abs(ht.lam - 1.0) < 1e-10
    assert ht.spread < 1e-10
    assert ht.killing < 1e-12
    # h = -phi_3 on the Sasaki-Einstein sphere
    S = s5_model.structures[cid]
    for p in pts[:2]:
        assert np.max(np.abs(ht.field.value(p) + S.phi.value(p))) < 1e-12


def test_su2_systems_on_sphere(s5_model, s5_points):
    for p in s5_points[:3]:
        Q = s5_model.su2_at(p)
        res = su2_system_residuals(Q, 1.0, p)
        assert res["sasaki_einstein"] < 1e-12
        assert res["hypo"] < 1e-12
        # the 3-lambda nearly cosymplectic system coincides at lam=1 here
        assert res["nc_lambda"] < 1e-12
        # the 2-lambda system does not hold for the SE quadruple
        assert res["anc_lambda"] > 0.1


def test_su2_algebra_on_sphere(s5_model, s5_points):
    for p in s5_points[:2]:
        alg = s5_model.su2_at(p).algebra_residuals(p)
        assert alg["quaternion"] < 1e-12
        assert max(v for k, v in alg.items() if k.startswith("wedge_")) < 1e-12
        assert alg["volume_scale"] > 1e-3


def test_anc_relations_on_deformed_structure(s5_model, s5_points):
    p = s5_points[0]
    S_nc = s5_model.nc_structures[p.chart_id]
    S_bar = d_homothety(S_nc, 1.5)
    res = anc_relations_residuals(S_bar, p)
    for key in ("deta_eq_dF_phi_xi", "deta_eq_dF_phix_xi", "deta_xi",
                "deta_phi_interchange", "deta_eq_dF_phiphi_xi",
                "deta_eq_minus_dF_xi", "dF_phi_cycle", "killing_2h_deta",
                "nabla_phi_h", "nabla_h", "nabla_h_vs_curvature"):
        assert res[key] < 1e-12, key
    res_nc = anc_relations_residuals(S_nc, p)
    assert res_nc["nc_nabla_phi_h"] < 1e-12
    assert res_nc["nabla_h"] < 1e-12


def test_eta_einstein_fit_recovers_coefficients(s5_model, s5_points):
    samples = []
    for p in s5_points[:4]:
        S_nc = s5_model.nc_structures[p.chart_id]
        Sb = d_homothety(S_nc, 1.5)
        g = Sb.g.value(p)
        cv = curvature(levi_civita(Sb.g), p, g)
        samples.append((g, Sb.eta.value(p), cv.Ric))
    a, b, resid = eta_einstein_fit(samples)
    assert abs(a - 2.0) < 1e-10
    assert abs(b - 2.0) < 1e-10
    assert resid < 1e-10


def test_deformed_quadruple_satisfies_anc_system(s5_model, s5_points):
    p = s5_points[0]
    Q_bar = d_homothety_quadruple(s5_model.su2[p.chart_id], 1.5)
    res = su2_system_residuals(Q_bar, 1.0, p)
    assert res["anc_lambda"] < 1e-12
    assert res["hypo"] < 1e-12
