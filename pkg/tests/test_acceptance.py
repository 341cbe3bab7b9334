"""End-to-end acceptance gate.

Each test covers one acceptance criterion and produces a single pass/fail
line under ``pytest -v``.  Reports are built once per (model, suite) pair
and shared across criteria.
"""
import math

import pytest

from contactgeo.report import emit_report, run_suite

SEED = 11
T_GRID = (0.0, math.pi / 4.0, math.pi / 2.0, 1.3)


def _by_id(report):
    return {c.check_id: c for c in report.checks}


def _assert_under(checks, check_id, tol):
    c = checks[check_id]
    assert c.max_residual <= tol, (
        f"{check_id}: max residual {c.max_residual:.3e} exceeds {tol:.1e}")


@pytest.fixture(scope="module")
def se_su2():
    return _by_id(run_suite("s5_se", "su2_systems", n_points=100, seed=SEED))


@pytest.fixture(scope="module")
def se_dhom():
    return _by_id(run_suite("s5_se", "dhom", n_points=25, seed=SEED))


@pytest.fixture(scope="module")
def anc_metricity():
    return _by_id(run_suite("s5_anc", "ngts_metricity", n_points=100,
                            seed=SEED))


@pytest.fixture(scope="module")
def anc_curvature_report():
    return run_suite("s5_anc", "ngts_curvature", n_points=25, seed=SEED)


@pytest.fixture(scope="module")
def anc_curvature(anc_curvature_report):
    return _by_id(anc_curvature_report)


@pytest.fixture(scope="module")
def flat_full():
    return run_suite("flat_cosymplectic", "full", n_points=25, seed=SEED)


def test_criterion_01_unit_sphere_einstein(se_su2):
    _assert_under(se_su2, "su2.einstein_metric", 1e-5)
    _assert_under(se_su2, "su2.scalar_curvature", 1e-5)


def test_criterion_02_sasaki_einstein_system(se_su2):
    _assert_under(se_su2, "su2.sasaki_einstein_system", 1e-7)
    _assert_under(se_su2, "su2.hypo", 1e-7)


def test_criterion_03_sasakian_reeb_curvature(se_su2):
    _assert_under(se_su2, "su2.sasakian_reeb_curvature", 1e-7)


def test_criterion_04_nearly_cosymplectic_family(se_dhom):
    for t in T_GRID:
        _assert_under(se_dhom, f"dhom.nc_family[t={t:.6g}]", 1e-7)


def test_criterion_05_deformation_into_class(se_dhom):
    for t in T_GRID:
        _assert_under(se_dhom, f"dhom.anc_family[t={t:.6g}]", 1e-7)
    _assert_under(se_dhom, "dhom.round_trip", 1e-10)
    _assert_under(se_dhom, "dhom.h_invariant", 1e-8)


def test_criterion_06_eta_einstein(se_dhom):
    _assert_under(se_dhom, "dhom.eta_einstein", 1e-4)
    _assert_under(se_dhom, "dhom.scalar_curvature", 1e-4)


def test_criterion_07_generalized_metricity(anc_metricity):
    for t in T_GRID:
        tk = f"[t={t:.6g}]"
        _assert_under(anc_metricity, f"ngts.einstein_metricity{tk}", 1e-7)
        _assert_under(anc_metricity, f"ngts.metricity_torsion_form{tk}", 1e-7)
        _assert_under(anc_metricity, f"ngts.nabla_g{tk}", 1e-7)
        _assert_under(anc_metricity, f"ngts.nabla_F{tk}", 1e-7)


def test_criterion_08_torsion(anc_metricity):
    for t in T_GRID:
        tk = f"[t={t:.6g}]"
        _assert_under(anc_metricity, f"ngts.torsion_skew{tk}", 1e-10)
        _assert_under(anc_metricity, f"ngts.torsion_dF{tk}", 1e-7)
        _assert_under(anc_metricity, f"ngts.torsion_family{tk}", 1e-7)
        _assert_under(anc_metricity, f"ngts.torsion_sincos{tk}", 1e-7)


def test_criterion_09_connection_path_equality(anc_metricity):
    for t in T_GRID:
        _assert_under(anc_metricity, f"ngts.path_equality[t={t:.6g}]", 1e-8)


def test_criterion_10_ricci_decomposition(anc_curvature_report, anc_curvature):
    _assert_under(anc_curvature, "ngts.ricci_fit_residual", 1e-5)
    _assert_under(anc_curvature, "ngts.ricci_fit_spread", 1e-4)
    # the fitted coefficients differ from the quoted reference triple; the
    # deviation must be surfaced as a flag, not hidden or gating
    ref = anc_curvature["ngts.ricci_vs_reference"]
    assert ref.kind == "claim"
    assert ref.max_residual > ref.tolerance
    assert any("ricci_vs_reference" in f for f in anc_curvature_report.flags)
    assert anc_curvature_report.passed


@pytest.mark.xfail(strict=True, reason=(
    "the quoted closed-form display for R(Z,X) applied to the Reeb field "
    "does not match the direct curvature of the metricity connection; the "
    "directly fitted coefficients are (3/4, 1/2, -1/3) instead of "
    "(7/4, 3/4, -1), a stable order-one deviation at every sample point"))
def test_criterion_11_reeb_curvature_display(anc_curvature):
    _assert_under(anc_curvature, "ngts.curvature_xi", 1e-6)


def test_criterion_12_curvature_relations(se_dhom):
    _assert_under(se_dhom, "dhom.curvature_vs_nc", 1e-6)
    _assert_under(se_dhom, "dhom.curvature_vs_se", 1e-6)
    _assert_under(se_dhom, "dhom.reeb_curvature", 1e-6)
    _assert_under(se_dhom, "dhom.attached_sasakian", 1e-6)


def test_criterion_13_flat_degenerate_model(flat_full):
    assert flat_full.passed
    for c in flat_full.checks:
        if c.kind == "identity":
            assert c.max_residual <= 1e-10, c.check_id


def test_criterion_14_deterministic_output(flat_full):
    again = run_suite("flat_cosymplectic", "full", n_points=25, seed=SEED)
    assert emit_report(flat_full, "json") == emit_report(again, "json")
