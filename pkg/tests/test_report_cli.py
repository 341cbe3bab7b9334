import json
import pathlib

import pytest

from contactgeo.cli import main
from contactgeo.report import UsageError, emit_report, run_suite

GOLDEN = pathlib.Path(__file__).parent / "golden" / "flat_full_n4_seed2026.json"


def test_run_suite_flat_full_passes():
    report = run_suite("flat_cosymplectic", "full", n_points=4, seed=0)
    assert report.passed
    assert all(c.passed for c in report.checks if c.kind == "identity")
    assert report.coverage == sorted(set(report.coverage))


@pytest.mark.parametrize("kwargs", [
    dict(model_name="nope", suite="full"),
    dict(model_name="flat_cosymplectic", suite="nope"),
    dict(model_name="flat_cosymplectic", suite="full", engine="nope"),
    dict(model_name="s5_se", suite="ngts_metricity"),
    dict(model_name="flat_cosymplectic", suite="full", lam=2.0),
    dict(model_name="flat_cosymplectic", suite="full", a_grid=(-1.0,)),
    dict(model_name="flat_cosymplectic", suite="full", n_points=0),
])
def test_run_suite_usage_errors(kwargs):
    kwargs.setdefault("n_points", 2)
    with pytest.raises(UsageError):
        run_suite(**kwargs)


def test_tolerance_override_full_and_base_id():
    # impossible tolerance on one check id forces a failure
    report = run_suite("s5_se", "acm", n_points=2, seed=0,
                       tol_overrides={"acm.phi_squared": 1e-30})
    assert not report.passed
    failed = [c.check_id for c in report.checks if not c.passed]
    assert failed == ["acm.phi_squared"]
    # base-id overrides apply to every bracketed instance
    report2 = run_suite("s5_anc", "ngts_metricity", t_grid=[0.0, 0.5],
                        n_points=2, seed=0,
                        tol_overrides={"ngts.nabla_g": 1e-30})
    bad = [c for c in report2.checks if c.check_id.startswith("ngts.nabla_g[")]
    assert len(bad) == 2
    assert all(not c.passed for c in bad)


def test_json_emission_is_byte_stable():
    a = emit_report(run_suite("flat_cosymplectic", "full", n_points=4, seed=2026),
                    "json")
    b = emit_report(run_suite("flat_cosymplectic", "full", n_points=4, seed=2026),
                    "json")
    assert a == b


def test_golden_json_matches():
    got = emit_report(run_suite("flat_cosymplectic", "full", n_points=4, seed=2026),
                      "json")
    assert got == GOLDEN.read_bytes()


def test_json_payload_shape():
    report = run_suite("flat_cosymplectic", "acm", n_points=2, seed=1)
    payload = json.loads(emit_report(report, "json"))
    assert payload["schema_version"] == "1"
    assert payload["model"] == "flat_cosymplectic"
    assert payload["passed"] is True
    for check in payload["checks"]:
        # numerics serialize as fixed-format strings, never floats
        assert isinstance(check["tolerance"], str)
        assert isinstance(check["max_residual"], str)
    ids = [c["id"] for c in payload["checks"]]
    assert ids == sorted(ids)


def test_text_format_markers():
    report = run_suite("s5_se", "acm", n_points=2, seed=0,
                       tol_overrides={"acm.phi_squared": 1e-30})
    text = emit_report(report, "text").decode()
    assert "FAIL" in text
    assert "acm.phi_squared" in text
    ok = emit_report(run_suite("flat_cosymplectic", "acm", n_points=2, seed=0),
                     "text").decode()
    assert "FAIL" not in ok
    assert "PASS" in ok


def test_claims_flag_but_do_not_gate():
    report = run_suite("s5_anc", "ngts_curvature", t_grid=[0.3], n_points=3,
                       seed=0)
    assert report.passed
    assert report.flags  # deviating claims are surfaced
    flagged = {c.check_id for c in report.checks
               if c.kind == "claim" and c.max_residual > c.tolerance}
    assert any("ricci_vs_reference" in cid for cid in flagged)


def test_cli_exit_codes(tmp_path, capsys):
    base = ["--model", "s5_se", "--suite", "acm",
            "--samples", "2", "--seed", "0"]
    assert main(base + ["--format", "text"]) == 0
    capsys.readouterr()
    assert main(base + ["--tol", "acm.phi_squared=1e-30"]) == 1
    capsys.readouterr()
    assert main(["--model", "s5_se", "--suite", "ngts_metricity",
                 "--samples", "2", "--seed", "0"]) == 2
    capsys.readouterr()
    assert main(base + ["--tol", "not-an-assignment"]) == 2
    capsys.readouterr()
    out = tmp_path / "report.json"
    assert main(base + ["--out", str(out)]) == 0
    capsys.readouterr()
    payload = json.loads(out.read_bytes())
    assert payload["suite"] == "acm"


def test_cli_missing_required_args(capsys):
    assert main(["--model", "flat_cosymplectic"]) == 2
    capsys.readouterr()


def test_cli_env_fallbacks(monkeypatch, capsys):
    monkeypatch.setenv("CONTACTGEO_MODEL", "flat_cosymplectic")
    monkeypatch.setenv("CONTACTGEO_SUITE", "acm")
    monkeypatch.setenv("CONTACTGEO_SAMPLES", "2")
    monkeypatch.setenv("CONTACTGEO_SEED", "7")
    assert main([]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["seed"] == 7
    # explicit flags win over the environment
    monkeypatch.setenv("CONTACTGEO_SEED", "not-an-int")
    assert main([]) == 2
    capsys.readouterr()


def test_cli_fd_engine_runs(capsys):
    rc = main(["--model", "flat_cosymplectic", "--suite", "acm",
               "--samples", "2", "--seed", "0", "--engine", "fd"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["engine"] == "fd"
