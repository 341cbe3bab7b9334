import numpy as np
import pytest

from contactgeo.fields import ContractError
from contactgeo.tensoralg import (
    MetricAtPoint,
    acm_compatibility_residuals,
    adapted_frame,
    endo_from_two_form,
    frame_max,
    lower_index,
    orthonormal_frame,
    raise_index,
    two_form_from_endo,
)


def random_metric(rng, n=5):
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def test_orthonormal_frame_is_orthonormal():
    rng = np.random.default_rng(3)
    g = random_metric(rng)
    E = orthonormal_frame(g)
    assert np.max(np.abs(E.T @ g @ E - np.eye(5))) < 1e-12


def test_adapted_frame_last_column_is_xi():
    rng = np.random.default_rng(4)
    g = random_metric(rng)
    v = rng.standard_normal(5)
    xi = v / np.sqrt(v @ g @ v)
    E = adapted_frame(g, xi)
    assert np.max(np.abs(E.T @ g @ E - np.eye(5))) < 1e-10
    assert np.max(np.abs(E[:, -1] - xi)) < 1e-12


def test_frame_max_is_frame_invariant_scale():
    # For a (0,2) tensor equal to the metric itself, the orthonormal-frame
    # components are the identity, so frame_max(g) = 1 for any metric.
    rng = np.random.default_rng(5)
    for _ in range(3):
        g = random_metric(rng)
        assert abs(frame_max(g, (0, 2), g) - 1.0) < 1e-12


def test_frame_max_mixed_tensor():
    rng = np.random.default_rng(6)
    g = random_metric(rng)
    # identity endomorphism has unit frame components
    assert abs(frame_max(np.eye(5), (1, 1), g) - 1.0) < 1e-12


def test_lower_raise_roundtrip():
    rng = np.random.default_rng(7)
    g = random_metric(rng)
    ginv = np.linalg.inv(g)
    T = rng.standard_normal((5, 5, 5))  # rank (1, 2)
    low, rank_low = lower_index(T, (1, 2), 0, g)
    assert rank_low == (0, 3)
    back, rank_back = raise_index(low, (0, 3), 2, ginv)
    assert rank_back == (1, 2)
    assert np.max(np.abs(back - T)) < 1e-12


def test_endo_two_form_roundtrip():
    rng = np.random.default_rng(8)
    g = random_metric(rng)
    A = rng.standard_normal((5, 5))
    omega = 0.5 * (A - A.T)
    phi = endo_from_two_form(omega, np.linalg.inv(g))
    omega2 = two_form_from_endo(phi, g)
    assert np.max(np.abs(omega2 - omega)) < 1e-12


def test_two_form_from_endo_rejects_symmetric():
    g = np.eye(3)
    with pytest.raises(ContractError):
        two_form_from_endo(np.diag([1.0, 2.0, 3.0]), g)


def test_metric_at_point_contracts():
    with pytest.raises(ContractError):
        MetricAtPoint.from_matrix(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ContractError):
        MetricAtPoint.from_matrix(np.diag([1.0, -1.0]))
    M = MetricAtPoint.from_matrix(np.diag([2.0, 3.0]))
    M.check()


def test_acm_compatibility_flat_model_data():
    phi = np.zeros((5, 5))
    phi[1, 0], phi[0, 1] = 1.0, -1.0
    phi[3, 2], phi[2, 3] = 1.0, -1.0
    xi = np.array([0.0, 0, 0, 0, 1.0])
    eta = xi.copy()
    res = acm_compatibility_residuals(phi, xi, eta, np.eye(5))
    assert max(res.values()) < 1e-14
    # breaking the structure is detected
    res_bad = acm_compatibility_residuals(phi, xi, 2.0 * eta, np.eye(5))
    assert res_bad["eta_xi"] > 0.5
