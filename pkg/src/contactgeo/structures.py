"""Almost contact metric structures, the h-tensor, structure classifiers and
SU(2) quadruples with their characterizing differential systems.

All residuals are max absolute components over an orthonormal frame obtained
by Gram-Schmidt from the coordinate frame; the identities are tensorial, so
the particular frame does not matter beyond fixing the residual scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .connections import (
    AffineConnection,
    covariant_derivative,
    curvature,
    curvature_lowered,
    levi_civita,
)
from .fields import Chart, TensorField, exterior_derivative, wedge, wedge_field
from .jets import Jet, jet_einsum, jet_inv
from .tensoralg import (
    acm_compatibility_residuals as _acm_residuals_pointwise,
    adapted_frame,
    endo_from_two_form,
    frame_max,
    orthonormal_frame,
)

__all__ = [
    "AlmostContactMetricStructure",
    "HTensor",
    "SU2Quadruple",
    "fundamental_form_field",
    "eta_from_metric_field",
    "h_field",
    "h_tensor",
    "acm_residuals",
    "class_residuals",
    "anc_relations_residuals",
    "su2_system_residuals",
    "eta_einstein_fit",
    "endo_field_from_form",
]


@dataclass
class AlmostContactMetricStructure:
    """The quadruple (phi, xi, eta, g) as tensor fields on one chart."""

    phi: TensorField
    xi: TensorField
    eta: TensorField
    g: TensorField
    chart: Chart
    lam: float | None = None          # declared h-scale, when known
    h: TensorField | None = None      # analytic h-tensor field, when known
    name: str = ""
    _lc: AffineConnection | None = dc_field(default=None, repr=False)

    @property
    def F(self) -> TensorField:
        return fundamental_form_field(self.phi, self.g)

    @property
    def lc(self) -> AffineConnection:
        if self._lc is None:
            self._lc = levi_civita(self.g)
        return self._lc


def fundamental_form_field(phi: TensorField, g: TensorField) -> TensorField:
    """F(X, Y) = g(phi X, Y) as a field."""
    return TensorField(
        (0, 2),
        lambda x: jet_einsum("ki,kj->ij", phi.jet(x.val, x.order), g.jet(x.val, x.order)),
        phi.chart,
        "F",
    )


def eta_from_metric_field(g: TensorField, xi: TensorField) -> TensorField:
    """eta = g(., xi) as a field."""
    return TensorField(
        (0, 1),
        lambda x: jet_einsum("ij,j->i", g.jet(x.val, x.order), xi.jet(x.val, x.order)),
        g.chart,
        "eta",
    )


def endo_field_from_form(omega: TensorField, g: TensorField, name: str = "phi") -> TensorField:
    """phi with g(phi X, Y) = omega(X, Y), as a field."""

    def func(x: Jet) -> Jet:
        ginv = jet_inv(g.jet(x.val, x.order))
        return jet_einsum("kj,ij->ki", ginv, omega.jet(x.val, x.order))

    return TensorField((1, 1), func, omega.chart, name)


def h_field(S: AlmostContactMetricStructure,
            conn: AffineConnection | None = None) -> TensorField:
    """h X = nabla_X xi as a field, h[k, i] = d_i xi^k + Gamma^k_{im} xi^m.

    Supports one derivative order (enough for nabla(h) and curvature-free
    identities); structures with an analytic `h` keep full order.
    """
    if conn is None:
        conn = S.lc

    def func(x: Jet) -> Jet:
        order = x.order
        gammaj = conn.gamma_jet(x.val)          # order-1 germ of Gamma
        xij = S.xi.jet(x.val, min(order + 1, 2))
        dxi = Jet(xij.d, xij.dd, None)           # germ of d_i xi^k
        out = dxi + jet_einsum("kim,m->ki", gammaj, xij)
        return out.truncate(min(order, 1))

    return TensorField((1, 1), func, S.chart, "h")


@dataclass
class HTensor:
    field: TensorField
    lam: float | None
    spread: float
    killing: float
    note: str = ""


def h_tensor(S: AlmostContactMetricStructure, points: Sequence[np.ndarray],
             killing_tol: float = 1e-7, spread_tol: float = 1e-5) -> HTensor:
    """Compute h = nabla(xi) and estimate the constant lambda with
    h^2 = -lambda^2 (id - eta (x) xi) on ker(eta).

    lambda is the square root of the median eigenvalue of -h^2 restricted to
    ker(eta), with a relative spread check across points and eigenvalues.
    """
    from .connections import killing_residual

    hf = h_field(S)
    kr = max(
        killing_residual(S.g, S.xi, p)["killing"] for p in points[: min(len(points), 5)]
    )
    if kr > killing_tol:
        return HTensor(hf, None, np.inf, kr, "xi not Killing; lambda extraction skipped")
    eigs = []
    for p in points:
        h = hf.value(p)
        g = S.g.value(p)
        xi = S.xi.value(p)
        E = adapted_frame(g, xi)
        ker = E[:, :-1]
        M = -(h @ h)
        c = ker.T @ g @ M @ ker
        eigs.extend(np.linalg.eigvalsh(0.5 * (c + c.T)))
    eigs = np.asarray(eigs)
    med = float(np.median(eigs))
    if med <= 0:
        return HTensor(hf, 0.0 if np.max(np.abs(eigs)) < 1e-12 else None,
                       float(np.max(np.abs(eigs))), kr,
                       "h vanishes" if np.max(np.abs(eigs)) < 1e-12 else "not of lambda-type")
    spread = float(np.max(np.abs(eigs - med)) / med)
    if spread > spread_tol:
        return HTensor(hf, None, spread, kr, "not of lambda-type (eigenvalues not constant)")
    return HTensor(hf, float(np.sqrt(med)), spread, kr)


def acm_residuals(S: AlmostContactMetricStructure, p) -> dict[str, float]:
    return _acm_residuals_pointwise(S.phi.value(p), S.xi.value(p),
                                    S.eta.value(p), S.g.value(p))


def _nabla_phi_lowered(S: AlmostContactMetricStructure, coords) -> np.ndarray:
    """T3[a, b, c] = g((nabla_a phi) d_b, d_c)."""
    C = covariant_derivative(S.lc, S.phi, coords)  # C[k, b, a]
    g = S.g.value(coords)
    return np.einsum("kba,kc->abc", C, g)


def class_residuals(S: AlmostContactMetricStructure, coords) -> dict[str, float]:
    """Residuals of the defining nabla(phi) identity of each structure class."""
    g = S.g.value(coords)
    eta = S.eta.value(coords)
    phi = S.phi.value(coords)
    E = orthonormal_frame(g)
    T3 = _nabla_phi_lowered(S, coords)
    dF = exterior_derivative(S.F, coords)
    deta = exterior_derivative(S.eta, coords)

    sas_rhs = np.einsum("ab,c->abc", g, eta) - np.einsum("b,ac->abc", eta, g)
    deta_phi = np.einsum("bm,mc->bc", deta, phi)       # deta(Y, phi Z)
    phiT_deta = np.einsum("ma,mb->ab", phi, deta)      # deta(phi X, Y)
    anc_rhs = (
        dF / 3.0
        + np.einsum("a,bc->abc", eta, deta_phi) / 3.0
        - np.einsum("b,ca->abc", eta, deta_phi) / 6.0
        - np.einsum("c,ab->abc", eta, phiT_deta) / 6.0
    )
    return {
        "cosymplectic": frame_max(T3, (0, 3), g, E),
        "sasakian": frame_max(T3 - sas_rhs, (0, 3), g, E),
        "nearly_cosymplectic": frame_max(T3 - dF / 3.0, (0, 3), g, E),
        "anc": frame_max(T3 - anc_rhs, (0, 3), g, E),
    }


def anc_relations_residuals(S: AlmostContactMetricStructure, coords,
                            include_h: bool = True) -> dict[str, float]:
    """Residuals of the auxiliary exterior-derivative interchanges and of the
    nabla(phi).h / nabla(h) identities (with the curvature cross-check)."""
    g = S.g.value(coords)
    eta = S.eta.value(coords)
    phi = S.phi.value(coords)
    xi = S.xi.value(coords)
    E = orthonormal_frame(g)
    dF = exterior_derivative(S.F, coords)
    deta = exterior_derivative(S.eta, coords)

    dF_phi_xi = np.einsum("xmk,mz,k->xz", dF, phi, xi)      # dF(X, phi Z, xi)
    dF_phix_xi = np.einsum("mzk,mx,k->xz", dF, phi, xi)     # dF(phi X, Z, xi)
    dF_xx_xi = np.einsum("mnk,mx,nz,k->xz", dF, phi, phi, xi)  # dF(phiX, phiZ, xi)
    dF_xi = np.einsum("xzk,k->xz", dF, xi)                  # dF(X, Z, xi)
    deta_phi = np.einsum("xm,mz->xz", deta, phi)            # deta(X, phi Z)
    phi_deta = np.einsum("mx,mz->xz", phi, deta)            # deta(phi X, Z)
    dF_3phi = np.einsum("mnl,mx,ny,lz->xyz", dF, phi, phi, phi)
    dF_phi_last = np.einsum("xym,mz->xyz", dF, phi)         # dF(X, Y, phi Z)
    # last line of the interchange block; the eta(Y)-term is read as
    # eta(Y) deta(Z, X) (the only dimensionally consistent reading).
    r7 = (
        dF_3phi + dF_phi_last
        - np.einsum("x,yz->xyz", eta, deta)
        - np.einsum("y,zx->xyz", eta, deta)
    )
    out = {
        "deta_eq_dF_phi_xi": frame_max(deta - dF_phi_xi, (0, 2), g, E),
        "deta_eq_dF_phix_xi": frame_max(deta - dF_phix_xi, (0, 2), g, E),
        "deta_xi": frame_max(deta @ xi, (0, 1), g, E),
        "deta_phi_interchange": frame_max(phi_deta - deta_phi, (0, 2), g, E),
        "deta_eq_dF_phiphi_xi": frame_max(phi_deta - dF_xx_xi, (0, 2), g, E),
        "deta_eq_minus_dF_xi": frame_max(phi_deta + dF_xi, (0, 2), g, E),
        "dF_phi_cycle": frame_max(r7, (0, 3), g, E),
        "killing_2h_deta": np.nan,
    }

    if not include_h:
        out.pop("killing_2h_deta")
        return out

    hf = S.h if S.h is not None else h_field(S)
    h = hf.value(coords)
    h2 = h @ h
    h2g = np.einsum("ka,kc->ac", h2, g)                     # g(h^2 X, Z)
    hg = np.einsum("ka,kc->ac", h, g)                       # g(h X, Z)
    out["killing_2h_deta"] = frame_max(2.0 * hg - deta, (0, 2), g, E)

    # g((nabla_a phi) d_b, h d_c)
    lhs_ph = np.einsum(
        "kba,kl,lc->abc", covariant_derivative(S.lc, S.phi, coords), g, h
    )
    h2phi = np.einsum("ka,lc,kl->ac", h2, phi, g)           # g(h^2 X, phi Z)
    out["nabla_phi_h"] = frame_max(
        lhs_ph - np.einsum("b,ac->abc", eta, h2phi), (0, 3), g, E
    )
    out["nc_nabla_phi_h"] = frame_max(
        lhs_ph
        - np.einsum("b,ac->abc", eta, h2phi)
        + np.einsum("a,bc->abc", eta, h2phi),
        (0, 3),
        g,
        E,
    )

    D = covariant_derivative(S.lc, hf, coords)              # D[k, b, a] = (nabla_a h)^k_b
    nabla_h = np.einsum("kba,kc->abc", D, g)                # g((nabla_a h) d_b, d_c)
    rhs_h = -np.einsum("b,ac->abc", eta, h2g) + np.einsum("c,ab->abc", eta, h2g)
    out["nabla_h"] = frame_max(nabla_h - rhs_h, (0, 3), g, E)

    curv = curvature(S.lc, coords, g)
    Rlow = curvature_lowered(curv, g)
    R_xi = np.einsum("ijlw,i->jlw", Rlow, xi)               # R(xi, X, Y, Z)
    out["nabla_h_vs_curvature"] = frame_max(nabla_h + R_xi, (0, 3), g, E)
    return out


@dataclass
class SU2Quadruple:
    """(eta, omega_1, omega_2, omega_3) with the metric and Reeb field."""

    eta: TensorField
    om1: TensorField
    om2: TensorField
    om3: TensorField
    g: TensorField
    xi: TensorField
    chart: Chart
    lam: float = 1.0
    name: str = ""

    @property
    def omegas(self) -> tuple[TensorField, TensorField, TensorField]:
        return (self.om1, self.om2, self.om3)

    def phi(self, i: int) -> TensorField:
        return endo_field_from_form(self.omegas[i - 1], self.g, f"phi_{i}")

    def algebra_residuals(self, coords) -> dict[str, float]:
        """SU(2) pointwise algebra: omega_i ^ omega_j = delta_ij v with
        v ^ eta != 0, and the quaternion relations of the phi_i."""
        g = self.g.value(coords)
        eta = self.eta.value(coords)
        E = orthonormal_frame(g)
        om = [f.value(coords) for f in self.omegas]
        v = wedge(om[2], 2, om[2], 2)
        out: dict[str, float] = {}
        for i in range(3):
            for j in range(i, 3):
                w = wedge(om[i], 2, om[j], 2)
                target = v if i == j else 0.0
                out[f"wedge_{i+1}{j+1}"] = frame_max(w - target, (0, 4), g, E)
        # scale of v ^ eta; a valid quadruple has this bounded away from zero
        out["volume_scale"] = frame_max(wedge(v, 4, eta, 1), (0, 5), g, E)
        phis = [endo_from_two_form(om[i], np.linalg.inv(g)) for i in range(3)]
        quat = 0.0
        for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            quat = max(quat, frame_max(phis[i] @ phis[j] - phis[k], (1, 1), g, E))
            quat = max(quat, frame_max(phis[i] @ phis[j] + phis[j] @ phis[i], (1, 1), g, E))
        out["quaternion"] = quat
        return out


def su2_system_residuals(Q: SU2Quadruple, lam: float, coords) -> dict[str, float]:
    """Residuals of the four differential systems on an SU(2) quadruple.

    sasaki_einstein: d(eta) = -2 w3, d(w1) = 3 eta^w2,      d(w2) = -3 eta^w1
    hypo:            d(w3) = 0,      d(eta^w1) = 0,          d(eta^w2) = 0
    nc_lambda:       d(eta) = -2L w3, d(w1) = 3L eta^w2,     d(w2) = -3L eta^w1
    anc_lambda:      d(eta) = -2L w3, d(w1) = 2L eta^w2,     d(w2) = -2L eta^w1
    """
    g = Q.g.value(coords)
    E = orthonormal_frame(g)
    eta = Q.eta.value(coords)
    om = [f.value(coords) for f in Q.omegas]
    deta = exterior_derivative(Q.eta, coords)
    dom = [exterior_derivative(f, coords) for f in Q.omegas]
    e_w1 = wedge(eta, 1, om[0], 2)
    e_w2 = wedge(eta, 1, om[1], 2)
    d_ew1 = exterior_derivative(wedge_field(Q.eta, Q.om1), coords)
    d_ew2 = exterior_derivative(wedge_field(Q.eta, Q.om2), coords)

    def f2(x):
        return frame_max(x, (0, 2), g, E)

    def f3(x):
        return frame_max(x, (0, 3), g, E)

    return {
        "sasaki_einstein": max(
            f2(deta + 2.0 * om[2]),
            f3(dom[0] - 3.0 * e_w2),
            f3(dom[1] + 3.0 * e_w1),
        ),
        "hypo": max(
            f3(dom[2]),
            frame_max(d_ew1, (0, 4), g, E),
            frame_max(d_ew2, (0, 4), g, E),
        ),
        "nc_lambda": max(
            f2(deta + 2.0 * lam * om[2]),
            f3(dom[0] - 3.0 * lam * e_w2),
            f3(dom[1] + 3.0 * lam * e_w1),
        ),
        "anc_lambda": max(
            f2(deta + 2.0 * lam * om[2]),
            f3(dom[0] - 2.0 * lam * e_w2),
            f3(dom[1] + 2.0 * lam * e_w1),
        ),
    }


def eta_einstein_fit(samples: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray]]
                     ) -> tuple[float, float, float]:
    """Least-squares fit Ric = a g + b eta(x)eta over pooled point samples.

    `samples` holds (g, eta, Ric) triples; returns (a, b, max residual).
    """
    if len(samples) == 0:
        raise ValueError("need at least one sample")
    cols_g, cols_e, rhs = [], [], []
    for g, eta, ric in samples:
        cols_g.append(np.asarray(g).ravel())
        cols_e.append(np.outer(eta, eta).ravel())
        rhs.append(np.asarray(ric).ravel())
    A = np.stack([np.concatenate(cols_g), np.concatenate(cols_e)], axis=1)
    y = np.concatenate(rhs)
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = 0.0
    for g, eta, ric in samples:
        diff = ric - a * g - b * np.outer(eta, eta)
        resid = max(resid, float(np.max(np.abs(diff))))
    return float(a), float(b), resid
