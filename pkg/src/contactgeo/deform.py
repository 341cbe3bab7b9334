"""D-homothetic deformations, the circle family of nearly cosymplectic
structures on a Sasaki-Einstein 5-manifold, and the attached Sasaki-Einstein
structure of a nearly cosymplectic one.

The D-homothety with ratio a maps (phi, xi, eta, g) to

    phi -> phi,  xi -> xi/a,  eta -> a eta,  g -> a g + (a^2 - a) eta (x) eta.

With a = 3/2 it turns a nearly cosymplectic structure into an almost nearly
cosymplectic one (and a = 2/3 undoes it); the h-tensor is unchanged.  The two
Levi-Civita connections are related, for Killing xi, by

    g(nabla-bar_X Y, Z) = g(nabla_X Y, Z)
        + (a^2-a)/(2a) [ d(eta)(X,Z) eta(Y) + d(eta)(Y,Z) eta(X) ].
"""

from __future__ import annotations

import numpy as np

from .connections import curvature, levi_civita
from .fields import TensorField, exterior_derivative
from .jets import Jet, jet_einsum
from .structures import (
    AlmostContactMetricStructure,
    SU2Quadruple,
    endo_field_from_form,
)
from .tensoralg import frame_max, orthonormal_frame

__all__ = [
    "deformed_metric_field",
    "d_homothety",
    "dhom_connection_residual",
    "anc_curvature_residuals",
    "attached_sasaki_einstein",
    "circle_family",
]


def deformed_metric_field(g: TensorField, eta: TensorField, a: float) -> TensorField:
    def func(x: Jet) -> Jet:
        ej = eta.jet(x.val, x.order)
        return g.jet(x.val, x.order) * a + jet_einsum("i,j->ij", ej, ej) * (a * a - a)

    return TensorField((0, 2), func, g.chart, f"dhom[{a:g}]({g.name})")


def d_homothety(S: AlmostContactMetricStructure, a: float) -> AlmostContactMetricStructure:
    if a == 0:
        raise ValueError("deformation ratio must be nonzero")
    gbar = deformed_metric_field(S.g, S.eta, a)
    eta_bar = TensorField((0, 1), lambda x: S.eta.jet(x.val, x.order) * a, S.chart, "eta_bar")
    xi_bar = TensorField((1, 0), lambda x: S.xi.jet(x.val, x.order) * (1.0 / a), S.chart, "xi_bar")
    return AlmostContactMetricStructure(
        S.phi, xi_bar, eta_bar, gbar, S.chart,
        lam=S.lam, h=S.h, name=f"{S.name}_dhom_{a:g}",
    )


def dhom_connection_residual(S: AlmostContactMetricStructure, a: float,
                             coords: np.ndarray) -> dict[str, float]:
    """Residual of the Levi-Civita relation between g and its deformation,
    plus (when an h-tensor is attached) the a = 3/2 vector form

        nabla-bar_X Y = nabla_X Y + 1/2 eta(Y) hX + 1/2 eta(X) hY.
    """
    Sbar = d_homothety(S, a)
    g = S.g.value(coords)
    eta = S.eta.value(coords)
    deta = exterior_derivative(S.eta, coords)
    E = orthonormal_frame(g)
    gamma = S.lc.gamma(coords)
    gamma_bar = levi_civita(Sbar.g).gamma(coords)
    diff = np.einsum("kab,kc->abc", gamma_bar - gamma, g)
    coef = (a * a - a) / (2.0 * a)
    rhs = coef * (
        np.einsum("ac,b->abc", deta, eta) + np.einsum("bc,a->abc", deta, eta)
    )
    out = {"lc_relation": frame_max(diff - rhs, (0, 3), g, E)}
    if S.h is not None and abs(a - 1.5) < 1e-12:
        h = S.h.value(coords)
        vec = gamma_bar - gamma - 0.5 * (
            np.einsum("b,ka->kab", eta, h) + np.einsum("a,kb->kab", eta, h)
        )
        out["vector_form"] = frame_max(vec, (1, 2), g, E)
    return out


def anc_curvature_residuals(S_nc: AlmostContactMetricStructure,
                            coords) -> dict[str, float]:
    """Curvature of the a = 3/2 deformation of a nearly cosymplectic structure
    against its closed forms, with both curvatures computed independently.

    Checks, with (phi, eta, xi, g, h) the nearly cosymplectic data of scale
    lam and bars denoting the deformed structure:

      * ``curvature_nc``: R-bar(Z,X)Y = R(Z,X)Y + 1/2 g(hZ,Y)hX
        - 1/2 g(hX,Y)hZ + g(hZ,X)hY + 5/4 eta(Y)eta(Z)h^2X
        - 5/4 eta(Y)eta(X)h^2Z + 1/2 [eta(X)g(h^2Z,Y) - eta(Z)g(h^2X,Y)] xi;
      * ``curvature_se``: the same relation rewritten through the attached
        Sasaki-Einstein data (phi~ = -h/lam, g~ = lam^2 g, eta~ = lam eta):
        R-bar(Z,X)Y = R~(Z,X)Y + 1/2 g~(phi~Z,Y)phi~X - 1/2 g~(phi~X,Y)phi~Z
        + g~(phi~Z,X)phi~Y - 5/4 eta~(Y)eta~(Z)X + 5/4 eta~(Y)eta~(X)Z
        - 1/2 [eta~(X)g~(Z,Y) - eta~(Z)g~(X,Y)] xi~;
      * ``reeb_curvature``: R-bar(Z,X)xi-bar = lam^2 [eta-bar(X)Z - eta-bar(Z)X];
      * ``ricci_relation``: Ric-bar = Ric + g(h^2.,.) - 5/4 tr(h^2) eta (x) eta;
      * ``sasakian_reeb``: R~(X,Y)xi~ = eta~(Y)X - eta~(X)Y for the attached
        Sasakian structure.
    """
    if S_nc.h is None or S_nc.lam is None:
        raise ValueError("needs a nearly cosymplectic structure with h and lam")
    lam = S_nc.lam
    Sbar = d_homothety(S_nc, 1.5)
    g = S_nc.g.value(coords)
    gbar = Sbar.g.value(coords)
    eta = S_nc.eta.value(coords)
    xi = S_nc.xi.value(coords)
    h = S_nc.h.value(coords)
    h2 = h @ h
    gh = np.einsum("ki,kj->ij", h, g)       # g(h., .)
    gh2 = np.einsum("ki,kj->ij", h2, g)     # g(h^2., .)
    eye = np.eye(g.shape[0])
    E = orthonormal_frame(g)

    cv = curvature(S_nc.lc, coords, g)
    cv_bar = curvature(levi_civita(Sbar.g), coords, gbar)

    # R[k, i, j, l] with i = Z, j = X, l = Y.
    rhs = cv.R.copy()
    rhs += 0.5 * np.einsum("il,kj->kijl", gh, h)
    rhs -= 0.5 * np.einsum("jl,ki->kijl", gh, h)
    rhs += np.einsum("ij,kl->kijl", gh, h)
    rhs += 1.25 * np.einsum("l,i,kj->kijl", eta, eta, h2)
    rhs -= 1.25 * np.einsum("l,j,ki->kijl", eta, eta, h2)
    rhs += 0.5 * np.einsum("j,il,k->kijl", eta, gh2, xi)
    rhs -= 0.5 * np.einsum("i,jl,k->kijl", eta, gh2, xi)
    out = {"curvature_nc": frame_max(cv_bar.R - rhs, (1, 3), g, E)}

    se = attached_sasaki_einstein(S_nc, lam)
    g_t = se.g.value(coords)
    eta_t = se.eta.value(coords)
    xi_t = se.xi.value(coords)
    phi_t = se.phi.value(coords)
    om_t = np.einsum("ki,kj->ij", phi_t, g_t)   # g~(phi~., .)
    cv_t = curvature(se.lc, coords, g_t)
    rhs_se = cv_t.R.copy()
    rhs_se += 0.5 * np.einsum("il,kj->kijl", om_t, phi_t)
    rhs_se -= 0.5 * np.einsum("jl,ki->kijl", om_t, phi_t)
    rhs_se += np.einsum("ij,kl->kijl", om_t, phi_t)
    rhs_se -= 1.25 * np.einsum("l,i,kj->kijl", eta_t, eta_t, eye)
    rhs_se += 1.25 * np.einsum("l,j,ki->kijl", eta_t, eta_t, eye)
    rhs_se -= 0.5 * np.einsum("j,il,k->kijl", eta_t, g_t, xi_t)
    rhs_se += 0.5 * np.einsum("i,jl,k->kijl", eta_t, g_t, xi_t)
    out["curvature_se"] = frame_max(cv_bar.R - rhs_se, (1, 3), g, E)

    eta_bar = Sbar.eta.value(coords)
    xi_bar = Sbar.xi.value(coords)
    r_xi = np.einsum("kijl,l->kij", cv_bar.R, xi_bar)
    rxi_rhs = lam * lam * (
        np.einsum("j,ki->kij", eta_bar, eye) - np.einsum("i,kj->kij", eta_bar, eye)
    )
    out["reeb_curvature"] = frame_max(r_xi - rxi_rhs, (1, 2), g, E)

    ric_rhs = cv.Ric + gh2 - 1.25 * np.trace(h2) * np.outer(eta, eta)
    out["ricci_relation"] = frame_max(cv_bar.Ric - ric_rhs, (0, 2), g, E)

    r_xi_t = np.einsum("kijl,l->kij", cv_t.R, xi_t)
    sas_rhs = np.einsum("j,ki->kij", eta_t, eye) - np.einsum("i,kj->kij", eta_t, eye)
    # Sasakian convention R(X,Y)xi with X = slot i, Y = slot j.
    out["sasakian_reeb"] = frame_max(r_xi_t - sas_rhs, (1, 2), g, E)
    return out


def attached_sasaki_einstein(S: AlmostContactMetricStructure,
                             lam: float) -> AlmostContactMetricStructure:
    """The Sasaki-Einstein structure homothetically attached to a nearly
    cosymplectic structure of scale lam:

        phi~ = -h/lam,  eta~ = lam eta,  xi~ = xi/lam,  g~ = lam^2 g.
    """
    if S.h is None:
        raise ValueError("attached structure needs the h-tensor field")
    if lam == 0:
        raise ValueError("scale lam must be nonzero")
    h = S.h
    phi_t = TensorField((1, 1), lambda x: h.jet(x.val, x.order) * (-1.0 / lam), S.chart, "phi_se")
    eta_t = TensorField((0, 1), lambda x: S.eta.jet(x.val, x.order) * lam, S.chart, "eta_se")
    xi_t = TensorField((1, 0), lambda x: S.xi.jet(x.val, x.order) * (1.0 / lam), S.chart, "xi_se")
    g_t = TensorField((0, 2), lambda x: S.g.jet(x.val, x.order) * lam**2, S.chart, "g_se")
    h_t = TensorField((1, 1), h.func, S.chart, "h")
    return AlmostContactMetricStructure(
        phi_t, xi_t, eta_t, g_t, S.chart, lam=1.0, h=h_t,
        name=f"{S.name}_attached_se",
    )


def circle_family(S_nc: AlmostContactMetricStructure, Q: SU2Quadruple,
                  t: float) -> tuple[AlmostContactMetricStructure, SU2Quadruple]:
    """Rotate the (omega_1, omega_2) pair of an SU(2) quadruple by angle t:

        Omega^t_1 =  cos t omega_1 + sin t omega_2,
        Omega^t_2 = -sin t omega_1 + cos t omega_2,

    and return the nearly cosymplectic member whose fundamental form is
    Omega^t_2, together with the rotated quadruple.  The metric, eta, xi,
    omega_3 and the h-tensor are unchanged.
    """
    c, s = float(np.cos(t)), float(np.sin(t))

    def rot1(x: Jet) -> Jet:
        return Q.om1.jet(x.val, x.order) * c + Q.om2.jet(x.val, x.order) * s

    def rot2(x: Jet) -> Jet:
        return Q.om1.jet(x.val, x.order) * (-s) + Q.om2.jet(x.val, x.order) * c

    om1_t = TensorField((0, 2), rot1, Q.chart, f"Omega_1[t={t:g}]")
    om2_t = TensorField((0, 2), rot2, Q.chart, f"Omega_2[t={t:g}]")
    Q_t = SU2Quadruple(Q.eta, om1_t, om2_t, Q.om3, Q.g, Q.xi, Q.chart,
                       lam=Q.lam, name=f"{Q.name}[t={t:g}]")
    phi_t = endo_field_from_form(om2_t, Q.g, name=f"phi_2[t={t:g}]")
    S_t = AlmostContactMetricStructure(
        phi_t, S_nc.xi, S_nc.eta, S_nc.g, S_nc.chart,
        lam=S_nc.lam, h=S_nc.h, name=f"{S_nc.name}[t={t:g}]",
    )
    return S_t, Q_t
