"""Skew-torsion connections solving the Einstein metricity condition on
almost nearly cosymplectic 5-manifolds, and their curvature.

For a generalized metric G = g + F on an almost contact metric structure the
condition X G(Y,Z) - G(D_Y X, Z) - G(Y, D_X Z) = 0 together with totally
skew torsion determines a unique connection D.  Solving the defining linear
system pointwise (it has full rank on the eta-bracket candidate space) gives

    g(D_X Y, Z) = g(nabla_X Y, Z) - 1/6 dF(X,Y,Z)
                  - 1/6 [ eta(X) d(eta)(Y,Z) + eta(Y) d(eta)(X,Z) ],

with torsion T = -1/3 dF.  Note the minus sign on the eta bracket: the
symmetric part is pinned by the metricity condition itself, and with the
opposite sign the G-derivative identity fails at order one (see
``printed_display_residuals`` for the companion sign-flipped displays, which
are evaluated as claims, not identities).  On the circle family over a
Sasaki-Einstein 5-manifold the same connection has a closed form in
Sasaki-Einstein data

    D_X Y = nabla~_X Y - 1/2 [ eta~(X) AY - eta~(Y) AX + 2/3 g~(AX, Y) xi~ ],

where A is the endomorphism of the rotated 2-form Omega^s_2 at the torsion
angle s.  The A terms carry the torsion; the eta bracket of the direct
formula, pushed through the deformation, contributes eta~ (x) phi_3 terms
that exactly cancel the phi_3 content of the Levi-Civita difference, so no
phi_3 terms remain.  The torsion of the member with fundamental
form Omega^t_2 is T_2(t) = T_1(t + pi/2), so the closed-form identities
stated at angle s apply to that member with s = t + pi/2; builders below
handle the shift.
"""

from __future__ import annotations

import numpy as np

from .connections import (
    AffineConnection,
    covariant_derivative,
    curvature,
    torsion_lowered,
    totally_skew_residual,
)
from .fields import TensorField, exterior_derivative, exterior_derivative_field, wedge
from .jets import Jet, jet_einsum, jet_inv
from .structures import AlmostContactMetricStructure, SU2Quadruple
from .tensoralg import frame_max, orthonormal_frame

__all__ = [
    "ngts_connection",
    "ngts_connection_closed",
    "connection_path_residual",
    "metricity_residuals",
    "printed_display_residuals",
    "torsion_residuals",
    "nabla_phi_residuals",
    "ngts_curvature_residuals",
    "ngts_ricci_fit",
    "NGTS_RICCI_REFERENCE",
]

# Reference coefficients for Ric = c1 g~ + c2 eta~ (x) eta~ + c3 Omega^s_1
# quoted in the literature for this connection family.  The least-squares
# decomposition of the directly computed Ricci tensor is the oracle; the fit
# is compared against these and any deviation is reported, not hidden.
NGTS_RICCI_REFERENCE = (5.0 / 3.0, 16.0 / 3.0, 4.0 / 3.0)


def ngts_connection(S: AlmostContactMetricStructure) -> AffineConnection:
    """The metricity connection of G = g + F built from the structure data
    (the direct formula above); coefficients carry one derivative order."""
    dF_field = exterior_derivative_field(S.F)
    deta_field = exterior_derivative_field(S.eta)
    lc = S.lc

    def gamma_jet(coords: np.ndarray) -> Jet:
        gamma = lc.gamma_jet(coords)
        ginv = jet_inv(S.g.jet(coords, 2))
        dF = dF_field.jet(coords, 1)
        deta = deta_field.jet(coords, 1)
        eta = S.eta.jet(coords, 2)
        K = dF * (-1.0 / 6.0) + (
            jet_einsum("i,jl->ijl", eta, deta) + jet_einsum("j,il->ijl", eta, deta)
        ) * (-1.0 / 6.0)
        return gamma + jet_einsum("kl,ijl->kij", ginv, K)

    return AffineConnection(gamma_jet, label=f"ngts({S.name})", metric=S.g)


def ngts_connection_closed(se: AlmostContactMetricStructure,
                           phiA: TensorField, omA: TensorField,
                           label: str = "ngts_closed") -> AffineConnection:
    """Closed form of the connection in Sasaki-Einstein data; ``phiA``/``omA``
    are the endomorphism and 2-form at the torsion angle."""
    lc = se.lc

    def gamma_jet(coords: np.ndarray) -> Jet:
        gamma = lc.gamma_jet(coords)
        eta = se.eta.jet(coords, 2)
        xi = se.xi.jet(coords, 2)
        A = phiA.jet(coords, 2)
        OmA = omA.jet(coords, 2)
        corr = (
            jet_einsum("i,kj->kij", eta, A)
            - jet_einsum("j,ki->kij", eta, A)
            + jet_einsum("ij,k->kij", OmA, xi) * (2.0 / 3.0)
        )
        return gamma + corr * (-0.5)

    return AffineConnection(gamma_jet, label=label, metric=se.g)


def connection_path_residual(conn_a: AffineConnection, conn_b: AffineConnection,
                             g: np.ndarray, p) -> float:
    diff = conn_a.gamma(p) - conn_b.gamma(p)
    return frame_max(diff, (1, 2), g)


def _cov02(gamma: np.ndarray, T: TensorField, p) -> np.ndarray:
    """(D_a T)(y, z) for a (0,2) field, derivative index first."""
    tj = T.jet(p, order=1)
    dT = np.moveaxis(tj.d, -1, 0)
    return (dT - np.einsum("may,mz->ayz", gamma, tj.val)
            - np.einsum("maz,ym->ayz", gamma, tj.val))


def metricity_residuals(S: AlmostContactMetricStructure,
                        conn: AffineConnection, p) -> dict[str, float]:
    """Residuals of the four covariant-derivative identities of the metricity
    connection: for G, for g, for F, and the torsion form of the G-identity."""
    g = S.g.value(p)
    phi = S.phi.value(p)
    eta = S.eta.value(p)
    E = orthonormal_frame(g)
    dF = exterior_derivative(S.F, p)
    deta = exterior_derivative(S.eta, p)

    gamma = conn.gamma(p)
    Dg = _cov02(gamma, S.g, p)
    DF = _cov02(gamma, S.F, p)
    DG = Dg + DF

    dF_phi = np.einsum("xym,mz->xyz", dF, phi)          # dF(X, Y, phi Z)
    rhs_G = (dF - dF_phi) / 3.0
    # (D_X g)(Y,Z) = -1/6 [eta(Y) d(eta)(Z,X) + eta(Z) d(eta)(Y,X)]; the sign
    # follows the eta bracket of the connection (see module docstring).
    rhs_g = -(np.einsum("y,zx->xyz", eta, deta) + np.einsum("z,yx->xyz", eta, deta)) / 6.0
    T = torsion_lowered(conn, g, p)
    rhs_T = -T + np.einsum("xym,mz->xyz", T, phi)       # -T(X,Y,Z) + T(X,Y,phi Z)
    return {
        "einstein_metricity": frame_max(DG - rhs_G, (0, 3), g, E),
        "nabla_g": frame_max(Dg - rhs_g, (0, 3), g, E),
        "nabla_F": frame_max(DF - (rhs_G - rhs_g), (0, 3), g, E),
        "metricity_torsion_form": frame_max(DG - rhs_T, (0, 3), g, E),
    }


def printed_display_residuals(S: AlmostContactMetricStructure,
                              conn: AffineConnection, p) -> dict[str, float]:
    """Residuals of the sign-flipped companion displays for (D g) and (D F),
    i.e. the variants with + 1/6 [eta(Y) d(eta)(Z,X) + eta(Z) d(eta)(Y,X)].

    These are evaluated as claims, not identities: for a connection solving
    the metricity condition they cannot hold together with the G-identity
    (the eta bracket enters g- and F-parts with opposite signs), so nonzero
    values here are expected and are reported, not asserted.  The key
    ``sign_flip_only`` checks that the discrepancy is exactly the sign of the
    eta bracket and nothing else; it should vanish.
    """
    g = S.g.value(p)
    phi = S.phi.value(p)
    eta = S.eta.value(p)
    E = orthonormal_frame(g)
    dF = exterior_derivative(S.F, p)
    deta = exterior_derivative(S.eta, p)
    gamma = conn.gamma(p)
    Dg = _cov02(gamma, S.g, p)
    DF = _cov02(gamma, S.F, p)
    dF_phi = np.einsum("xym,mz->xyz", dF, phi)
    rhs_G = (dF - dF_phi) / 3.0
    bracket = (np.einsum("y,zx->xyz", eta, deta)
               + np.einsum("z,yx->xyz", eta, deta)) / 6.0
    return {
        "display_g": frame_max(Dg - bracket, (0, 3), g, E),
        "display_F": frame_max(DF - (rhs_G - bracket), (0, 3), g, E),
        "sign_flip_only": frame_max(Dg + bracket, (0, 3), g, E),
    }


def torsion_residuals(S: AlmostContactMetricStructure, conn: AffineConnection,
                      Q_bar: SU2Quadruple, phi_base: TensorField,
                      t: float, lam: float, p) -> dict[str, float]:
    """Torsion of the connection: total skew-symmetry, T = -1/3 dF, the wedge
    form T = 2/3 lam (eta ^ Omega^t_1), and its sin/cos expansion in the base
    (angle-0) structure data."""
    g = S.g.value(p)
    E = orthonormal_frame(g)
    T = torsion_lowered(conn, g, p)
    dF = exterior_derivative(S.F, p)
    eta = S.eta.value(p)
    om1t = Q_bar.om1.value(p)
    out = {
        "skew": totally_skew_residual(conn, g, p),
        "dF": frame_max(T + dF / 3.0, (0, 3), g, E),
        "family_wedge": frame_max(
            T - (2.0 * lam / 3.0) * wedge(eta, 1, om1t, 2), (0, 3), g, E
        ),
    }
    if S.h is not None:
        h = S.h.value(p)
        phi0 = phi_base.value(p)
        form_ph = np.einsum("km,mi,kj->ij", phi0, h, g)   # g-bar(phi h ., .)
        form_p = np.einsum("ki,kj->ij", phi0, g)          # g-bar(phi ., .)
        sincos = (
            -(2.0 / 3.0) * np.cos(t) * wedge(eta, 1, form_ph, 2)
            + (2.0 * lam / 3.0) * np.sin(t) * wedge(eta, 1, form_p, 2)
        )
        out["family_sincos"] = frame_max(T - sincos, (0, 3), g, E)
    return out


def nabla_phi_residuals(Q: SU2Quadruple, h: TensorField, lam: float,
                        p) -> dict[str, float]:
    """Residuals of the Levi-Civita derivative formulas of the circle-family
    endomorphisms on a nearly cosymplectic quadruple of scale lam:

        g((nabla_X phi^t_2)Y, Z) = -lam (eta ^ Omega^t_1)(X, Y, Z)
        g((nabla_X phi^t_1)Y, Z) =  lam (eta ^ Omega^t_2)(X, Y, Z)
        g((nabla_X phi_3)Y, Z)   =  lam [g(X,Y) eta(Z) - g(X,Z) eta(Y)]
                                 = -1/lam g((nabla_X h)Y, Z).
    """
    from .connections import levi_civita

    g = Q.g.value(p)
    eta = Q.eta.value(p)
    E = orthonormal_frame(g)
    lc = levi_civita(Q.g)

    def nabla_low(f: TensorField) -> np.ndarray:
        C = covariant_derivative(lc, f, p)              # C[k, b, a]
        return np.einsum("kba,kc->abc", C, g)           # (nabla_a f b, c)

    om1, om2 = Q.om1.value(p), Q.om2.value(p)
    r2 = nabla_low(Q.phi(2)) + lam * wedge(eta, 1, om1, 2)
    r1 = nabla_low(Q.phi(1)) - lam * wedge(eta, 1, om2, 2)
    n3 = nabla_low(Q.phi(3))
    rhs3 = lam * (np.einsum("ab,c->abc", g, eta) - np.einsum("ac,b->abc", g, eta))
    out = {
        "nabla_phi2": frame_max(r2, (0, 3), g, E),
        "nabla_phi1": frame_max(r1, (0, 3), g, E),
        "nabla_phi3": frame_max(n3 - rhs3, (0, 3), g, E),
        "nabla_phi3_vs_h": frame_max(n3 + nabla_low(h) / lam, (0, 3), g, E),
    }
    return out


def _closed_curvature_rhs(se: AlmostContactMetricStructure, Q_s: SU2Quadruple,
                          p) -> np.ndarray:
    """Right-hand side of the closed curvature formula, R[k, i, j, l] for
    R(d_i, d_j) d_l, at the torsion-angle quadruple Q_s."""
    g = se.g.value(p)
    eta = se.eta.value(p)
    xi = se.xi.value(p)
    p3 = se.phi.value(p)
    om3 = Q_s.om3.value(p)
    OmB = Q_s.om1.value(p)          # Omega^s_1
    OmA = Q_s.om2.value(p)          # Omega^s_2
    B = Q_s.phi(1).value(p)
    A = Q_s.phi(2).value(p)
    eye = np.eye(g.shape[0])

    R = curvature(se.lc, p, g).R.copy()
    R += np.einsum("ij,kl->kijl", om3, A + 2.0 * p3)
    R += 0.75 * np.einsum("j,l,ki->kijl", eta, eta, eye + B)
    R += 0.5 * np.einsum("jl,ki->kijl", om3 - OmA / 3.0, A)
    R -= np.einsum("jl,ki->kijl", om3 - 2.0 * OmA / 3.0, p3)
    R -= 0.75 * np.einsum("i,l,kj->kijl", eta, eta, eye + B)
    R -= 0.5 * np.einsum("il,kj->kijl", om3 - OmA / 3.0, A)
    R += np.einsum("il,kj->kijl", om3 - 2.0 * OmA / 3.0, p3)
    bracket = (
        (5.0 / 6.0) * (np.einsum("i,jl->ijl", eta, g) - np.einsum("j,il->ijl", eta, g))
        + 0.5 * (np.einsum("i,jl->ijl", eta, OmB) - np.einsum("j,il->ijl", eta, OmB))
        - np.einsum("l,ij->ijl", eta, OmB)
    )
    R += np.einsum("ijl,k->kijl", bracket, xi)
    return R


def ngts_curvature_residuals(se: AlmostContactMetricStructure,
                             Q_s: SU2Quadruple, conn: AffineConnection,
                             p) -> dict[str, float]:
    """Direct curvature of the connection against the closed-form curvature,
    xi-contraction and Ricci displays quoted for this connection family.

    The displays are claims under test, not ground truth: the direct
    curvature (from connection-coefficient derivatives) is authoritative and
    the least-squares decomposition ``ngts_ricci_fit`` is the oracle for the
    Ricci coefficients.  Nonzero residuals here are reported as findings.
    """
    g = se.g.value(p)
    eta = se.eta.value(p)
    xi = se.xi.value(p)
    E = orthonormal_frame(g)
    eye = np.eye(g.shape[0])
    OmB = Q_s.om1.value(p)
    B = Q_s.phi(1).value(p)

    direct = curvature(conn, p, g)
    rhs = _closed_curvature_rhs(se, Q_s, p)
    R_xi = np.einsum("kijl,l->kij", direct.R, xi)
    rhs_xi = (
        1.75 * np.einsum("j,ki->kij", eta, eye)
        - 1.75 * np.einsum("i,kj->kij", eta, eye)
        + 0.75 * np.einsum("j,ki->kij", eta, B)
        - 0.75 * np.einsum("i,kj->kij", eta, B)
        - np.einsum("ij,k->kij", OmB, xi)
    )
    ric_rhs = (5.0 / 3.0) * g + (16.0 / 3.0) * np.outer(eta, eta) + (4.0 / 3.0) * OmB
    return {
        "curvature_closed": frame_max(direct.R - rhs, (1, 3), g, E),
        "curvature_xi": frame_max(R_xi - rhs_xi, (1, 2), g, E),
        "ricci_closed": frame_max(direct.Ric - ric_rhs, (0, 2), g, E),
    }


def ngts_ricci_fit(samples: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]
                   ) -> tuple[tuple[float, float, float], float]:
    """Pooled least squares Ric = c1 g + c2 eta(x)eta + c3 Omega^s_1 over
    (g, eta, OmB, Ric) samples; returns the coefficients and max residual."""
    if not samples:
        raise ValueError("need at least one sample")
    cols = [[], [], []]
    rhs = []
    for g, eta, omb, ric in samples:
        cols[0].append(np.asarray(g).ravel())
        cols[1].append(np.outer(eta, eta).ravel())
        cols[2].append(np.asarray(omb).ravel())
        rhs.append(np.asarray(ric).ravel())
    A = np.stack([np.concatenate(c) for c in cols], axis=1)
    y = np.concatenate(rhs)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = 0.0
    for g, eta, omb, ric in samples:
        model = coef[0] * g + coef[1] * np.outer(eta, eta) + coef[2] * omb
        resid = max(resid, float(np.max(np.abs(ric - model))))
    return (float(coef[0]), float(coef[1]), float(coef[2])), resid
