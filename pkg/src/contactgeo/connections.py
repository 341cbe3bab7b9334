"""Affine connections: Levi-Civita construction, covariant derivatives,
torsion, curvature, Ricci and Killing residuals.

Coefficient convention: nabla_{d_i} d_j = Gamma^k_{ij} d_k, stored as
gamma[k, i, j].  Curvature operator convention:

    R(Z, X)Y = nabla_Z nabla_X Y - nabla_X nabla_Z Y - nabla_{[Z,X]} Y

stored as R[k, i, j, l] = component k of R(d_i, d_j) d_l.  The Ricci tensor
traces over the differentiating slot, Ric[j, l] = R[k, k, j, l]; with this
orientation the round unit 5-sphere has Ric = +4 g and Scal = 20.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import TensorField, _coords_of
from .jets import Jet, jet_einsum, jet_inv

__all__ = [
    "AffineConnection",
    "CurvatureAtPoint",
    "levi_civita",
    "covariant_derivative",
    "torsion",
    "torsion_lowered",
    "totally_skew_residual",
    "curvature",
    "killing_residual",
]


@dataclass
class AffineConnection:
    """Connection coefficients as a jet-evaluable field.

    `gamma_jet(coords)` returns a Jet of gamma[k, i, j] of order >= 1 so that
    curvature (which needs dGamma) is available.
    """

    gamma_jet: Callable[[np.ndarray], Jet]
    label: str = "custom"
    metric: TensorField | None = None

    def __post_init__(self):
        from .fields import default_engine

        inner = self.gamma_jet
        cache: list[tuple[tuple, Jet] | None] = [None]

        def cached(coords: np.ndarray) -> Jet:
            key = (default_engine().mode, coords.tobytes())
            if cache[0] is not None and cache[0][0] == key:
                return cache[0][1]
            out = inner(coords)
            cache[0] = (key, out)
            return out

        self.gamma_jet = cached

    def gamma(self, coords) -> np.ndarray:
        return self.gamma_jet(_coords_of(coords)).val


def levi_civita(g_field: TensorField, label: str = "levi_civita") -> AffineConnection:
    """Levi-Civita connection of a metric field via the coordinate Koszul
    formula Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})."""

    def gamma_jet(coords: np.ndarray) -> Jet:
        gj = g_field.jet(coords, order=2)
        ginv = jet_inv(gj)
        # dg carries (value, derivative) of the metric gradient d_m g_{jl}.
        dg = Jet(gj.d, gj.dd, None)
        t1 = dg.transpose(2, 0, 1)  # [i, j, l] = d_i g_{jl}
        t2 = dg.transpose(0, 2, 1)  # [i, j, l] = d_j g_{il}
        t3 = dg                     # [i, j, l] = d_l g_{ij}
        P = t1 + t2 - t3
        return jet_einsum("kl,ijl->kij", ginv, P) * 0.5

    return AffineConnection(gamma_jet, label=label, metric=g_field)


def covariant_derivative(conn: AffineConnection, T: TensorField,
                         coords: np.ndarray) -> np.ndarray:
    """(nabla T) at a point; the differentiation index is the LAST axis.

    nabla_a T^{i..}_{j..} = d_a T + Gamma^{i}_{am} T^{m..}_{j..} (per upper
    slot) - Gamma^{m}_{aj} T^{..}_{m..} (per lower slot).
    """
    p, q = T.rank
    tj = T.jet(coords, order=1)
    gamma = conn.gamma(coords)
    out = tj.d.copy()  # shape comp + (dim,), derivative axis last
    comp = tj.val
    for s in range(p):
        t = np.tensordot(gamma, comp, axes=([2], [s]))  # (k, a) + rest
        t = np.moveaxis(t, 1, -1)                       # (k,) + rest + (a,)
        t = np.moveaxis(t, 0, s)                        # k back into slot s
        out = out + t
    for s in range(q):
        ax = p + s
        t = np.tensordot(gamma, comp, axes=([0], [ax]))  # (a, j) + rest
        t = np.moveaxis(t, 0, -1)                        # (j,) + rest + (a,)
        t = np.moveaxis(t, 0, ax)                        # j back into slot ax
        out = out - t
    return out


def torsion(conn: AffineConnection, coords: np.ndarray) -> np.ndarray:
    """T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}."""
    gamma = conn.gamma(coords)
    return gamma - gamma.swapaxes(1, 2)


def torsion_lowered(conn: AffineConnection, g: np.ndarray,
                    coords: np.ndarray) -> np.ndarray:
    """T(X, Y, Z) = g(T(X, Y), Z), stored T[i, j, k]."""
    return np.einsum("lij,lk->ijk", torsion(conn, coords), g)


def totally_skew_residual(conn: AffineConnection, g: np.ndarray,
                          coords: np.ndarray) -> float:
    from .jets import alternate

    low = torsion_lowered(conn, g, coords)
    return float(np.max(np.abs(low - alternate(low, 3))))


@dataclass
class CurvatureAtPoint:
    R: np.ndarray            # R[k, i, j, l]: component k of R(d_i, d_j) d_l
    Ric: np.ndarray          # Ric[j, l]
    Scal: float | None       # g-trace of Ric (None if no metric attached)

    def operator(self, Z: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return np.einsum("kijl,i,j,l->k", self.R, Z, X, Y)


def curvature(conn: AffineConnection, coords,
              g: np.ndarray | None = None) -> CurvatureAtPoint:
    gj = conn.gamma_jet(_coords_of(coords))
    gamma, dgamma = gj.val, gj.d  # dgamma[k, i, j, m] = d_m Gamma^k_{ij}
    term1 = np.einsum("kjlm->kmjl", dgamma)             # d_i Gamma^k_{jl}
    term2 = np.einsum("kilm->kiml", dgamma)             # d_j Gamma^k_{il}
    term3 = np.einsum("kim,mjl->kijl", gamma, gamma)
    term4 = np.einsum("kjm,mil->kijl", gamma, gamma)
    R = term1 - term2 + term3 - term4
    Ric = np.einsum("kkjl->jl", R)
    Scal = None
    if g is None and conn.metric is not None:
        g = conn.metric.value(coords)
    if g is not None:
        Scal = float(np.einsum("jl,jl->", np.linalg.inv(g), Ric))
    return CurvatureAtPoint(R=R, Ric=Ric, Scal=Scal)


def curvature_lowered(curv: CurvatureAtPoint, g: np.ndarray) -> np.ndarray:
    """R(Z, X, Y, W) = g(R(Z, X)Y, W), stored R[i, j, l, w]."""
    return np.einsum("kijl,kw->ijlw", curv.R, g)


def killing_residual(g_field: TensorField, xi_field: TensorField,
                     coords: np.ndarray,
                     conn: AffineConnection | None = None) -> dict[str, float]:
    """Symmetrized nabla(eta) residual plus the half-d(eta) identity.

    Returns max-over-frame residuals of (nabla_X eta)Y + (nabla_Y eta)X and of
    (nabla_X eta)Y - 1/2 d(eta)(X, Y).
    """
    from .fields import exterior_derivative
    from .tensoralg import frame_max
    from .jets import jet_einsum as je

    if conn is None:
        conn = levi_civita(g_field)
    eta_field = TensorField(
        (0, 1),
        lambda x: je("ij,j->i", g_field.func(x), xi_field.func(x)),
        g_field.chart,
        "eta",
    )
    nabla_eta = covariant_derivative(conn, eta_field, coords)  # [i, a]: (nabla_a eta)_i
    nab = nabla_eta.T  # [a, i] -> (nabla_X eta)Y with X first
    deta = exterior_derivative(eta_field, coords)
    g = g_field.value(coords)
    return {
        "killing": frame_max(nab + nab.T, (0, 2), g),
        "half_deta": frame_max(nab - 0.5 * deta, (0, 2), g),
    }
