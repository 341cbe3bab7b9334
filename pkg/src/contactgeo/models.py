"""Concrete 5-manifold models and their deterministic point samplers.

Two base geometries:

* ``flat_cosymplectic`` — R^5 with the flat metric, phi the standard complex
  structure on the first four coordinates, xi the translation field along the
  fifth.  Everything is parallel: the degenerate reference model.

* ``s5_se`` — the round unit 5-sphere in two antipodal stereographic charts,
  carrying the standard Sasaki-Einstein SU(2) quadruple pulled back from the
  ambient C^3 structure: eta = g(., xi) with xi the Hopf field, omega_3 the
  fundamental 2-form, and (omega_1, omega_2) the real/imaginary parts of the
  contraction of the holomorphic volume form dz1^dz2^dz3 with the unit normal.

* ``s5_anc`` — a D-homothetic deformation (ratio ``a``) of the nearly
  cosymplectic member of the circle family on the sphere at angle ``t``;
  provided by :func:`build_anc_s5` on top of the deformation module.

Samplers use the counter-based Philox generator keyed by (seed, index), so
point k of a run is reproducible independently of batch size.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .fields import Chart, ChartPoint, TensorField
from .jets import Jet, jet_einsum, jet_stack
from .structures import (
    AlmostContactMetricStructure,
    SU2Quadruple,
    acm_residuals,
    endo_field_from_form,
    fundamental_form_field,
    su2_system_residuals,
)

__all__ = [
    "Model",
    "ModelBuildError",
    "MODEL_BUILDERS",
    "build_model",
    "build_flat_cosymplectic",
    "build_s5_sasaki_einstein",
    "build_anc_s5",
]


class ModelBuildError(RuntimeError):
    """A registration self-check of a model failed; the message names it."""


@dataclass
class Model:
    """A chart atlas with the structure data living on each chart.

    ``structures`` holds the primary almost contact metric structure per
    chart; ``nc_structures`` the nearly cosymplectic companion where one
    exists; ``su2`` the SU(2) quadruple per chart.
    """

    name: str
    charts: dict[str, Chart]
    structures: dict[str, AlmostContactMetricStructure]
    su2: dict[str, SU2Quadruple]
    lam: float
    sampler: Callable[[int, int], list[ChartPoint]]
    nc_structures: dict[str, AlmostContactMetricStructure] = dc_field(default_factory=dict)
    params: dict = dc_field(default_factory=dict)

    def structure_at(self, p: ChartPoint) -> AlmostContactMetricStructure:
        return self.structures[p.chart_id]

    def su2_at(self, p: ChartPoint) -> SU2Quadruple:
        return self.su2[p.chart_id]


def _philox_points(seed: int, n: int, dim: int) -> np.ndarray:
    """n x dim standard normal draws, keyed per point index."""
    out = np.empty((n, dim))
    for k in range(n):
        rng = np.random.Generator(np.random.Philox(key=seed, counter=k))
        out[k] = rng.standard_normal(dim)
    return out


# --------------------------------------------------------------------- flat

_J4 = np.zeros((5, 5))
_J4[1, 0], _J4[0, 1] = 1.0, -1.0
_J4[3, 2], _J4[2, 3] = 1.0, -1.0
# Self-dual symplectic triple on the first four coordinates; the quaternion
# relations phi_1 phi_2 = phi_3 (cyclically) are asserted at build time.
_FLAT_OM1 = np.zeros((5, 5))
_FLAT_OM1[0, 2], _FLAT_OM1[2, 0] = 1.0, -1.0
_FLAT_OM1[3, 1], _FLAT_OM1[1, 3] = 1.0, -1.0
_FLAT_OM2 = np.zeros((5, 5))
_FLAT_OM2[0, 3], _FLAT_OM2[3, 0] = 1.0, -1.0
_FLAT_OM2[1, 2], _FLAT_OM2[2, 1] = 1.0, -1.0
_FLAT_OM3 = np.zeros((5, 5))
_FLAT_OM3[0, 1], _FLAT_OM3[1, 0] = 1.0, -1.0
_FLAT_OM3[2, 3], _FLAT_OM3[3, 2] = 1.0, -1.0


def build_flat_cosymplectic(**params) -> Model:
    chart = Chart("cart", 5, lambda c: bool(np.max(np.abs(c)) < 50.0))
    const = lambda arr: (lambda x: jet_einsum(",ij->ij", x[0] * 0.0 + 1.0, arr))
    g = TensorField((0, 2), const(np.eye(5)), chart, "g")
    phi = TensorField((1, 1), const(_J4), chart, "phi")

    def vec(arr):
        return lambda x: jet_einsum(",i->i", x[0] * 0.0 + 1.0, arr)

    xi = TensorField((1, 0), vec(np.array([0.0, 0, 0, 0, 1.0])), chart, "xi")
    eta = TensorField((0, 1), vec(np.array([0.0, 0, 0, 0, 1.0])), chart, "eta")
    h = TensorField((1, 1), const(np.zeros((5, 5))), chart, "h")
    S = AlmostContactMetricStructure(phi, xi, eta, g, chart, lam=0.0, h=h,
                                     name="flat_cosymplectic")
    Q = SU2Quadruple(
        eta,
        TensorField((0, 2), const(_FLAT_OM1), chart, "omega_1"),
        TensorField((0, 2), const(_FLAT_OM2), chart, "omega_2"),
        TensorField((0, 2), const(_FLAT_OM3), chart, "omega_3"),
        g, xi, chart, lam=0.0, name="flat_cosymplectic",
    )

    def sampler(n: int, seed: int) -> list[ChartPoint]:
        return [ChartPoint("cart", c) for c in _philox_points(seed, n, 5)]

    model = Model("flat_cosymplectic", {"cart": chart}, {"cart": S}, {"cart": Q},
                  0.0, sampler, nc_structures={"cart": S}, params=dict(params))
    _register_checks_flat(model)
    return model


def _register_checks_flat(model: Model) -> None:
    p = ChartPoint("cart", np.array([0.3, -0.1, 0.7, 0.2, -0.5]))
    S = model.structures["cart"]
    res = acm_residuals(S, p)
    for key, value in res.items():
        if value > 1e-12:
            raise ModelBuildError(f"flat_cosymplectic: compatibility {key} = {value:.3e}")
    alg = model.su2["cart"].algebra_residuals(p)
    for key in ("wedge_12", "wedge_13", "wedge_23", "wedge_11", "wedge_22",
                "wedge_33", "quaternion"):
        if alg[key] > 1e-12:
            raise ModelBuildError(f"flat_cosymplectic: SU(2) algebra {key} = {alg[key]:.3e}")
    if alg["volume_scale"] < 1e-6:
        raise ModelBuildError("flat_cosymplectic: degenerate volume form")


# ----------------------------------------------------------------- 5-sphere

_JC = np.zeros((6, 6))
for _k in range(3):
    _JC[2 * _k + 1, 2 * _k], _JC[2 * _k, 2 * _k + 1] = 1.0, -1.0

# Orientation of (omega_1, omega_2) relative to Re/Im of the holomorphic
# 2-form: fixed once by the quaternion relation phi_1 phi_2 = phi_3 and the
# differential system d(omega_1) = 3 eta ^ omega_2 (asserted at build time).
_S5_SIGN_OM2 = -1.0

_CHART_RADIUS = 1.25


def _s5_chart(ps: float) -> Chart:
    cid = "stereo_n" if ps > 0 else "stereo_s"
    return Chart(cid, 5, lambda c: bool(c @ c < _CHART_RADIUS**2))


def _s5_geometry(x: Jet, ps: float) -> dict[str, Jet]:
    """Ambient embedding and both differentials at a chart jet.

    The chart inverse-projects from the pole (0,...,0, ps): the ambient point
    is sigma(u) = (2u, ps(|u|^2 - 1)) / (1 + |u|^2) and pi is its inverse.
    Jacobians are closed-form; their consistency with the autodiff jets of
    sigma and pi is unit-tested.
    """
    s = jet_einsum("i,i->", x, x) + 1.0
    inv_s = 1.0 / s
    amb = jet_stack([x[i] * 2.0 * inv_s for i in range(5)] + [(s - 2.0) * ps * inv_s])
    uu = jet_einsum("i,j->ij", x, x)
    top = inv_s * (2.0 * np.eye(5)) - (inv_s * inv_s * 4.0) * uu
    bottom = (inv_s * inv_s * (4.0 * ps)) * x
    dsig = jet_stack([top[i] for i in range(5)] + [bottom])  # (6, 5)

    invw = 1.0 / (1.0 - ps * amb[5])
    e_last = np.zeros(6)
    e_last[5] = 1.0
    dpi = jet_einsum(",ij->ij", invw, np.eye(5, 6)) + jet_einsum(
        ",i,j->ij", invw * invw * ps, amb[(slice(0, 5),)], e_last
    )  # (5, 6)
    return {"amb": amb, "dsig": dsig, "dpi": dpi}


def _s5_fields(chart: Chart, ps: float) -> dict[str, TensorField]:
    def g_func(x: Jet) -> Jet:
        geo = _s5_geometry(x, ps)
        return jet_einsum("ci,cj->ij", geo["dsig"], geo["dsig"])

    def xi_amb(geo):
        return jet_einsum("cd,d->c", _JC, geo["amb"])

    def eta_func(x: Jet) -> Jet:
        geo = _s5_geometry(x, ps)
        return jet_einsum("ci,c->i", geo["dsig"], xi_amb(geo))

    def xi_func(x: Jet) -> Jet:
        geo = _s5_geometry(x, ps)
        return jet_einsum("ic,c->i", geo["dpi"], xi_amb(geo))

    def phi3_func(x: Jet) -> Jet:
        geo = _s5_geometry(x, ps)
        n = xi_amb(geo)
        phi_amb = -jet_einsum(",cd->cd", x[0] * 0.0 + 1.0, _JC) - jet_einsum(
            "c,d->cd", geo["amb"], n
        )
        return jet_einsum("ic,cd,dj->ij", geo["dpi"], phi_amb, geo["dsig"])

    def psi_func(x: Jet) -> Jet:
        geo = _s5_geometry(x, ps)
        dsig, amb = geo["dsig"], geo["amb"]
        Bz = jet_stack([dsig[2 * k] + dsig[2 * k + 1] * 1j for k in range(3)])
        wz = jet_stack([amb[2 * k] + amb[2 * k + 1] * 1j for k in range(3)])
        C = jet_stack([Bz[1], Bz[2], Bz[0]])
        D = jet_stack([Bz[2], Bz[0], Bz[1]])
        psi = jet_einsum("k,ki,kj->ij", wz, C, D)
        return psi - psi.transpose(1, 0)

    g = TensorField((0, 2), g_func, chart, "g")
    return {
        "g": g,
        "eta": TensorField((0, 1), eta_func, chart, "eta"),
        "xi": TensorField((1, 0), xi_func, chart, "xi"),
        "phi3": TensorField((1, 1), phi3_func, chart, "phi_3"),
        "om1": TensorField((0, 2), lambda x: psi_func(x).real, chart, "omega_1"),
        "om2": TensorField((0, 2), lambda x: psi_func(x).imag * _S5_SIGN_OM2,
                           chart, "omega_2"),
    }


def build_s5_sasaki_einstein(**params) -> Model:
    charts, structures, su2, nc_structures = {}, {}, {}, {}
    for ps in (1.0, -1.0):
        chart = _s5_chart(ps)
        f = _s5_fields(chart, ps)
        om3 = fundamental_form_field(f["phi3"], f["g"])
        om3 = TensorField(om3.rank, om3.func, chart, "omega_3")
        Q = SU2Quadruple(f["eta"], f["om1"], f["om2"], om3, f["g"], f["xi"],
                         chart, lam=1.0, name="s5_se")
        # h = nabla(xi) = -phi_3 here (closed form, so h-dependent fields keep
        # both derivative orders); the nearly cosymplectic member is phi_2.
        h = TensorField((1, 1), lambda x, _f=f: -_f["phi3"].jet(x.val, x.order), chart, "h")
        S_se = AlmostContactMetricStructure(f["phi3"], f["xi"], f["eta"], f["g"],
                                            chart, lam=1.0, h=h, name="s5_se")
        phi2 = Q.phi(2)
        S_nc = AlmostContactMetricStructure(phi2, f["xi"], f["eta"], f["g"],
                                            chart, lam=1.0, h=h, name="s5_nc")
        charts[chart.chart_id] = chart
        structures[chart.chart_id] = S_se
        su2[chart.chart_id] = Q
        nc_structures[chart.chart_id] = S_nc

    model = Model("s5_se", charts, structures, su2, 1.0, _s5_sampler,
                  nc_structures=nc_structures, params=dict(params))
    _register_checks_s5(model)
    return model


def _s5_sampler(n: int, seed: int) -> list[ChartPoint]:
    draws = _philox_points(seed, n, 6)
    out = []
    for row in draws:
        x = row / np.linalg.norm(row)
        ps = 1.0 if x[5] <= 0 else -1.0
        u = x[:5] / (1.0 - ps * x[5])
        out.append(ChartPoint("stereo_n" if ps > 0 else "stereo_s", u))
    return out


def _register_checks_s5(model: Model) -> None:
    from .connections import curvature

    pts = model.sampler(3, seed=20260825)
    for p in pts:
        S = model.structure_at(p)
        res = acm_residuals(S, p)
        for key, value in res.items():
            if value > 1e-9:
                raise ModelBuildError(f"s5_se: compatibility {key} = {value:.3e} at {p}")
        alg = model.su2_at(p).algebra_residuals(p)
        for key in ("wedge_12", "wedge_13", "wedge_23", "wedge_11", "wedge_22",
                    "wedge_33", "quaternion"):
            if alg[key] > 1e-8:
                raise ModelBuildError(f"s5_se: SU(2) algebra {key} = {alg[key]:.3e}")
        sys = su2_system_residuals(model.su2_at(p), 1.0, p)
        if sys["sasaki_einstein"] > 1e-7:
            raise ModelBuildError(
                f"s5_se: sasaki_einstein system residual {sys['sasaki_einstein']:.3e}"
            )
        g = S.g.value(p)
        curv = curvature(S.lc, p.coords, g)
        if np.max(np.abs(curv.Ric - 4.0 * g)) > 1e-5:
            raise ModelBuildError("s5_se: Ricci is not 4g")
        if abs(curv.Scal - 20.0) > 1e-5:
            raise ModelBuildError("s5_se: scalar curvature is not 20")


def build_anc_s5(t: float = 0.0, a: float = 1.5, **params) -> Model:
    from .deform import circle_family, d_homothety

    base = build_s5_sasaki_einstein()
    charts, structures, su2, nc_structures = dict(base.charts), {}, {}, {}
    for cid in charts:
        S_nc, Q_nc = circle_family(base.nc_structures[cid], base.su2[cid], t)
        structures[cid] = d_homothety(S_nc, a)
        su2[cid] = d_homothety_quadruple(Q_nc, a)
        nc_structures[cid] = S_nc
    model = Model("s5_anc", charts, structures, su2, base.lam, base.sampler,
                  nc_structures=nc_structures,
                  params=dict(params, t=t, a=a))
    return model


def d_homothety_quadruple(Q: SU2Quadruple, a: float) -> SU2Quadruple:
    """Deform an SU(2) quadruple: eta -> a eta, omega_i -> a omega_i with the
    deformed metric; the scale lambda is unchanged."""
    from .deform import deformed_metric_field

    gbar = deformed_metric_field(Q.g, Q.eta, a)

    def scale(f: TensorField, name: str) -> TensorField:
        return TensorField(f.rank, lambda x, _f=f: _f.jet(x.val, x.order) * a, f.chart, name)

    def xibar(x: Jet) -> Jet:
        return Q.xi.jet(x.val, x.order) * (1.0 / a)

    return SU2Quadruple(
        scale(Q.eta, "eta_bar"),
        scale(Q.om1, "omega_1_bar"),
        scale(Q.om2, "omega_2_bar"),
        scale(Q.om3, "omega_3_bar"),
        gbar,
        TensorField((1, 0), xibar, Q.chart, "xi_bar"),
        Q.chart,
        lam=Q.lam,
        name=Q.name + f"_dhom_{a:g}",
    )


MODEL_BUILDERS: dict[str, Callable[..., Model]] = {
    "flat_cosymplectic": build_flat_cosymplectic,
    "s5_se": build_s5_sasaki_einstein,
    "s5_anc": build_anc_s5,
}


def build_model(name: str, **params) -> Model:
    if name not in MODEL_BUILDERS:
        raise KeyError(f"unknown model {name!r}; available: {sorted(MODEL_BUILDERS)}")
    return MODEL_BUILDERS[name](**params)
