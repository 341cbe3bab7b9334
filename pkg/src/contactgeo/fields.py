"""Charts, chart points, tensor fields and the differentiation engine.

A :class:`TensorField` is a pure function of chart coordinates returning the
dense component array of a rank-(p, q) tensor (contravariant axes first).
Fields are evaluated through :func:`jets.seed`, so first and second partial
derivatives of the components come out of the same evaluation.

The exterior derivative uses the determinant convention throughout:

    (d w)(X_0, ..., X_k) = sum_a (-1)^a  d_{X_a} w(X_0, ..no X_a.., X_k)

so for a 1-form (d w)_{ij} = d_i w_j - d_j w_i, matching the invariant formula
d w(X, Y) = X w(Y) - Y w(X) - w([X, Y]).  The wedge product uses the matching
convention (a ^ b) = ((k+l)! / k! l!) Alt(a x b), i.e. (dx ^ dy)(d_x, d_y) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .jets import Jet, alternate, seed

__all__ = [
    "Chart",
    "ChartPoint",
    "ChartDomainError",
    "ContractError",
    "TensorField",
    "DerivativeEngine",
    "set_default_engine",
    "default_engine",
    "use_engine",
    "exterior_derivative",
    "exterior_derivative_field",
    "wedge",
    "wedge_field",
    "lie_bracket",
]


class ChartDomainError(ValueError):
    """Point lies outside the declared validity region of its chart."""


class ContractError(ValueError):
    """An operation precondition failed (e.g. a form is not antisymmetric)."""


@dataclass(frozen=True)
class Chart:
    chart_id: str
    dim: int
    contains: Callable[[np.ndarray], bool] = field(default=lambda c: True)

    def check(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise ChartDomainError(
                f"coords shape {coords.shape} does not match chart dim {self.dim}"
            )
        if not self.contains(coords):
            raise ChartDomainError(
                f"point {coords} outside validity region of chart {self.chart_id!r}"
            )
        return coords


@dataclass(frozen=True)
class ChartPoint:
    chart_id: str
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))


def _coords_of(p) -> np.ndarray:
    return p.coords if isinstance(p, ChartPoint) else np.asarray(p, dtype=float)


class TensorField:
    """Smooth rank-(p, q) tensor field on a chart.

    `func` maps a seeded coordinate jet to the component jet of shape
    dim^(p+q), contravariant indices first.  `func` must be deterministic and
    side-effect free; derived fields assume it is only ever called on
    coordinate seeds.
    """

    def __init__(self, rank: tuple[int, int], func: Callable[[Jet], Jet],
                 chart: Chart | None = None, name: str = ""):
        self.rank = rank
        self.func = func
        self.chart = chart
        self.name = name
        # Last-point jet memo: verification sweeps evaluate many residuals at
        # the same point, so one slot removes nearly all repeat work.
        self._cache: tuple[bytes, Jet] | None = None

    @property
    def nslots(self) -> int:
        return self.rank[0] + self.rank[1]

    def _check(self, p) -> np.ndarray:
        coords = _coords_of(p)
        if self.chart is not None:
            if isinstance(p, ChartPoint) and p.chart_id != self.chart.chart_id:
                raise ChartDomainError(
                    f"point on chart {p.chart_id!r}, field on {self.chart.chart_id!r}"
                )
            self.chart.check(coords)
        return coords

    def jet(self, p, order: int = 2) -> Jet:
        coords = self._check(p)
        if _DEFAULT_ENGINE.mode == "fd":
            return _DEFAULT_ENGINE.fd_jet(self, coords, order)
        key = coords.tobytes()
        if self._cache is not None and self._cache[0] == key \
                and self._cache[1].order >= order:
            return self._cache[1].truncate(order)
        out = self.func(seed(coords, order))
        if not isinstance(out, Jet):
            out = Jet(np.asarray(out))
        result = out.truncate(order)
        if result.order < order:
            raise ValueError(
                f"field {self.name!r} supports derivatives only to order "
                f"{result.order}, requested {order}"
            )
        self._cache = (key, result)
        return result

    def max_order(self, p) -> int:
        coords = self._check(p)
        out = self.func(seed(coords, 2))
        return out.order if isinstance(out, Jet) else 0

    def value(self, p) -> np.ndarray:
        return self.jet(p, order=0).val

    def __call__(self, p) -> np.ndarray:
        return self.value(p)


# 5-point central stencils; exact on polynomials of degree <= 4.
_D1_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2_STENCIL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.array([-2, -1, 0, 1, 2])


@dataclass
class DerivativeEngine:
    """First/second partials of field components, autodiff or finite-difference."""

    mode: str = "autodiff"
    fd_step: float = 1e-2

    def __post_init__(self):
        if self.mode not in ("autodiff", "fd"):
            raise ValueError(f"unknown derivative mode {self.mode!r}")

    def partial_derivative(self, f: TensorField, p, axis: int) -> np.ndarray:
        coords = f._check(p)
        dim = coords.shape[0]
        if not 0 <= axis < dim:
            raise ValueError(f"axis {axis} out of range for dim {dim}")
        if self.mode == "autodiff":
            return f.jet(coords, order=1).d[..., axis]
        h = self.fd_step
        vals = [f.value(_shift(coords, axis, k * h)) for k in _OFFSETS]
        return sum(w * v for w, v in zip(_D1_STENCIL, vals)) / h

    def second_partial(self, f: TensorField, p, axis_a: int, axis_b: int) -> np.ndarray:
        coords = f._check(p)
        dim = coords.shape[0]
        if not (0 <= axis_a < dim and 0 <= axis_b < dim):
            raise ValueError("axis out of range")
        if self.mode == "autodiff":
            return f.jet(coords, order=2).dd[..., axis_a, axis_b]
        h = self.fd_step
        if axis_a == axis_b:
            vals = [f.value(_shift(coords, axis_a, k * h)) for k in _OFFSETS]
            return sum(w * v for w, v in zip(_D2_STENCIL, vals)) / h**2
        out = 0.0
        for ka, wa in zip(_OFFSETS, _D1_STENCIL):
            row = _shift(coords, axis_a, ka * h)
            for kb, wb in zip(_OFFSETS, _D1_STENCIL):
                out = out + wa * wb * f.value(_shift(row, axis_b, kb * h))
        return out / h**2

    def fd_jet(self, f: TensorField, coords: np.ndarray, order: int) -> Jet:
        """Jet of field components with all derivatives from stencils.

        Only ever evaluates the field's values, so the result is an
        autodiff-free cross-check of the jet pipeline.
        """
        h = self.fd_step

        def value_at(c: np.ndarray) -> np.ndarray:
            out = f.func(seed(c, 0))
            return out.val if isinstance(out, Jet) else np.asarray(out)

        val = np.asarray(value_at(coords), dtype=float)
        if order == 0:
            return Jet(val)
        dim = coords.shape[0]

        d = np.zeros(val.shape + (dim,))
        for a in range(dim):
            vals = [value_at(_shift(coords, a, k * h)) for k in _OFFSETS]
            d[..., a] = sum(w * v for w, v in zip(_D1_STENCIL, vals)) / h
        if order == 1:
            return Jet(val, d, None)
        dd = np.zeros(val.shape + (dim, dim))
        for a in range(dim):
            vals = [value_at(_shift(coords, a, k * h)) for k in _OFFSETS]
            dd[..., a, a] = sum(w * v for w, v in zip(_D2_STENCIL, vals)) / h**2
            for b in range(a + 1, dim):
                acc = 0.0
                for ka, wa in zip(_OFFSETS, _D1_STENCIL):
                    row = _shift(coords, a, ka * h)
                    for kb, wb in zip(_OFFSETS, _D1_STENCIL):
                        acc = acc + wa * wb * value_at(_shift(row, b, kb * h))
                dd[..., a, b] = dd[..., b, a] = acc / h**2
        return Jet(val, d, dd)


_DEFAULT_ENGINE = DerivativeEngine("autodiff")


def set_default_engine(engine: DerivativeEngine) -> None:
    """Install the engine used by :meth:`TensorField.jet` globally."""
    global _DEFAULT_ENGINE
    _DEFAULT_ENGINE = engine


def default_engine() -> DerivativeEngine:
    return _DEFAULT_ENGINE


class use_engine:
    """Context manager switching the default derivative engine.

    In ``fd`` mode every :meth:`TensorField.jet` call (and hence every
    exterior derivative, Christoffel symbol and curvature downstream) is
    computed from value-only stencil evaluations.  Field constructions that
    compose jets internally are unaffected; the switch governs how the
    verification layer differentiates the final fields.
    """

    def __init__(self, mode: str = "autodiff", fd_step: float = 1e-2):
        self._engine = DerivativeEngine(mode, fd_step)

    def __enter__(self) -> DerivativeEngine:
        self._saved = default_engine()
        set_default_engine(self._engine)
        return self._engine

    def __exit__(self, *exc) -> None:
        set_default_engine(self._saved)


def _shift(coords: np.ndarray, axis: int, delta: float) -> np.ndarray:
    out = coords.copy()
    out[axis] += delta
    return out


def antisymmetry_residual(comp: np.ndarray, k: int) -> float:
    """Max deviation of the first k axes from full antisymmetry."""
    if k <= 1:
        return 0.0
    return float(np.max(np.abs(comp - alternate(comp, k))))


def _dform(j: Jet, k: int) -> np.ndarray:
    """Exterior derivative components from a form jet of order >= 1."""
    # j.d[..., m] = d_m w[...]; the derivative index moves to slot a with
    # alternating sign.
    grad = np.moveaxis(j.d, -1, 0)
    out = 0.0
    for a in range(k + 1):
        out = out + (-1.0) ** a * np.moveaxis(grad, 0, a)
    return out


def exterior_derivative(omega: TensorField, p) -> np.ndarray:
    """d(omega) at p for a fully antisymmetric covariant rank-k field."""
    k = omega.rank[1]
    if omega.rank[0] != 0:
        raise ContractError("exterior derivative needs a covariant form field")
    j = omega.jet(p, order=1)
    res = antisymmetry_residual(j.val, k)
    if res > 1e-10:
        raise ContractError(f"input form not antisymmetric (residual {res:.3e})")
    return _dform(j, k)


def exterior_derivative_field(omega: TensorField) -> TensorField:
    """d(omega) as a field; loses one derivative order relative to omega."""
    k = omega.rank[1]

    def func(x: Jet) -> Jet:
        j = omega.jet(x.val, min(x.order + 1, 2))
        val = 0.0
        d = 0.0 if j.dd is not None else None
        g1 = np.moveaxis(j.d, -1, 0)
        g2 = None if j.dd is None else np.moveaxis(j.dd, -2, 0)
        for a in range(k + 1):
            s = (-1.0) ** a
            val = val + s * np.moveaxis(g1, 0, a)
            if g2 is not None:
                d = d + s * np.moveaxis(g2, 0, a)
        return Jet(val, d, None)

    return TensorField((0, k + 1), func, omega.chart, f"d({omega.name})")


def wedge(a: np.ndarray, k: int, b: np.ndarray, l: int) -> np.ndarray:
    """Wedge product of form components, determinant convention."""
    prod = np.multiply.outer(a, b)
    return alternate(prod, k + l) * (math.factorial(k + l) / (math.factorial(k) * math.factorial(l)))


def wedge_field(fa: TensorField, fb: TensorField) -> TensorField:
    ka, kb = fa.rank[1], fb.rank[1]
    if fa.rank[0] or fb.rank[0]:
        raise ContractError("wedge needs covariant form fields")
    letters = "abcdefgh"
    sa, sb = letters[:ka], letters[ka : ka + kb]
    coef = math.factorial(ka + kb) / (math.factorial(ka) * math.factorial(kb))

    def func(x: Jet) -> Jet:
        ja, jb = fa.func(x), fb.func(x)
        prod = jets.jet_einsum(f"{sa},{sb}->{sa}{sb}", ja, jb)
        return alternate(prod, ka + kb) * coef

    return TensorField((0, ka + kb), func, fa.chart, f"{fa.name}^{fb.name}")


def lie_bracket(X: TensorField, Y: TensorField, p) -> np.ndarray:
    """[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k."""
    if X.rank != (1, 0) or Y.rank != (1, 0):
        raise ContractError("lie_bracket needs vector fields")
    jx, jy = X.jet(p, order=1), Y.jet(p, order=1)
    return jy.d @ jx.val - jx.d @ jy.val
