"""Forward-mode automatic differentiation with second-order multivariate jets.

A :class:`Jet` carries the value of a (tensor-valued) expression together with
its first and second partial derivatives with respect to a fixed set of seed
variables.  Seeding the chart coordinates with :func:`seed` and evaluating a
field expression built from jet arithmetic yields exact first and second
partials (up to roundoff), which is what curvature computations need.

Conventions:
  * ``val`` has the shape of the expression itself ("component axes").
  * ``d`` appends one derivative axis: ``d[..., a] = d(val)/dx_a``.
  * ``dd`` appends two: ``dd[..., a, b] = d^2(val)/dx_a dx_b``.

``d`` and/or ``dd`` may be ``None``; the jet then only tracks derivatives up
to the corresponding order.  Binary operations truncate to the lower order of
the two operands.  Complex dtypes are supported (used for holomorphic-form
pullbacks).
"""

from __future__ import annotations

import math as _math
from typing import Sequence

import numpy as np

__all__ = [
    "Jet",
    "seed",
    "constant",
    "jet_einsum",
    "jet_inv",
    "jet_stack",
    "transpose",
    "alternate",
    "sin",
    "cos",
    "exp",
    "sqrt",
    "log",
]


class Jet:
    """Value plus first/second partial derivatives w.r.t. the seed variables."""

    __slots__ = ("val", "d", "dd")

    def __init__(self, val, d=None, dd=None):
        self.val = np.asarray(val)
        self.d = None if d is None else np.asarray(d)
        self.dd = None if dd is None else np.asarray(dd)

    # ------------------------------------------------------------------ meta
    @property
    def order(self) -> int:
        if self.d is None:
            return 0
        if self.dd is None:
            return 1
        return 2

    @property
    def nvars(self) -> int:
        if self.d is None:
            raise ValueError("order-0 jet has no derivative axis")
        return self.d.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    def truncate(self, order: int) -> "Jet":
        """Drop derivative data above `order`."""
        if order >= 2:
            return self
        if order == 1:
            return Jet(self.val, self.d, None)
        return Jet(self.val, None, None)

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.val.shape})"

    # ------------------------------------------------------------ arithmetic
    def __add__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return Jet(
                self.val + other.val,
                _addn(self.d, other.d) if order >= 1 else None,
                _addn(self.dd, other.dd) if order >= 2 else None,
            )
        return Jet(self.val + other, self.d, self.dd)

    __radd__ = __add__

    def __neg__(self):
        return Jet(
            -self.val,
            None if self.d is None else -self.d,
            None if self.dd is None else -self.dd,
        )

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            val = self.val * other.val
            d = dd = None
            if order >= 1:
                d = self.d * other.val[..., None] + self.val[..., None] * other.d
            if order >= 2:
                cross = self.d[..., :, None] * other.d[..., None, :]
                dd = (
                    self.dd * other.val[..., None, None]
                    + self.val[..., None, None] * other.dd
                    + cross
                    + cross.swapaxes(-1, -2)
                )
            return Jet(val, d, dd)
        c = np.asarray(other)
        return Jet(
            self.val * c,
            None if self.d is None else self.d * c[..., None],
            None if self.dd is None else self.dd * c[..., None, None],
        )

    __rmul__ = __mul__

    def _reciprocal(self) -> "Jet":
        return _unary(self, 1.0 / self.val, -1.0 / self.val**2, 2.0 / self.val**3)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, n):
        v = self.val
        return _unary(self, v**n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))

    # -------------------------------------------------------------- indexing
    def __getitem__(self, idx):
        """Basic indexing on the component axes only."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(
            self.val[idx],
            None if self.d is None else self.d[idx],
            None if self.dd is None else self.dd[idx],
        )

    def transpose(self, *perm) -> "Jet":
        """Permute the component axes; derivative axes stay last."""
        if len(perm) == 1 and isinstance(perm[0], (tuple, list)):
            perm = tuple(perm[0])
        nd = self.val.ndim
        d = None if self.d is None else self.d.transpose(perm + (nd,))
        dd = None if self.dd is None else self.dd.transpose(perm + (nd, nd + 1))
        return Jet(self.val.transpose(perm), d, dd)

    @property
    def real(self) -> "Jet":
        return Jet(
            self.val.real,
            None if self.d is None else self.d.real,
            None if self.dd is None else self.dd.real,
        )

    @property
    def imag(self) -> "Jet":
        return Jet(
            self.val.imag,
            None if self.d is None else self.d.imag,
            None if self.dd is None else self.dd.imag,
        )

    def conj(self) -> "Jet":
        return Jet(
            self.val.conj(),
            None if self.d is None else self.d.conj(),
            None if self.dd is None else self.dd.conj(),
        )


def _addn(a, b):
    if a is None or b is None:
        return None
    return a + b


def _unary(x: Jet, f0, f1, f2) -> Jet:
    """Chain rule for an elementwise function given f, f', f'' at x.val."""
    d = dd = None
    if x.d is not None:
        d = f1[..., None] * x.d
    if x.dd is not None:
        dd = f1[..., None, None] * x.dd + f2[..., None, None] * (
            x.d[..., :, None] * x.d[..., None, :]
        )
    return Jet(f0, d, dd)


def sin(x):
    if isinstance(x, Jet):
        return _unary(x, np.sin(x.val), np.cos(x.val), -np.sin(x.val))
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        return _unary(x, np.cos(x.val), -np.sin(x.val), -np.cos(x.val))
    return np.cos(x)


def exp(x):
    if isinstance(x, Jet):
        e = np.exp(x.val)
        return _unary(x, e, e, e)
    return np.exp(x)


def sqrt(x):
    if isinstance(x, Jet):
        r = np.sqrt(x.val)
        return _unary(x, r, 0.5 / r, -0.25 / r**3)
    return np.sqrt(x)


def log(x):
    if isinstance(x, Jet):
        return _unary(x, np.log(x.val), 1.0 / x.val, -1.0 / x.val**2)
    return np.log(x)


def seed(coords: np.ndarray, order: int = 2) -> Jet:
    """Seed chart coordinates as independent variables."""
    coords = np.asarray(coords, dtype=float)
    (m,) = coords.shape
    if order == 0:
        return Jet(coords)
    if order == 1:
        return Jet(coords, np.eye(m))
    return Jet(coords, np.eye(m), np.zeros((m, m, m)))


def constant(value, nvars: int, order: int = 2) -> Jet:
    """Wrap a constant as a jet with vanishing derivatives."""
    value = np.asarray(value)
    if order == 0:
        return Jet(value)
    d = np.zeros(value.shape + (nvars,), dtype=value.dtype)
    if order == 1:
        return Jet(value, d)
    return Jet(value, d, np.zeros(value.shape + (nvars, nvars), dtype=value.dtype))


# The derivative axes get fresh subscript letters in jet_einsum.
_FRESH = ("Z", "W")


def jet_einsum(subscripts: str, *ops) -> Jet:
    """Einstein summation with jet-aware product rule.

    Operands may be :class:`Jet` or plain arrays (treated as constants).  The
    result order is the minimum order over the jet operands.
    """
    if any(c in subscripts for c in _FRESH):
        raise ValueError(f"subscripts may not use reserved letters {_FRESH}")
    in_spec, out_spec = subscripts.split("->")
    terms = in_spec.split(",")
    if len(terms) != len(ops):
        raise ValueError("operand count mismatch")
    jets = [i for i, op in enumerate(ops) if isinstance(op, Jet)]
    if not jets:
        raise ValueError("at least one operand must be a Jet")
    order = min(ops[i].order for i in jets)
    vals = [op.val if isinstance(op, Jet) else np.asarray(op) for op in ops]
    val = np.einsum(subscripts, *vals)
    d = dd = None
    Z, W = _FRESH
    if order >= 1:
        d = 0
        for i in jets:
            args = list(vals)
            args[i] = ops[i].d
            spec = ",".join(t + (Z if k == i else "") for k, t in enumerate(terms))
            d = d + np.einsum(f"{spec}->{out_spec}{Z}", *args)
    if order >= 2:
        dd = 0
        for i in jets:
            args = list(vals)
            args[i] = ops[i].dd
            spec = ",".join(t + (Z + W if k == i else "") for k, t in enumerate(terms))
            dd = dd + np.einsum(f"{spec}->{out_spec}{Z}{W}", *args)
        for ii, i in enumerate(jets):
            for j in jets[ii + 1 :]:
                args = list(vals)
                args[i] = ops[i].d
                args[j] = ops[j].d
                spec = ",".join(
                    t + (Z if k == i else W if k == j else "")
                    for k, t in enumerate(terms)
                )
                cross = np.einsum(f"{spec}->{out_spec}{Z}{W}", *args)
                dd = dd + cross + cross.swapaxes(-1, -2)
    return Jet(val, d, dd)


def jet_inv(a: Jet) -> Jet:
    """Matrix inverse of a jet whose value has shape (..., n, n)."""
    b0 = np.linalg.inv(a.val)
    if a.d is None:
        return Jet(b0)
    d = -np.einsum("...ij,...jka,...kl->...ila", b0, a.d, b0)
    if a.dd is None:
        return Jet(b0, d)
    t1 = -np.einsum("...ij,...jkab,...kl->...ilab", b0, a.dd, b0)
    t2 = np.einsum("...ij,...jka,...kl,...lmb,...mn->...inab", b0, a.d, b0, a.d, b0)
    return Jet(b0, d, t1 + t2 + t2.swapaxes(-1, -2))


def jet_stack(parts: Sequence, axis: int = 0) -> Jet:
    """Stack jets (and constants) along a new leading component axis."""
    jets = [p for p in parts if isinstance(p, Jet)]
    if not jets:
        raise ValueError("at least one part must be a Jet")
    order = min(p.order for p in jets)
    ref = jets[0]
    full = [
        p if isinstance(p, Jet) else constant(p, ref.nvars if order else 0, order)
        for p in parts
    ]
    val = np.stack([p.val for p in full], axis=axis)
    if axis < 0:
        raise ValueError("axis must be non-negative (component axes only)")
    d = dd = None
    if order >= 1:
        d = np.stack([p.d for p in full], axis=axis)
    if order >= 2:
        dd = np.stack([p.dd for p in full], axis=axis)
    return Jet(val, d, dd)


def transpose(x, perm) -> np.ndarray | Jet:
    if isinstance(x, Jet):
        return x.transpose(tuple(perm))
    return np.transpose(x, tuple(perm))


def _permutations_with_sign(k: int):
    import itertools

    for p in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        yield p, -1.0 if inv % 2 else 1.0


def alternate(x, k: int):
    """Antisymmetrize the first `k` component axes (with 1/k! normalization)."""
    if k <= 1:
        return x
    nd = x.val.ndim if isinstance(x, Jet) else np.asarray(x).ndim
    rest = tuple(range(k, nd))
    total = None
    for p, sign in _permutations_with_sign(k):
        term = transpose(x, p + rest) * sign
        total = term if total is None else total + term
    return total * (1.0 / _math.factorial(k))
