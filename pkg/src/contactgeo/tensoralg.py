"""Pointwise multilinear algebra: musical isomorphisms, endomorphism/2-form
conversion, orthonormal frames and frame-based residual maxima.

Index layout for a rank-(p, q) component array: contravariant axes first,
then covariant axes.  An endomorphism phi is stored as phi[k, i] with
(phi X)^k = phi[k, i] X^i; the associated 2-form is F_{ij} = g(phi d_i, d_j)
= phi[k, i] g[k, j].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import ContractError

__all__ = [
    "MetricAtPoint",
    "GeneralizedMetric",
    "lower_index",
    "raise_index",
    "two_form_from_endo",
    "endo_from_two_form",
    "orthonormal_frame",
    "adapted_frame",
    "frame_max",
    "form_rank",
    "acm_compatibility_residuals",
]


@dataclass
class MetricAtPoint:
    g: np.ndarray
    g_inv: np.ndarray

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> "MetricAtPoint":
        g = np.asarray(g, dtype=float)
        sym = float(np.max(np.abs(g - g.T)))
        if sym > 1e-12:
            raise ContractError(f"metric symmetry residual {sym:.3e} > 1e-12")
        eigs = np.linalg.eigvalsh(g)
        if eigs[0] <= 0:
            raise ContractError(f"metric not positive definite (min eig {eigs[0]:.3e})")
        g_inv = np.linalg.inv(g)
        return cls(g, g_inv)

    def check(self, tol: float = 1e-10) -> None:
        n = self.g.shape[0]
        res = float(np.max(np.abs(self.g @ self.g_inv - np.eye(n))))
        if res > tol:
            raise ContractError(f"g * g_inv deviates from identity by {res:.3e}")


@dataclass
class GeneralizedMetric:
    """G = g + F with symmetric part g and skew part F."""

    g: np.ndarray
    F: np.ndarray

    @property
    def G(self) -> np.ndarray:
        return self.g + self.F

    def rank_F(self, rel_threshold: float = 1e-8) -> int:
        sv = np.linalg.svd(self.F, compute_uv=False)
        return int(np.sum(sv > rel_threshold * sv[0])) if sv[0] > 0 else 0


def lower_index(comp: np.ndarray, rank: tuple[int, int], slot: int,
                g: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    """Lower the contravariant index at position `slot` (0-based among the
    contravariant axes); the new covariant axis is appended after the existing
    covariant axes."""
    p, q = rank
    if not 0 <= slot < p:
        raise ValueError(f"slot {slot} is not contravariant for rank {rank}")
    out = np.tensordot(comp, g, axes=([slot], [0]))
    # tensordot moves the contracted result axis to the end, which is where the
    # new covariant axis belongs; remaining axes keep their relative order.
    return out, (p - 1, q + 1)


def raise_index(comp: np.ndarray, rank: tuple[int, int], slot: int,
                g_inv: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    """Raise the covariant index at position `slot` (0-based among the
    covariant axes); the new contravariant axis is appended after the existing
    contravariant axes (so raise(lower(T)) restores the layout)."""
    p, q = rank
    if not 0 <= slot < q:
        raise ValueError(f"slot {slot} is not covariant for rank {rank}")
    out = np.tensordot(comp, g_inv, axes=([p + slot], [0]))
    out = np.moveaxis(out, -1, p)
    return out, (p + 1, q - 1)


def two_form_from_endo(phi: np.ndarray, g: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """F_{ij} = g(phi d_i, d_j); raises if the result is not antisymmetric."""
    F = np.einsum("ki,kj->ij", phi, g)
    sym = float(np.max(np.abs(F + F.T))) / 2.0
    if sym > tol:
        raise ContractError(f"g(phi.,.) symmetric part {sym:.3e} exceeds {tol:.1e}")
    return 0.5 * (F - F.T)


def endo_from_two_form(omega: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Inverse of :func:`two_form_from_endo`: phi[k, i] = g^{kj} omega_{ij}."""
    return np.einsum("kj,ij->ki", g_inv, omega)


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Gram-Schmidt the coordinate basis; columns E[:, a] are g-orthonormal."""
    n = g.shape[0]
    E = np.zeros((n, n))
    for a in range(n):
        v = np.zeros(n)
        v[a] = 1.0
        for b in range(a):
            v -= (E[:, b] @ g @ v) * E[:, b]
        norm = np.sqrt(v @ g @ v)
        if norm < 1e-12:
            raise ContractError("degenerate metric in Gram-Schmidt")
        E[:, a] = v / norm
    return E


def adapted_frame(g: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Orthonormal frame whose last column is xi (assumed unit for g).

    Columns 0..n-2 span ker(eta) = xi-perp.
    """
    n = g.shape[0]
    cols = [xi / np.sqrt(xi @ g @ xi)]
    for a in range(n):
        v = np.zeros(n)
        v[a] = 1.0
        for w in cols:
            v = v - (w @ g @ v) * w
        norm = np.sqrt(v @ g @ v)
        if norm > 1e-8:
            cols.append(v / norm)
        if len(cols) == n:
            break
    if len(cols) != n:
        raise ContractError("failed to complete adapted frame")
    return np.stack(cols[1:] + cols[:1], axis=1)


def frame_max(comp: np.ndarray, rank: tuple[int, int], g: np.ndarray,
              E: np.ndarray | None = None) -> float:
    """Max absolute component in an orthonormal frame (tensorial residual size).

    Covariant slots are contracted with the frame vectors, contravariant slots
    with their metric duals g(., e_a).
    """
    if E is None:
        E = orthonormal_frame(g)
    p, q = rank
    out = np.asarray(comp, dtype=float)
    dual = g @ E  # dual[i, a] = g(e_a)_i
    for s in range(p):
        out = np.moveaxis(np.tensordot(out, dual, axes=([0], [0])), -1, p + q - 1)
        # keep axis order stable: processed axes cycle to the end
    for s in range(q):
        out = np.moveaxis(np.tensordot(out, E, axes=([0], [0])), -1, p + q - 1)
    return float(np.max(np.abs(out)))


def form_rank(k: int) -> tuple[int, int]:
    return (0, k)


def acm_compatibility_residuals(phi: np.ndarray, xi: np.ndarray, eta: np.ndarray,
                                g: np.ndarray) -> dict[str, float]:
    """Residuals of the almost contact metric compatibility conditions."""
    n = g.shape[0]
    E = orthonormal_frame(g)
    phi2 = phi @ phi + np.eye(n) - np.outer(xi, eta)
    metric_compat = np.einsum("ki,lj,kl->ij", phi, phi, g) - g + np.outer(eta, eta)
    return {
        "phi_squared": frame_max(phi2, (1, 1), g, E),
        "metric_compat": frame_max(metric_compat, (0, 2), g, E),
        "phi_xi": frame_max(phi @ xi, (1, 0), g, E),
        "eta_phi": frame_max(eta @ phi, (0, 1), g, E),
        "eta_xi": abs(float(eta @ xi) - 1.0),
    }
