"""Ascending direction from field readings and its Taylor decomposition.

The production quantity is :func:`L_sigma`, built from readings only. The
first- and second-order terms and the bound checks exist for analysis and
diagnostics and use the field's derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deployment import Deployment, DeploymentError, stats

L1_AGREEMENT_TOL = 1e-12


class AscentError(ValueError):
    pass


@dataclass(frozen=True)
class AscentResult:
    L: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    D: float


def _spread(x: Deployment) -> float:
    D = x.D
    if D == 0:
        raise AscentError("all robots sit at the centroid (D = 0)")
    return D


def L_sigma(f, p_c, x: Deployment) -> np.ndarray:
    D = _spread(x)
    readings = f.value(x.positions(p_c))
    return readings @ x.coords / (x.N * D**2)


def L_sigma_from_readings(readings, coords) -> np.ndarray:
    """Same as :func:`L_sigma` but from raw readings at ``p_c + coords``."""
    coords = np.asarray(coords, dtype=float)
    D = np.max(np.linalg.norm(coords, axis=1))
    if D == 0:
        raise AscentError("all robots sit at the centroid (D = 0)")
    return np.asarray(readings) @ coords / (len(coords) * D**2)


def L1_sigma(f, p_c, x: Deployment, check: bool = True) -> np.ndarray:
    D = _spread(x)
    g = f.gradient(np.asarray(p_c, dtype=float))
    summed = (x.coords @ g) @ x.coords / (x.N * D**2)
    if check:
        matrix = x.P @ g / D**2
        scale = max(np.linalg.norm(summed), np.linalg.norm(matrix), 1.0)
        if np.linalg.norm(summed - matrix) > L1_AGREEMENT_TOL * scale:
            raise AscentError("summation and covariance forms of L1 disagree")
    return summed


def L2_sigma(f, p_c, x: Deployment) -> np.ndarray:
    D = _spread(x)
    H = f.hessian(np.asarray(p_c, dtype=float))
    quad = 0.5 * np.einsum("ij,jk,ik->i", x.coords, H, x.coords)
    return quad @ x.coords / (x.N * D**2)


def decompose(f, p_c, x: Deployment) -> AscentResult:
    return AscentResult(L=L_sigma(f, p_c, x), L1=L1_sigma(f, p_c, x), L2=L2_sigma(f, p_c, x), D=x.D)


def ascent_margin(f, p_c, direction) -> float:
    """``grad(p_c) . direction``; simulation diagnostics only."""
    return float(f.gradient(np.asarray(p_c, dtype=float)) @ np.asarray(direction, dtype=float))


def divergence_bound_check(f, p_c, x: Deployment, M: float | None = None):
    """``|L - L1| <= M D`` with ``M`` from the field bounds unless given."""
    M = f.bounds.M if M is None else M
    lhs = float(np.linalg.norm(L_sigma(f, p_c, x) - L1_sigma(f, p_c, x)))
    rhs = M * x.D
    return lhs, rhs, lhs <= rhs + 1e-9


def rayleigh_quotient(f, p_c, x: Deployment) -> float:
    g = f.gradient(np.asarray(p_c, dtype=float))
    gg = g @ g
    if gg == 0:
        raise AscentError("zero gradient at p_c")
    return float(g @ L1_sigma(f, p_c, x) / gg)


def rayleigh_bounds_check(f, p_c, x: Deployment, rtol: float = 1e-12) -> bool:
    st = stats(x)
    if st.degenerate:
        raise DeploymentError("Rayleigh bounds need a non-degenerate deployment")
    q = rayleigh_quotient(f, p_c, x)
    lo, hi = st.lambda_min / st.D**2, st.lambda_max / st.D**2
    slack = rtol * hi
    return bool(0 < lo and lo - slack <= q <= hi + slack)


def angle_between(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[0] == 2:
        return float(abs(np.arctan2(u[0] * v[1] - u[1] * v[0], u @ v)))
    c = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def alignment_angle(f, p_c, x: Deployment, target=None) -> float:
    """Angle between L1 and the gradient (or ``target`` if given)."""
    g = f.gradient(np.asarray(p_c, dtype=float))
    if np.linalg.norm(g) == 0:
        raise AscentError("zero gradient at p_c")
    ref = g if target is None else target
    return angle_between(L1_sigma(f, p_c, x), ref)


def stretched_gradient_direction(A, g) -> np.ndarray:
    """``U S^2 U^T r`` for ``A = U S V^T`` and ``r`` the unit gradient."""
    U, s, _ = np.linalg.svd(np.asarray(A, dtype=float))
    r = np.asarray(g, dtype=float) / np.linalg.norm(g)
    return U @ np.diag(s**2) @ U.T @ r
