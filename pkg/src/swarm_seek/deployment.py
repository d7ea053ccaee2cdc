"""Centroid-relative deployments, covariance analysis and shape generators."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq
from scipy.stats import qmc

DEGENERACY_TOL = 1e-9


class DeploymentError(ValueError):
    pass


@dataclass(frozen=True)
class DeploymentStats:
    P: np.ndarray
    D: float
    lambda_min: float
    lambda_max: float
    degenerate: bool


@dataclass(frozen=True, eq=False)
class Deployment:
    """Robot offsets ``x_i`` from the swarm centroid, stored as an ``(N, m)`` array."""

    coords: np.ndarray

    def __post_init__(self):
        x = np.array(self.coords, dtype=float)
        if x.ndim != 2 or x.shape[0] == 0:
            raise DeploymentError(f"coords must be a non-empty (N, m) array, got shape {x.shape}")
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)

    @property
    def N(self) -> int:
        return self.coords.shape[0]

    @property
    def m(self) -> int:
        return self.coords.shape[1]

    @cached_property
    def D(self) -> float:
        return float(np.max(np.linalg.norm(self.coords, axis=1)))

    @cached_property
    def P(self) -> np.ndarray:
        return self.coords.T @ self.coords / self.N

    def positions(self, centroid) -> np.ndarray:
        return np.asarray(centroid, dtype=float) + self.coords

    def __len__(self):
        return self.N


def from_positions(p) -> Deployment:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] == 0:
        raise DeploymentError("need a non-empty list of equal-dimension points")
    return Deployment(p - p.mean(axis=0))


def stats(x: Deployment, tol: float = DEGENERACY_TOL) -> DeploymentStats:
    P = x.P
    w = np.linalg.eigvalsh(P)
    lmin, lmax = float(w[0]), float(w[-1])
    # relative test so that rescaling never flips the verdict
    degenerate = lmax <= 0 or lmin < tol * lmax
    return DeploymentStats(P=P, D=x.D, lambda_min=lmin, lambda_max=lmax, degenerate=degenerate)


def regular_polygon(N: int, rho: float = 1.0, phase: float = 0.0) -> Deployment:
    if N < 3:
        raise DeploymentError("a polygon needs at least 3 vertices")
    if rho <= 0:
        raise DeploymentError("radius must be positive")
    th = phase + 2 * np.pi * np.arange(N) / N
    return Deployment(rho * np.column_stack([np.cos(th), np.sin(th)]))


def cross_distances(N_half: int, a1: float, alpha: float) -> np.ndarray:
    """Per-semihalf distances ``a_1 > a_2 > ...`` for one segment of a cross.

    All but the last follow ``a_{i+1} = alpha a_i``; the last one closes the
    condition ``sum_{i>=2} a_i^2 = (N_half / 4) a_1^2``.
    """
    if N_half < 4 or N_half % 2:
        raise DeploymentError(f"N_half must be an even integer >= 4, got {N_half}")
    if a1 <= 0 or not 0 < alpha < 1:
        raise DeploymentError(f"need a1 > 0 and 0 < alpha < 1, got a1={a1}, alpha={alpha}")
    k = N_half // 2
    a = a1 * alpha ** np.arange(k - 1)
    rest = N_half / 4 * a1**2 - np.sum(a[1:] ** 2)
    combo = f"(N_half={N_half}, a1={a1}, alpha={alpha})"
    if rest < -1e-12 * a1**2:
        raise DeploymentError(f"infeasible cross deployment {combo}: last squared distance {rest:.3g} < 0")
    last = np.sqrt(max(rest, 0.0))
    if last > a1 * (1 + 1e-12):
        raise DeploymentError(f"infeasible cross deployment {combo}: closing distance {last:.4g} exceeds a1")
    return np.append(a, last)


def cross_alpha(N_half: int) -> float:
    """Ratio for which the plain geometric series meets the cross condition exactly."""
    k = N_half // 2

    def excess(alpha):
        return np.sum(alpha ** (2 * np.arange(1, k))) - N_half / 4

    if k == 2:
        # single free term: a_2 = a_1 regardless of alpha
        return 0.5
    return float(brentq(excess, 1e-6, 1 - 1e-12, xtol=1e-15))


def cross_segments(N_half: int, a1: float = 1.0, alpha: float | None = None):
    """The two perpendicular segments, along the first and second axes."""
    if alpha is None:
        alpha = cross_alpha(N_half)
    a = cross_distances(N_half, a1, alpha)
    s = np.concatenate([a, -a])
    zero = np.zeros_like(s)
    return np.column_stack([s, zero]), np.column_stack([zero, s])


def cross_deployment(N_half: int, a1: float = 1.0, alpha: float | None = None) -> Deployment:
    par, perp = cross_segments(N_half, a1, alpha)
    return Deployment(np.vstack([par, perp]))


def affine_transform(x: Deployment, A) -> Deployment:
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise DeploymentError("transform must be finite")
    return Deployment(x.coords @ A.T)


def grid(nx: int, ny: int, spacing_x: float = 1.0, spacing_y: float | None = None) -> Deployment:
    """Uniform rectangular lattice."""
    spacing_y = spacing_x if spacing_y is None else spacing_y
    gx = (np.arange(nx) - (nx - 1) / 2) * spacing_x
    gy = (np.arange(ny) - (ny - 1) / 2) * spacing_y
    X, Y = np.meshgrid(gx, gy, indexing="xy")
    return Deployment(np.column_stack([X.ravel(), Y.ravel()]))


def sample_disk(n: int, radius: float = 1.0, method: str = "halton", seed: int = 0) -> Deployment:
    """``n`` robots spread with uniform density over a disk, recentred."""
    if method == "halton":
        u = qmc.Halton(d=2, scramble=False).random(n + 1)[1:]
    elif method == "random":
        u = np.random.default_rng(seed).random((n, 2))
    else:
        raise DeploymentError(f"unknown sampling method {method!r}")
    r = radius * np.sqrt(u[:, 0])
    th = 2 * np.pi * u[:, 1]
    return from_positions(np.column_stack([r * np.cos(th), r * np.sin(th)]))


def sample_rectangle(n: int, width: float, height: float, seed: int = 0) -> Deployment:
    u = np.random.default_rng(seed).random((n, 2)) - 0.5
    return from_positions(u * [width, height])


def h_condition(x: Deployment, rb) -> float:
    """Ascent certificate ``lambda_min(P) K_min / D^2 - M_S D``."""
    st = stats(x)
    if st.degenerate:
        raise DeploymentError("h_condition is undefined for a degenerate deployment")
    return st.lambda_min / st.D**2 * rb.K_min - rb.M_S * st.D


def symmetry_moments(points, weights=None) -> tuple[float, float]:
    """Weighted ``E[XY]`` and ``E[X^2 - Y^2]`` of planar samples."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.ones(len(pts)) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0) or w.sum() <= 0:
        raise DeploymentError("weights must be non-negative with a positive sum")
    X, Y = pts[:, 0], pts[:, 1]
    W = w.sum()
    return float(np.sum(w * X * Y) / W), float(np.sum(w * (X**2 - Y**2)) / W)


def deformation(x_t: Deployment, x_0: Deployment) -> float:
    if x_t.coords.shape != x_0.coords.shape:
        raise DeploymentError(f"shape mismatch {x_t.coords.shape} vs {x_0.coords.shape}")
    return float(np.max(np.linalg.norm(x_t.coords - x_0.coords, axis=1)))


def deformation_bound(N: int, kappa: float) -> float:
    """Worst-case drift of any centroid-relative coordinate under heading control."""
    return (N - 1) / N * 2 * np.pi / kappa
