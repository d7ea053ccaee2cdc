"""Scalar signal models with analytic value, gradient and Hessian.

Every field evaluates on a single point of shape ``(m,)`` or a batch of
shape ``(n, m)``; outputs follow the same leading shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.stats import qmc


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldBounds:
    """``K`` bounds the gradient norm; ``M`` is half the Hessian-norm bound."""

    K: float
    M: float

    def __post_init__(self):
        if not (self.K > 0 and self.M > 0):
            raise FieldError(f"field bounds must be positive, got K={self.K}, M={self.M}")


@dataclass(frozen=True)
class RegionBounds:
    K_min: float
    K_max: float
    M_S: float


def _as_points(p):
    p = np.asarray(p, dtype=float)
    return p, p.ndim == 1


class ScalarField:
    """Base class. Subclasses provide ``_eval(points) -> (v, g, H)`` on batches."""

    source: np.ndarray

    @property
    def dimension(self) -> int:
        return self.source.shape[0]

    def _eval(self, pts, order):
        raise NotImplementedError

    def value(self, p):
        pts, single = _as_points(p)
        v = self._eval(np.atleast_2d(pts), 0)[0]
        return float(v[0]) if single else v

    def gradient(self, p):
        pts, single = _as_points(p)
        g = self._eval(np.atleast_2d(pts), 1)[1]
        return g[0] if single else g

    def hessian(self, p):
        pts, single = _as_points(p)
        H = self._eval(np.atleast_2d(pts), 2)[2]
        return H[0] if single else H

    @property
    def peak(self) -> float:
        return self.value(self.source)

    def translate(self, offset) -> "ScalarField":
        raise NotImplementedError

    def with_source(self, p) -> "ScalarField":
        return self.translate(np.asarray(p, dtype=float) - self.source)


@dataclass(frozen=True, eq=False)
class GaussianField(ScalarField):
    """Isotropic bump ``A exp(-|p - p_s|^2 / 2 s^2)``."""

    source: np.ndarray
    amplitude: float = 1.0
    width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", np.asarray(self.source, dtype=float))
        if self.amplitude <= 0 or self.width <= 0:
            raise FieldError("gaussian amplitude and width must be positive")

    @cached_property
    def bounds(self) -> FieldBounds:
        A, s = self.amplitude, self.width
        # |grad| peaks at r = s; |H| peaks at the source (A / s^2).
        return FieldBounds(K=A * np.exp(-0.5) / s, M=A / (2 * s**2))

    def _eval(self, pts, order):
        s2 = self.width**2
        d = pts - self.source
        e = self.amplitude * np.exp(-np.einsum("ij,ij->i", d, d) / (2 * s2))
        g = H = None
        if order >= 1:
            g = -(e / s2)[:, None] * d
        if order >= 2:
            m = d.shape[1]
            H = e[:, None, None] * (d[:, :, None] * d[:, None, :] / s2**2 - np.eye(m) / s2)
        return e, g, H

    def translate(self, offset):
        return replace(self, source=self.source + np.asarray(offset, dtype=float))


@dataclass(frozen=True, eq=False)
class QuadraticField(ScalarField):
    """``c - (p - p_s)^T Q (p - p_s)`` with ``Q`` positive definite.

    The gradient grows without bound, so ``K`` is reported over a ball of
    radius ``bounds_radius`` around the source. Values go negative outside
    ``sqrt(c / lambda_max(Q))``.
    """

    source: np.ndarray
    c: float = 10.0
    Q: np.ndarray = None
    bounds_radius: float = 10.0

    def __post_init__(self):
        src = np.asarray(self.source, dtype=float)
        Q = np.eye(src.shape[0]) if self.Q is None else np.asarray(self.Q, dtype=float)
        if Q.shape != (src.shape[0],) * 2:
            raise FieldError(f"Q must be {src.shape[0]}x{src.shape[0]}")
        if not np.allclose(Q, Q.T):
            raise FieldError("Q must be symmetric")
        if np.linalg.eigvalsh(Q)[0] <= 0:
            raise FieldError("Q must be positive definite")
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "Q", Q)

    @cached_property
    def bounds(self) -> FieldBounds:
        lam = float(np.linalg.eigvalsh(self.Q)[-1])
        return FieldBounds(K=2 * lam * self.bounds_radius, M=lam)

    def _eval(self, pts, order):
        d = pts - self.source
        Qd = d @ self.Q
        v = self.c - np.einsum("ij,ij->i", d, Qd)
        g = -2 * Qd if order >= 1 else None
        H = np.broadcast_to(-2 * self.Q, (len(pts),) + self.Q.shape).copy() if order >= 2 else None
        return v, g, H

    def translate(self, offset):
        return replace(self, source=self.source + np.asarray(offset, dtype=float))


def _psd_part(S, ridge):
    w, V = np.linalg.eigh(S)
    return (V * np.clip(w, 0.0, None)) @ V.T + ridge * np.eye(len(S))


@dataclass(frozen=True, eq=False)
class BenchmarkField(ScalarField):
    """Non-convex test signal: a smoothed cone plus two anisotropic bumps.

    With ``x = (p - center) / delta``::

        sigma = C - k sqrt(|x|^2 + smoothing)
                  + w_a exp(-(x - a)^T Qa (x - a))
                  + w_b exp(-(x - b)^T Qb (x - b))

    ``Q_a``/``Q_b`` are given in the growing-exponent convention
    ``exp{+(x - a)^T Q (x - a)}`` and are converted to decaying PSD forms
    (negated symmetric part, clipped, plus a small ridge). ``C`` defaults to
    the smallest round value keeping ``sigma > 0`` over ``region``.
    ``source`` is the true maximiser, located by Newton iteration.
    """

    center: np.ndarray
    k: float = 0.04
    delta: float = 15.0
    a: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    b: np.ndarray = field(default_factory=lambda: np.array([0.0, -1.5]))
    Q_a: np.ndarray = None
    Q_b: np.ndarray = None
    w_a: float = 0.02
    w_b: float = 0.02
    region: np.ndarray = None
    C: float | None = None
    smoothing: float = 1e-6
    ridge: float = 1e-3
    source: np.ndarray = None

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.shape != (2,):
            raise FieldError("benchmark field is planar")
        Q_a = reference_Q_a() if self.Q_a is None else np.asarray(self.Q_a, dtype=float)
        Q_b = reference_Q_b() if self.Q_b is None else np.asarray(self.Q_b, dtype=float)
        region = self.region
        if region is None:
            region = np.array([center - 4 * self.delta, center + 4 * self.delta])
        region = np.asarray(region, dtype=float)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "Q_a", Q_a)
        object.__setattr__(self, "Q_b", Q_b)
        object.__setattr__(self, "region", region)
        if self.C is None:
            corners = np.array([[x, y] for x in region[:, 0] for y in region[:, 1]])
            rmax = np.max(np.linalg.norm((corners - center) / self.delta, axis=1))
            object.__setattr__(self, "C", float(self.k * (rmax + 0.1)))
        if self.source is None:
            object.__setattr__(self, "source", self._argmax())
        else:
            object.__setattr__(self, "source", np.asarray(self.source, dtype=float))

    @cached_property
    def Qa_eff(self):
        return _psd_part(-(self.Q_a + self.Q_a.T) / 2, self.ridge)

    @cached_property
    def Qb_eff(self):
        return _psd_part(-(self.Q_b + self.Q_b.T) / 2, self.ridge)

    def _eval(self, pts, order):
        d = self.delta
        x = (pts - self.center) / d
        s = np.sqrt(np.einsum("ij,ij->i", x, x) + self.smoothing)
        v = self.C - self.k * s
        g = -self.k * x / s[:, None] if order >= 1 else None
        H = None
        if order >= 2:
            eye = np.eye(2)
            H = -self.k * (eye / s[:, None, None] - x[:, :, None] * x[:, None, :] / s[:, None, None] ** 3)
        for w, c, Q in ((self.w_a, self.a, self.Qa_eff), (self.w_b, self.b, self.Qb_eff)):
            q = x - c
            Qq = q @ Q
            e = w * np.exp(-np.einsum("ij,ij->i", q, Qq))
            v = v + e
            if order >= 1:
                g = g - 2 * e[:, None] * Qq
            if order >= 2:
                H = H + e[:, None, None] * (4 * Qq[:, :, None] * Qq[:, None, :] - 2 * Q)
        if order >= 1:
            g = g / d
        if order >= 2:
            H = H / d**2
        return v, g, H

    def _argmax(self):
        p = self.center.copy()
        for _ in range(100):
            _, g, H = (arr[0] for arr in self._eval(p[None, :], 2))
            step = -np.linalg.solve(H, g)
            t, v0 = 1.0, self.value(p)
            while self.value(p + t * step) < v0 - 1e-15 and t > 1e-8:
                t *= 0.5
            p = p + t * step
            if np.linalg.norm(t * step) < 1e-14 * max(1.0, np.linalg.norm(p)):
                break
        return p

    @cached_property
    def bounds(self) -> FieldBounds:
        lo, hi = self.region
        u = qmc.Halton(d=2, scramble=False).random(4096)
        pts = np.vstack([lo + u * (hi - lo), self.source[None, :]])
        _, g, H = self._eval(pts, 2)
        return FieldBounds(
            K=float(np.max(np.linalg.norm(g, axis=1))),
            M=float(np.max(np.linalg.norm(H, ord=2, axis=(1, 2)))) / 2,
        )

    def translate(self, offset):
        off = np.asarray(offset, dtype=float)
        return replace(
            self,
            center=self.center + off,
            region=self.region + off,
            source=self.source + off,
        )


def reference_Q_a():
    return 0.9 * np.array([[1 / np.sqrt(30), 0.0], [1.0, 0.0]])


def reference_Q_b():
    A = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2)
    S = 0.9 * np.diag([1.0, 1 / np.sqrt(15)])
    return -A.T @ S @ A


# ---------------------------------------------------------------------------
# Regions and sampled bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Annulus:
    """Shell ``r_inner <= |p - center| <= r_outer``; ``r_inner = 0`` is a ball."""

    center: tuple
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not 0 <= self.r_inner <= self.r_outer or self.r_outer <= 0:
            raise FieldError(f"bad radii ({self.r_inner}, {self.r_outer})")

    def contains(self, p) -> bool:
        r = np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(self.center, dtype=float))
        return self.r_inner <= r <= self.r_outer

    def sample(self, n: int) -> np.ndarray:
        c = np.asarray(self.center, dtype=float)
        m = c.shape[0]
        u = qmc.Halton(d=m, scramble=False).random(n)
        r0, r1 = self.r_inner, self.r_outer
        # area/volume-uniform radius
        r = (r0**m + u[:, 0] * (r1**m - r0**m)) ** (1.0 / m)
        if m == 2:
            th = 2 * np.pi * u[:, 1]
            dirs = np.column_stack([np.cos(th), np.sin(th)])
        elif m == 3:
            z = 1 - 2 * u[:, 1]
            ph = 2 * np.pi * u[:, 2]
            rho = np.sqrt(1 - z**2)
            dirs = np.column_stack([rho * np.cos(ph), rho * np.sin(ph), z])
        else:
            raise FieldError(f"unsupported dimension {m}")
        return c + r[:, None] * dirs


def Ball(center, radius) -> Annulus:
    return Annulus(tuple(np.asarray(center, dtype=float)), 0.0, radius)


def sampled_norms(f: ScalarField, pts):
    """Gradient norms and half Hessian norms at ``pts``."""
    g = f.gradient(np.atleast_2d(pts))
    H = f.hessian(np.atleast_2d(pts))
    return np.linalg.norm(g, axis=1), np.linalg.norm(H, ord=2, axis=(1, 2)) / 2


def region_bounds(f: ScalarField, region: Annulus, samples: int = 1024) -> RegionBounds:
    """Gradient/Hessian extremes over a deterministic Halton sample of ``region``.

    Samples are nested in ``samples``: a larger count evaluates a superset of
    points, so ``K_min`` can only drop and ``K_max``/``M_S`` only grow.
    """
    if samples < 100:
        raise FieldError("region_bounds needs at least 100 samples")
    if region.contains(f.source):
        raise FieldError("region contains the source; K_min would be zero")
    gn, hn = sampled_norms(f, region.sample(samples))
    return RegionBounds(K_min=float(gn.min()), K_max=float(gn.max()), M_S=float(hn.max()))


# ---------------------------------------------------------------------------
# Moving sources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StaticPath:
    def position(self, t, start):
        return np.asarray(start, dtype=float)


@dataclass(frozen=True)
class LinearPath:
    velocity: tuple

    def position(self, t, start):
        return np.asarray(start, dtype=float) + t * np.asarray(self.velocity, dtype=float)


@dataclass(frozen=True)
class CirclePath:
    center: tuple
    radius: float
    omega: float
    phase: float = 0.0

    def position(self, t, start):
        ang = self.omega * t + self.phase
        c = np.asarray(self.center, dtype=float)
        return c + self.radius * np.array([np.cos(ang), np.sin(ang)])


@dataclass(frozen=True, eq=False)
class MovingSource:
    """A base field rigidly translated so its source follows ``path``."""

    base: ScalarField
    path: object = field(default_factory=StaticPath)

    def source_at(self, t) -> np.ndarray:
        return self.path.position(t, self.base.source)

    def at(self, t) -> ScalarField:
        if isinstance(self.path, StaticPath):
            return self.base
        return self.base.with_source(self.source_at(t))

    def value(self, p, t):
        return self.at(t).value(p)

    def gradient(self, p, t):
        return self.at(t).gradient(p)

    def hessian(self, p, t):
        return self.at(t).hessian(p)


def moving_source(f: ScalarField, trajectory) -> MovingSource:
    return MovingSource(f, trajectory)
