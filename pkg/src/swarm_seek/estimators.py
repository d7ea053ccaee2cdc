"""Consensus estimators for centroid-relative positions and the ascent direction.

Both protocols are first-order Laplacian dynamics scaled by a time
constant ``eps``; they are integrated with explicit Euler under the guard
``dt * lambda_max(L) / eps < 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import StabilityError
from .graph import Graph

EPSILON_X = 0.5
EPSILON_MU = 0.001


@dataclass(frozen=True, eq=False)
class EstimatorState:
    x_hat: np.ndarray
    mu_hat: np.ndarray
    mu: np.ndarray
    epsilon_x: float = EPSILON_X
    epsilon_mu: float = EPSILON_MU
    last_direction: np.ndarray | None = None
    has_direction: np.ndarray | None = None

    @classmethod
    def zeros(cls, N, m, epsilon_x=EPSILON_X, epsilon_mu=EPSILON_MU):
        z = np.zeros((N, m))
        return cls(
            x_hat=z.copy(), mu_hat=z.copy(), mu=z.copy(),
            epsilon_x=epsilon_x, epsilon_mu=epsilon_mu,
            last_direction=z.copy(), has_direction=np.zeros(N, dtype=bool),
        )

    @classmethod
    def anchored(cls, N, m, anchor, x_anchor, **kw):
        """Initial condition whose limit is the position relative to ``anchor``.

        The estimator converges to ``x + mean(x_hat(0))``, so the anchor seeds
        ``-N * x_anchor``; every other robot starts at zero.
        """
        st = cls.zeros(N, m, **kw)
        st.x_hat[anchor] = -N * np.asarray(x_anchor, dtype=float)
        return st

    @property
    def N(self):
        return self.x_hat.shape[0]

    @property
    def mu_c(self) -> np.ndarray:
        return self.mu - self.mu_hat


@dataclass(frozen=True)
class DirectionEstimate:
    mu_c_i: np.ndarray
    unit_direction: np.ndarray | None
    valid: bool

    @property
    def hold(self) -> bool:
        return self.unit_direction is None


def check_step(g: Graph, dt: float, eps: float, label: str = "estimator"):
    ratio = dt * g.spectrum.lambda_max / eps
    if not ratio < 2:
        raise StabilityError(
            f"{label} Euler step unstable: dt*lambda_max/eps = {ratio:.4g} >= 2 "
            f"(dt={dt:g}, lambda_max={g.spectrum.lambda_max:.4g}, eps={eps:g})"
        )
    return ratio


def relative_positions(g: Graph, p) -> np.ndarray:
    """Per-edge ``p_tail - p_head``."""
    return g.incidence.T @ np.asarray(p, dtype=float)


def _euler(v, forcing, L, dt, eps):
    return v + (dt / eps) * (forcing - L @ v)


def centroid_step(state: EstimatorState, g: Graph, rel_positions, dt: float) -> EstimatorState:
    check_step(g, dt, state.epsilon_x, "centroid")
    Bz = g.incidence @ np.asarray(rel_positions, dtype=float)
    return replace(state, x_hat=_euler(state.x_hat, Bz, g.laplacian, dt, state.epsilon_x))


def centroid_step_anchored(state, g, rel_positions, dt, anchor: int) -> EstimatorState:
    """Same dynamics; the anchor only enters through the initial condition
    (see :meth:`EstimatorState.anchored`)."""
    if not 0 <= anchor < state.N:
        raise IndexError(f"anchor {anchor} out of range")
    return centroid_step(state, g, rel_positions, dt)


def mu_measure(state: EstimatorState, sigma_readings) -> EstimatorState:
    s = np.asarray(sigma_readings, dtype=float)
    return replace(state, mu=s[:, None] * state.x_hat)


def mu_step(state: EstimatorState, g: Graph, dt: float) -> EstimatorState:
    check_step(g, dt, state.epsilon_mu, "direction")
    forcing = g.laplacian @ state.mu
    return replace(state, mu_hat=_euler(state.mu_hat, forcing, g.laplacian, dt, state.epsilon_mu))


def reset_consensus(mu0, g: Graph, dt: float, horizon: float) -> np.ndarray:
    """Plain average consensus from ``mu0``; used as a reference in tests."""
    check_step(g, dt, 1.0, "consensus")
    mu = np.array(mu0, dtype=float)
    L = g.laplacian
    for _ in range(int(round(horizon / dt))):
        mu = mu - dt * (L @ mu)
    return mu


def direction(state: EstimatorState, i: int, floor: float) -> DirectionEstimate:
    mu_c = state.mu[i] - state.mu_hat[i]
    n = np.linalg.norm(mu_c)
    if n >= floor and n > 0:
        return DirectionEstimate(mu_c, mu_c / n, True)
    if state.has_direction is not None and state.has_direction[i]:
        return DirectionEstimate(mu_c, state.last_direction[i].copy(), False)
    return DirectionEstimate(mu_c, None, False)


def update_directions(state: EstimatorState, floor: float):
    """Vectorised :func:`direction` for every robot.

    Returns ``(state', unit, valid)``; ``unit`` rows of invalid robots hold
    their last valid direction (zeros if none).
    """
    mu_c = state.mu - state.mu_hat
    n = np.linalg.norm(mu_c, axis=1)
    valid = (n >= floor) & (n > 0)
    last = state.last_direction.copy()
    last[valid] = mu_c[valid] / n[valid, None]
    has = state.has_direction | valid
    return replace(state, last_direction=last, has_direction=has), last, valid


def warm_start_time(epsilon_x: float, epsilon_mu: float, lambda2: float) -> float:
    return 10 * max(epsilon_x, epsilon_mu) / lambda2


class EulerPropagator:
    """``n`` explicit-Euler substeps of ``v' = (f - L v) / eps`` with ``f`` held fixed.

    Collapsed into ``v_n = Phi v_0 + Gamma f``; algebraically identical to
    looping over the substeps. The stability guard applies to ``dt / n``.
    """

    def __init__(self, g: Graph, dt: float, eps: float, substeps: int = 1, label: str = "estimator"):
        if substeps < 1:
            raise ValueError("substeps must be >= 1")
        h = dt / substeps
        self.ratio = check_step(g, h, eps, label)
        n = g.node_count
        A = np.eye(n) - (h / eps) * g.laplacian
        Phi = np.eye(n)
        S = np.zeros((n, n))
        for _ in range(substeps):
            S = S + Phi
            Phi = A @ Phi
        self.Phi = Phi
        self.Gamma = (h / eps) * S

    def __call__(self, v, forcing):
        return self.Phi @ v + self.Gamma @ forcing
