"""Formation control, single-integrator action and the unicycle heading law."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

K_F = 0.1

# +pi/2 rotation
E = np.array([[0.0, -1.0], [1.0, 0.0]])


class ControlError(ValueError):
    pass


@dataclass(frozen=True)
class ControlGains:
    k_f: float = K_F
    k_gamma: float = 1.0
    gamma: float = 0.3

    def __post_init__(self):
        if min(self.k_f, self.k_gamma, self.gamma) <= 0:
            raise ControlError("gains must be positive")
        if self.gamma >= np.pi / 2:
            raise ControlError("gamma must lie in (0, pi/2)")


@dataclass(frozen=True, eq=False)
class SingleIntegratorState:
    positions: np.ndarray


@dataclass(frozen=True, eq=False)
class UnicycleState:
    positions: np.ndarray
    headings: np.ndarray

    @property
    def unit_headings(self) -> np.ndarray:
        return heading_vectors(self.headings)


def wrap(angle):
    """Map to (-pi, pi]."""
    a = np.asarray(angle, dtype=float)
    w = np.pi - np.mod(np.pi - a, 2 * np.pi)
    return w if w.ndim else float(w)


def heading_vectors(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    return np.stack([np.cos(a), np.sin(a)], axis=-1)


def formation_control(g: Graph, p, p_star, k_f: float = K_F) -> np.ndarray:
    """``-k_f L (p - p*)``; zero for any translate of the target shape."""
    e = np.asarray(p, dtype=float) - np.asarray(p_star, dtype=float)
    return -k_f * (g.laplacian @ e)


def si_control(direction, u_f) -> np.ndarray:
    """Common unit direction plus the formation term.

    ``direction`` may also be an ``(N, m)`` array of per-robot directions.
    """
    return np.asarray(u_f, dtype=float) + np.asarray(direction, dtype=float)


def signed_delta(m_i, m_d):
    """``atan2((E m_i)^T m_d, m_i^T m_d)`` for unit vectors (rows broadcast).

    Returns ``+pi`` at the antipodal branch point.
    """
    m_i = np.asarray(m_i, dtype=float)
    m_d = np.asarray(m_d, dtype=float)
    cross = m_i[..., 0] * m_d[..., 1] - m_i[..., 1] * m_d[..., 0]
    dot = np.sum(m_i * m_d, axis=-1)
    d = np.arctan2(cross, dot)
    # atan2(-0.0, negative) would give -pi
    d = np.where(d == -np.pi, np.pi, d)
    return d if d.ndim else float(d)


def heading_error(alpha, direction):
    """Heading minus desired heading, in (-pi, pi].

    This is :func:`signed_delta` with the roles of the two vectors exchanged,
    which is the orientation that makes ``omega = -k_gamma * delta`` turn
    the robot toward ``direction``.
    """
    return signed_delta(np.asarray(direction, dtype=float), heading_vectors(alpha))


def unicycle_control(state: UnicycleState, direction, k_gamma: float, valid=True) -> np.ndarray:
    """Angular velocities ``-k_gamma * delta_i``; robots without a valid direction hold (omega = 0)."""
    delta = np.atleast_1d(heading_error(state.headings, direction))
    omega = -k_gamma * delta
    return np.where(np.broadcast_to(valid, omega.shape), omega, 0.0)


def kappa_floor(gamma: float, Omega_d: float, T: float, kappa1: float) -> float:
    if not 0 < gamma < np.pi / 2:
        raise ControlError("gamma must lie in (0, pi/2)")
    if Omega_d < 0 or T <= 0 or kappa1 <= 0:
        raise ControlError("need Omega_d >= 0, T > 0, kappa1 > 0")
    return float(max(kappa1, 2 * Omega_d / gamma, 2 / T * np.log(np.pi / gamma)))


def omega_d_estimate(m_d_samples, dt: float) -> np.ndarray:
    """Finite-difference turn rate of a sequence of unit vectors, one value per step."""
    m = np.asarray(m_d_samples, dtype=float)
    if len(m) < 2:
        raise ControlError("need at least two samples")
    ang = np.arctan2(m[:, 1], m[:, 0])
    return np.abs(wrap(np.diff(ang))) / dt


def omega_d_bound(N: int, M: float, K: float, M1: float, m_gain: float, epsilon: float) -> float:
    """Conservative turn-rate bound ``2 C1 / (m eps)`` with ``C1 = N M1 (M M1 + 2K)``.

    ``M1`` bounds every ``|x_i|``; ``m_gain`` is a lower bound on
    ``|L1| / |grad|`` (e.g. ``lambda_min(P) / D^2``).
    """
    C1 = N * M1 * (M * M1 + 2 * K)
    return 2 * C1 / (m_gain * epsilon)


def pairwise_delta(delta) -> np.ndarray:
    """``delta_i - delta_j`` of heading errors, as an (N, N) array.

    Deliberately not wrapped: each ``delta_i`` already lives in (-pi, pi]
    and the difference contracts as a plain real number.
    """
    d = np.asarray(delta, dtype=float)
    return d[:, None] - d[None, :]
