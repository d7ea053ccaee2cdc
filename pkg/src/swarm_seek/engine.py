"""Fixed-step closed-loop simulation, events, traces and summary metrics.

Per step, in order: read the field, advance the centroid estimator, refresh
and advance the direction estimator, pick each robot's direction, apply the
control law, integrate kinematics (RK4), apply due events, record.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ascent import L_sigma_from_readings
from .control import heading_error, heading_vectors, wrap
from .deployment import Deployment
from .errors import DisconnectionError, DivergenceError, ScenarioError
from .estimators import EulerPropagator, warm_start_time
from .scenario import Scenario

BLOWUP = 1e12

PER_ROBOT = ("positions", "headings", "x_hat", "mu_hat", "mu_c", "direction", "sigma", "delta", "valid", "active")
AGGREGATES = (
    "centroid", "source", "dist", "sigma_c", "formation_err", "max_deformation",
    "x_err", "mu_err", "max_abs_delta", "moving", "n_active", "speed_max", "speed_min",
)


@dataclass(eq=False)
class Trace:
    """Time-indexed record. Per-robot arrays have one row per original robot;
    rows of removed robots are NaN with ``active == False``."""

    t: np.ndarray
    data: dict = field(default_factory=dict)
    scenario: Scenario | None = None
    removals: list = field(default_factory=list)
    t_warm: float = 0.0

    def __getattr__(self, name):
        data = self.__dict__.get("data", {})
        if name in data:
            return data[name]
        raise AttributeError(name)

    def __len__(self):
        return len(self.t)

    @property
    def epsilon_ball(self) -> float:
        return self.scenario.epsilon_ball

    def digest(self) -> str:
        h = hashlib.sha256(np.ascontiguousarray(self.t).tobytes())
        for k in sorted(self.data):
            h.update(k.encode())
            h.update(np.ascontiguousarray(self.data[k]).tobytes())
        return h.hexdigest()


class _Recorder:
    def __init__(self, R, N0, m):
        self.t = np.full(R, np.nan)
        nan = lambda *shape: np.full(shape, np.nan)
        self.d = {
            "positions": nan(R, N0, m), "headings": nan(R, N0), "x_hat": nan(R, N0, m),
            "mu_hat": nan(R, N0, m), "mu_c": nan(R, N0, m), "direction": nan(R, N0, m),
            "sigma": nan(R, N0), "delta": nan(R, N0), "valid": np.zeros((R, N0), bool),
            "active": np.zeros((R, N0), bool), "centroid": nan(R, m), "source": nan(R, m),
            "dist": nan(R), "sigma_c": nan(R), "formation_err": nan(R), "max_deformation": nan(R),
            "x_err": nan(R), "mu_err": nan(R), "max_abs_delta": nan(R), "moving": np.zeros(R, bool),
            "n_active": np.zeros(R, int), "speed_max": nan(R), "speed_min": nan(R),
        }
        self.r = 0


def _rk4(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class _Sim:
    def __init__(self, s: Scenario):
        self.s = s
        est = s.estimator
        self.distributed = est.mode == "distributed"
        self.unicycle = s.robot_model == "unicycle"
        self.ids = np.arange(s.N)
        self.p = np.array(s.positions, dtype=float)
        self.alpha = None if s.headings is None else np.array(s.headings, dtype=float)
        self.p0 = self.p.copy()
        self.p_star = self.p.copy()
        m = self.p.shape[1]
        self.x_hat = np.zeros_like(self.p)
        self.mu_hat = np.zeros_like(self.p)
        self.mu = np.zeros_like(self.p)
        self.dirs = np.zeros_like(self.p)
        self.has_dir = np.zeros(s.N, bool)
        self.valid = np.zeros(s.N, bool)
        self.m = m
        D0 = Deployment(self.p - self.p.mean(axis=0)).D
        self.floor = est.floor_rel * abs(s.field.base.peak) * D0
        self._set_graph(s.graph)
        self.t_warm = self._warm(s.graph)
        self.motion_start = self.t_warm
        self.speed = (np.nan, np.nan)

    def _warm(self, g):
        est = self.s.estimator
        if est.warm_start is not None:
            return float(est.warm_start)
        if not self.distributed:
            return 0.0
        return warm_start_time(est.epsilon_x, est.epsilon_mu, g.spectrum.lambda2)

    def _set_graph(self, g):
        est = self.s.estimator
        self.g = g
        self.L = np.array(g.laplacian)
        if self.distributed:
            self.prop_x = EulerPropagator(g, self.s.dt, est.epsilon_x, est.x_substeps, "centroid")
            self.prop_mu = EulerPropagator(g, self.s.dt, est.epsilon_mu, est.mu_substeps, "direction")

    # -- layers ---------------------------------------------------------------

    def estimate(self, sig):
        if self.distributed:
            self.x_hat = self.prop_x(self.x_hat, self.L @ self.p)
            self.mu = sig[:, None] * self.x_hat
            self.mu_hat = self.prop_mu(self.mu_hat, self.L @ self.mu)
            mu_c = self.mu - self.mu_hat
            n = np.linalg.norm(mu_c, axis=1)
            valid = (n >= self.floor) & (n > 0)
            self.dirs[valid] = mu_c[valid] / n[valid, None]
        else:
            x = self.p - self.p.mean(axis=0)
            Ls = L_sigma_from_readings(sig, x)
            n = np.linalg.norm(Ls)
            ok = bool(n >= self.floor and n > 0)
            valid = np.full(len(self.p), ok)
            if ok:
                self.dirs[:] = Ls / n
        self.valid = valid
        self.has_dir |= valid

    def move(self, dt):
        s = self.s
        valid = self.valid
        if self.unicycle:
            kg = s.gains.k_gamma
            dirs = self.dirs
            n = len(self.p)

            def f(y):
                a = y[2 * n:]
                v = heading_vectors(a)
                w = np.where(valid, -kg * heading_error(a, dirs), 0.0)
                return np.concatenate([v.ravel(), w])

            y = np.concatenate([self.p.ravel(), self.alpha])
            y = _rk4(f, y, dt)
            p_new = y[: 2 * n].reshape(n, 2)
            chord = np.linalg.norm(p_new - self.p, axis=1) / dt
            self.speed = (float(chord.max()), float(chord.min()))
            self.p = p_new
            self.alpha = wrap(y[2 * n:])
        else:
            drive = np.where(valid[:, None], self.dirs, 0.0)
            kf, L, ps = s.gains.k_f, self.L, self.p_star
            self.p = _rk4(lambda p: drive - kf * (L @ (p - ps)), self.p, dt)

    def remove(self, ev, step):
        s = self.s
        where = np.nonzero(self.ids == ev.robot)[0]
        if len(where) == 0:
            raise ScenarioError(f"removal at t={ev.time:g}: robot {ev.robot} is not active")
        j = int(where[0])
        g2, _ = self.g.remove_node(j)
        if not g2.is_connected():
            comps = [[int(self.ids[k] if k < j else self.ids[k + 1]) for k in c] for c in g2.components()]
            raise DisconnectionError(
                f"removal of robot {ev.robot} at t={ev.time:g} (step {step}) disconnects the network "
                f"into {len(comps)} components: {comps}"
            )
        keep = np.arange(len(self.ids)) != j
        self.ids = self.ids[keep]
        for name in ("p", "p0", "p_star", "x_hat", "mu_hat", "mu", "dirs", "has_dir", "valid"):
            setattr(self, name, getattr(self, name)[keep])
        if self.alpha is not None:
            self.alpha = self.alpha[keep]
        self._set_graph(g2)
        if self.distributed and s.estimator.on_removal == "reset":
            self.x_hat[:] = 0.0
            self.mu_hat[:] = 0.0
            self.mu[:] = 0.0
            self.has_dir[:] = False
            self.valid[:] = False
            self.motion_start = ev.time + warm_start_time(
                s.estimator.epsilon_x, s.estimator.epsilon_mu, g2.spectrum.lambda2
            )

    # -- recording ------------------------------------------------------------

    def record(self, rec: _Recorder, t, moving):
        s = self.s
        r, d, ids = rec.r, rec.d, self.ids
        fld = s.field.at(t)
        src = s.field.source_at(t)
        sig = fld.value(self.p)
        pc = self.p.mean(axis=0)
        x = self.p - pc
        x0 = self.p0 - self.p0.mean(axis=0)
        xd = self.p_star - self.p_star.mean(axis=0)
        mu_c = self.mu - self.mu_hat
        rec.t[r] = t
        d["positions"][r, ids] = self.p
        d["x_hat"][r, ids] = self.x_hat
        d["mu_hat"][r, ids] = self.mu_hat
        d["mu_c"][r, ids] = mu_c
        d["direction"][r, ids] = np.where(self.has_dir[:, None], self.dirs, np.nan)
        d["sigma"][r, ids] = sig
        d["valid"][r, ids] = self.valid
        d["active"][r, ids] = True
        if self.alpha is not None:
            d["headings"][r, ids] = self.alpha
            delta = np.where(self.has_dir, heading_error(self.alpha, self.dirs), np.nan)
            d["delta"][r, ids] = delta
            if np.any(self.has_dir):
                d["max_abs_delta"][r] = np.nanmax(np.abs(delta))
        d["centroid"][r] = pc
        d["source"][r] = src
        d["dist"][r] = np.linalg.norm(pc - src)
        d["sigma_c"][r] = fld.value(pc)
        d["formation_err"][r] = np.mean(np.linalg.norm(x - xd, axis=1))
        d["max_deformation"][r] = np.max(np.linalg.norm(x - x0, axis=1))
        if self.distributed:
            d["x_err"][r] = np.mean(np.linalg.norm(self.x_hat - x, axis=1))
            d["mu_err"][r] = np.mean(np.linalg.norm(mu_c - self.mu.mean(axis=0), axis=1))
        d["moving"][r] = moving
        d["n_active"][r] = len(ids)
        d["speed_max"][r], d["speed_min"][r] = self.speed
        rec.r += 1

    def check(self, step):
        for name in ("p", "x_hat", "mu_hat"):
            v = getattr(self, name)
            if not np.all(np.isfinite(v)) or np.max(np.abs(v), initial=0.0) > BLOWUP:
                raise DivergenceError(f"{name} diverged (non-finite or above {BLOWUP:g})", step=step)


def run(s: Scenario, decimate: int = 1) -> Trace:
    """Simulate ``s``; deterministic for a given scenario."""
    if decimate < 1:
        raise ScenarioError("decimate must be >= 1")
    sim = _Sim(s)
    steps, dt = s.steps, s.dt
    marks = sorted(set(range(0, steps + 1, decimate)) | {steps})
    rec = _Recorder(len(marks), s.N, sim.m)
    sim.record(rec, 0.0, False)
    events = list(s.events)
    removals = []
    for k in range(steps):
        t = k * dt
        sig = s.field.at(t).value(sim.p)
        sim.estimate(sig)
        moving = t >= sim.motion_start - 1e-9 * dt
        if moving:
            sim.move(dt)
        else:
            sim.speed = (np.nan, np.nan)
        t1 = (k + 1) * dt
        while events and events[0].time <= t1 + 1e-9 * dt:
            ev = events.pop(0)
            sim.remove(ev, k + 1)
            removals.append((t1, ev.robot))
        sim.check(k + 1)
        if (k + 1) % decimate == 0 or k + 1 == steps:
            sim.record(rec, t1, moving)
    return Trace(t=rec.t, data=rec.d, scenario=s, removals=removals, t_warm=sim.t_warm)


# ---------------------------------------------------------------------------
# Summaries and export
# ---------------------------------------------------------------------------


def entry_times(dist, t, radius):
    """First time inside ``radius`` and the time after which it never leaves."""
    inside = dist < radius
    if not inside.any():
        return None, None
    first = float(t[np.argmax(inside)])
    if not inside[-1]:
        return first, None
    outside = np.nonzero(~inside)[0]
    settled = float(t[0]) if len(outside) == 0 else float(t[outside[-1] + 1])
    return first, settled


def fit_rate(t, err, lo=1e-11, hi=None):
    """Exponential decay rate from a log-linear least-squares fit."""
    t = np.asarray(t, dtype=float)
    err = np.asarray(err, dtype=float)
    ok = np.isfinite(err) & (err > lo)
    if hi is not None:
        ok &= err < hi
    if ok.sum() < 3:
        return None
    slope = np.polyfit(t[ok], np.log(err[ok]), 1)[0]
    return float(-slope)


def metrics(tr: Trace) -> dict:
    if len(tr) == 0:
        raise ValueError("empty trace")
    t, dist = tr.t, tr.dist
    first, settled = entry_times(dist, t, tr.epsilon_ball)
    warm = t <= tr.t_warm + 1e-12
    out = {
        "steps": int(len(t)),
        "final_time": float(t[-1]),
        "epsilon_ball": float(tr.epsilon_ball),
        "initial_distance": float(dist[0]),
        "final_distance": float(dist[-1]),
        "min_distance": float(np.min(dist)),
        "entry_time": first,
        "settled_entry_time": settled,
        "max_deformation": float(np.nanmax(tr.max_deformation)),
        "final_formation_error": float(tr.formation_err[-1]),
        "sigma_c_initial": float(tr.sigma_c[0]),
        "sigma_c_final": float(tr.sigma_c[-1]),
        "removals": [[float(a), int(b)] for a, b in tr.removals],
        "t_warm": float(tr.t_warm),
        "final_active": int(tr.n_active[-1]),
    }
    if np.any(np.isfinite(tr.x_err)):
        out["x_error_rate"] = fit_rate(t[warm], tr.x_err[warm])
        out["mu_error_rate"] = fit_rate(t[warm], tr.mu_err[warm])
        out["final_x_error"] = float(tr.x_err[-1])
    if np.any(np.isfinite(tr.max_abs_delta)):
        env = tr.max_abs_delta
        out["delta_envelope"] = {
            "max": float(np.nanmax(env)),
            "final": float(env[-1]) if np.isfinite(env[-1]) else None,
        }
        sp = tr.speed_max[np.isfinite(tr.speed_max)]
        if len(sp):
            out["chord_speed_range"] = [float(np.nanmin(tr.speed_min)), float(np.max(sp))]
    return out


def robot_columns(m: int) -> list[str]:
    axes = "xyz"[:m]
    return (
        ["t", "robot"] + [f"p_{a}" for a in axes] + ["alpha", "sigma_reading"]
        + [f"xhat_{a}" for a in axes] + [f"mu_c_{a}" for a in axes] + ["delta", "active"]
    )


def aggregate_columns(m: int) -> list[str]:
    axes = "xyz"[:m]
    return ["t"] + [f"centroid_{a}" for a in axes] + ["dist_to_source", "formation_err", "max_deformation"]


def robot_table(tr: Trace) -> np.ndarray:
    R, N, m = tr.positions.shape
    t = np.repeat(tr.t, N)[:, None]
    rid = np.tile(np.arange(N), R)[:, None]
    cols = [
        t, rid, tr.positions.reshape(-1, m), tr.headings.reshape(-1, 1), tr.sigma.reshape(-1, 1),
        tr.x_hat.reshape(-1, m), tr.mu_c.reshape(-1, m), tr.delta.reshape(-1, 1),
        tr.active.reshape(-1, 1).astype(float),
    ]
    return np.hstack(cols)


def aggregate_table(tr: Trace) -> np.ndarray:
    return np.column_stack([tr.t, tr.centroid, tr.dist, tr.formation_err, tr.max_deformation])


def write_outputs(tr: Trace, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    m = tr.positions.shape[2]
    paths = {
        "trace": out / "trace.csv",
        "aggregates": out / "aggregates.csv",
        "metrics": out / "metrics.json",
    }
    np.savetxt(paths["trace"], robot_table(tr), delimiter=",", header=",".join(robot_columns(m)),
               comments="", fmt="%.10g")
    np.savetxt(paths["aggregates"], aggregate_table(tr), delimiter=",",
               header=",".join(aggregate_columns(m)), comments="", fmt="%.10g")
    summary = metrics(tr)
    summary["trace_sha256"] = tr.digest()
    paths["metrics"].write_text(json.dumps(summary, indent=2) + "\n")
    return paths
