"""Plot-ready CSV tables behind the named figures. No rendering happens here."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import ascent, deployment as dep, engine, fields, scenario


def _save(path, header, rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    np.savetxt(path, rows, delimiter=",", header=",".join(header), comments="", fmt="%.10g")
    return path


def fig2(out: Path):
    """Heptagon certificate ``h_S`` and ``K_min / M_S`` over balls around the centroid."""
    f = fields.GaussianField(np.zeros(2), amplitude=1.0, width=1.0)
    x = dep.regular_polygon(7, 0.75)
    st = dep.stats(x)
    need = st.D**3 / st.lambda_min
    rows = []
    for dist in np.linspace(0.5, 4.0, 36):
        pc = np.array([dist, 0.0])
        margin = f.gradient(pc) @ ascent.L_sigma(f, pc, x)
        for diam in (1.5, 2.0, 3.0):
            ball = fields.Ball(pc, diam / 2)
            if ball.contains(f.source):
                rows.append([dist, diam, np.nan, np.nan, need, margin])
                continue
            rb = fields.region_bounds(f, ball, 1024)
            rows.append([dist, diam, dep.h_condition(x, rb), rb.K_min / rb.M_S, need, margin])
    header = ["dist_to_source", "diameter", "h_S", "Kmin_over_MS", "ratio_lower_bound", "ascent_margin"]
    return [_save(out / "fig2.csv", header, rows)]


def fig3(out: Path):
    """Cross deployments: closed-form agreement, half-gradient limit and robustness to removals."""
    f = fields.GaussianField(np.zeros(2), width=3.0)
    pc = np.array([2.0, -1.3])
    g = f.gradient(pc)
    rng = np.random.default_rng(0)
    rows = []
    for nh in (4, 8, 20, 40, 100, 200, 400, 800):
        par, perp = dep.cross_segments(nh)
        L1p = ascent.L1_sigma(f, pc, dep.Deployment(par))
        L1q = ascent.L1_sigma(f, pc, dep.Deployment(perp))
        rel = np.linalg.norm(L1p + L1q - g / 2) / np.linalg.norm(g / 2)
        full = dep.cross_deployment(nh)
        keep = np.sort(rng.permutation(2 * nh)[: max(2 * nh - 15, 4)])
        thin = dep.from_positions(full.coords[keep])
        rows.append([
            nh, rel, ascent.angle_between(ascent.L_sigma(f, pc, full), g),
            ascent.angle_between(ascent.L1_sigma(f, pc, full), g),
            ascent.angle_between(ascent.L_sigma(f, pc, thin), g),
        ])
    header = ["N_half", "half_gradient_rel_error", "angle_L", "angle_L1", "angle_L_minus15"]
    return [_save(out / "fig3.csv", header, rows)]


def fig4(out: Path):
    """Disk deployments of growing size: symmetry moments and alignment."""
    f = fields.GaussianField(np.zeros(2), width=2.0)
    pc = np.array([1.5, 1.0])
    g = f.gradient(pc)
    rows = []
    for n in (100, 200, 500, 1000, 2000):
        x = dep.sample_disk(n)
        mxy, mxx = dep.symmetry_moments(x.coords)
        var = np.trace(x.P) / 2
        rows.append([n, mxy / var, mxx / var, ascent.alignment_angle(f, pc, x),
                     ascent.angle_between(ascent.L_sigma(f, pc, x), g)])
    header = ["N", "m_xy_over_var", "m_xx_yy_over_var", "angle_L1", "angle_L"]
    return [_save(out / "fig4.csv", header, rows)]


def _robot_rows(tr, cols):
    R, N = tr.sigma.shape
    t = np.repeat(tr.t, N)
    rid = np.tile(np.arange(N), R)
    return np.column_stack([t, rid] + [c.reshape(R * N, -1) for c in cols])


def fig6(out: Path, decimate: int = 10):
    tr = engine.run(scenario.preset("benchmark_si"), decimate=decimate)
    agg = np.column_stack([tr.t, tr.centroid, tr.dist, tr.sigma_c, tr.formation_err, tr.x_err, tr.mu_err])
    a = _save(out / "fig6_aggregates.csv",
              ["t", "centroid_x", "centroid_y", "dist_to_source", "sigma_c", "formation_err", "xhat_err", "mu_err"], agg)
    est = tr.positions - tr.x_hat
    r = _save(out / "fig6_robots.csv",
              ["t", "robot", "p_x", "p_y", "centroid_est_x", "centroid_est_y", "dir_x", "dir_y", "sigma_reading"],
              _robot_rows(tr, [tr.positions, est, tr.direction, tr.sigma]))
    return [a, r]


def fig7(out: Path, decimate: int = 10):
    tr = engine.run(scenario.preset("resilience_si"), decimate=decimate)
    removed_at = np.full(tr.sigma.shape[1], np.nan)
    for t, rid in tr.removals:
        removed_at[rid] = t
    rows = _robot_rows(tr, [tr.positions, tr.sigma, tr.active.astype(float),
                            np.broadcast_to(removed_at, tr.sigma.shape)])
    r = _save(out / "fig7_robots.csv", ["t", "robot", "p_x", "p_y", "sigma_reading", "active", "removed_at"], rows)
    peak = scenario.preset("resilience_si").field.base.peak
    agg = np.column_stack([tr.t, tr.centroid, tr.dist, tr.n_active, np.full(len(tr), peak)])
    a = _save(out / "fig7_aggregates.csv", ["t", "centroid_x", "centroid_y", "dist_to_source", "n_active", "source_value"], agg)
    return [r, a]


def fig8(out: Path, decimate: int = 10):
    tr = engine.run(scenario.preset("unicycle_moving_source"), decimate=decimate)
    r = _save(out / "fig8_robots.csv", ["t", "robot", "p_x", "p_y", "alpha", "delta"],
              _robot_rows(tr, [tr.positions, tr.headings, tr.delta]))
    agg = np.column_stack([tr.t, tr.source, tr.centroid, tr.dist, tr.max_abs_delta])
    a = _save(out / "fig8_source.csv",
              ["t", "source_x", "source_y", "centroid_x", "centroid_y", "dist_to_source", "max_abs_delta"], agg)
    return [r, a]


FIGURES = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig6": fig6, "fig7": fig7, "fig8": fig8}


def emit(name: str, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return FIGURES[name](out)
