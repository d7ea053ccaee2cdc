"""Property suites behind ``swarm-seek validate``.

Each suite returns a list of :class:`Check` records; a suite passes when all
its checks pass. Sampling uses fixed seeds so reruns are identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import ascent, control, deployment as dep, engine, estimators as est, fields, scenario
from .graph import Graph


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    margin: float = float("nan")
    detail: str = ""

    def line(self, suite: str) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" margin={self.margin:.3g}" if np.isfinite(self.margin) else ""
        return f"{tag} {suite}.{self.name}{extra}" + (f" ({self.detail})" if self.detail else "")


# ---------------------------------------------------------------------------
# random configurations


def random_spd(rng, m=2, cond=10.0):
    Q, _ = np.linalg.qr(rng.normal(size=(m, m)))
    w = rng.uniform(1.0, cond, size=m)
    return Q @ np.diag(w) @ Q.T


def random_field(rng, kind):
    if kind == "gaussian":
        return fields.GaussianField(rng.normal(size=2) * 3, amplitude=rng.uniform(0.5, 2), width=rng.uniform(1, 4))
    if kind == "quadratic":
        return fields.QuadraticField(rng.normal(size=2) * 3, c=50.0, Q=random_spd(rng, 2, 5.0) / 5, bounds_radius=20.0)
    return benchmark_field()


_BENCH = None


def benchmark_field():
    global _BENCH
    if _BENCH is None:
        _BENCH = fields.BenchmarkField(center=np.array([40.0, 40.0]), region=np.array([[-40.0, -40.0], [100.0, 100.0]]))
    return _BENCH


def random_deployment(rng, scale=1.0, n_range=(3, 20)):
    while True:
        n = int(rng.integers(*n_range, endpoint=True))
        x = dep.from_positions(rng.normal(size=(n, 2)) * scale * rng.uniform(0.3, 1.5, size=2))
        if not dep.stats(x).degenerate:
            return x


def random_centroid(rng, f, lo=0.5, hi=8.0):
    ang = rng.uniform(-np.pi, np.pi)
    r = rng.uniform(lo, hi)
    if isinstance(f, fields.BenchmarkField):
        r *= 5
    return f.source + r * np.array([np.cos(ang), np.sin(ang)])


FAMILIES = ("gaussian", "quadratic", "benchmark")


# ---------------------------------------------------------------------------
# suites


def suite_graph():
    out = []
    g = Graph.reference()
    L, B = g.laplacian, g.incidence
    out.append(Check("laplacian_identity", bool(np.max(np.abs(L - B @ B.T)) < 1e-12 and np.all(np.abs(L.sum(0)) < 1e-12))))
    lam2 = g.spectrum.lambda2
    out.append(Check("reference_lambda2", abs(lam2 - 0.26) <= 0.005, 0.005 - abs(lam2 - 0.26), f"lambda2={lam2:.4f}"))
    rng = np.random.default_rng(0)
    agree = 0
    perm_ok = True
    for _ in range(100):
        n = int(rng.integers(2, 21))
        adj = np.triu(rng.random((n, n)) < rng.uniform(0.05, 0.5), 1)
        gr = Graph.from_adjacency(adj | adj.T)
        agree += (gr.spectrum.lambda2 > 1e-9) == gr.is_connected()
        perm = rng.permutation(n)
        perm_ok &= bool(np.allclose(gr.relabel(perm).spectrum.eigenvalues, gr.spectrum.eigenvalues, atol=1e-10))
    out.append(Check("spectral_vs_traversal", agree == 100, detail=f"{agree}/100 agree"))
    out.append(Check("permutation_invariance", perm_ok))
    return out


def _fd_errors(f, pts, h=1e-5):
    g_err = h_err = 0.0
    m = pts.shape[1]
    for p in pts:
        g = f.gradient(p)
        H = f.hessian(p)
        fd_g = np.array([(f.value(p + h * e) - f.value(p - h * e)) / (2 * h) for e in np.eye(m)])
        fd_H = np.column_stack([(f.gradient(p + h * e) - f.gradient(p - h * e)) / (2 * h) for e in np.eye(m)])
        g_err = max(g_err, np.linalg.norm(g - fd_g) / max(np.linalg.norm(g), 1e-8))
        h_err = max(h_err, np.linalg.norm(H - fd_H) / max(np.linalg.norm(H), 1e-8))
    return g_err, h_err


def field_samples(f, n, rng):
    if isinstance(f, fields.BenchmarkField):
        lo, hi = f.region
        pts = lo + rng.random((n, 2)) * (hi - lo)
    else:
        pts = f.source + rng.normal(size=(n, f.dimension)) * 3
    # keep clear of the smoothed apex
    far = np.linalg.norm(pts - f.source, axis=1) > 1e-2
    return pts[far]


def suite_fields():
    rng = np.random.default_rng(1)
    out = []
    for kind in FAMILIES:
        f = random_field(rng, kind)
        g_err, h_err = _fd_errors(f, field_samples(f, 60, rng))
        out.append(Check(f"{kind}_gradient_fd", g_err < 1e-5, 1e-5 - g_err, f"max rel err {g_err:.2e}"))
        out.append(Check(f"{kind}_hessian_fd", h_err < 1e-4, 1e-4 - h_err, f"max rel err {h_err:.2e}"))
    for kind in ("gaussian", "quadratic"):
        f = random_field(rng, kind)
        ok = True
        for _ in range(20):
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            v = f.value(f.source + np.linspace(0.05, 6, 20)[:, None] * u)
            ok &= bool(np.all(np.diff(v) < 0))
        out.append(Check(f"{kind}_radial_decrease", ok))
    f = fields.GaussianField(np.zeros(2))
    region = fields.Annulus((0.0, 0.0), 1.0, 2.0)
    prev = fields.region_bounds(f, region, 128)
    mono = True
    for n in (256, 1024, 4096):
        cur = fields.region_bounds(f, region, n)
        mono &= cur.K_min <= prev.K_min + 1e-3 and cur.K_max >= prev.K_max - 1e-3 and cur.M_S >= prev.M_S - 1e-3
        prev = cur
    out.append(Check("region_bounds_monotone", bool(mono)))
    return out


def suite_polygon():
    worst = 0.0
    for N in range(3, 13):
        for phase in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            rho = 0.75
            x = dep.regular_polygon(N, rho, phase)
            worst = max(worst, np.linalg.norm(x.P - rho**2 / 2 * np.eye(2)))
    rng = np.random.default_rng(2)
    aff = 0.0
    for _ in range(50):
        x = random_deployment(rng)
        A = rng.normal(size=(2, 2))
        aff = max(aff, np.linalg.norm(dep.affine_transform(x, A).P - A @ x.P @ A.T))
    return [
        Check("polygon_covariance", worst < 1e-9, 1e-9 - worst, f"max |P - rho^2/2 I| = {worst:.2e}"),
        Check("affine_covariance", aff < 1e-10, 1e-10 - aff),
    ]


def _triples(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    for k in range(n):
        f = random_field(rng, FAMILIES[k % 3])
        s = scale * (5 if isinstance(f, fields.BenchmarkField) else 1)
        x = random_deployment(rng, s)
        yield f, random_centroid(rng, f), x


def suite_lemma1(n=500):
    worst = np.inf
    fails = 0
    for f, pc, x in _triples(n, 3):
        st = dep.stats(x)
        g = f.gradient(pc)
        val = g @ ascent.L1_sigma(f, pc, x)
        margin = 1e-12 * (g @ g) * st.lambda_min / st.D**2
        fails += not val > margin
        worst = min(worst, val / ((g @ g) * st.lambda_min / st.D**2))
    return [Check("ascent_positive", fails == 0, worst, f"{fails} violations in {n}")]


def suite_lemma2(n=100):
    out = []
    rng = np.random.default_rng(4)
    for kind in FAMILIES:
        f = random_field(rng, kind)
        worst, bad = np.inf, 0
        for _ in range(n):
            s = (5 if kind == "benchmark" else 1) * rng.choice([0.1, 0.5, 1.0])
            x = random_deployment(rng, s)
            lhs, rhs, ok = ascent.divergence_bound_check(f, random_centroid(rng, f), x)
            bad += not ok
            worst = min(worst, rhs - lhs)
        out.append(Check(f"{kind}_bound", bad == 0, worst, f"{bad} violations in {n}"))
    f = random_field(rng, "quadratic")
    worst = 0.0
    for _ in range(n):
        half = rng.normal(size=(int(rng.integers(2, 8)), 2))
        x = dep.Deployment(np.vstack([half, -half]))
        pc = random_centroid(rng, f)
        worst = max(worst, np.linalg.norm(ascent.L_sigma(f, pc, x) - ascent.L1_sigma(f, pc, x)))
    out.append(Check("quadratic_centrosymmetric_exact", worst < 1e-10, 1e-10 - worst, f"max |L - L1| = {worst:.2e}"))
    return out


def suite_lemma3(n=500):
    bad = 0
    for f, pc, x in _triples(n, 5):
        bad += not ascent.rayleigh_bounds_check(f, pc, x)
    return [Check("rayleigh_sandwich", bad == 0, detail=f"{bad} violations in {n}")]


def suite_prop1(n=1000):
    rng = np.random.default_rng(6)
    certified = bad = 0
    for k in range(n):
        f = fields.GaussianField(np.zeros(2), width=rng.uniform(1.0, 3.0))
        x = random_deployment(rng, rng.uniform(0.05, 0.4))
        pc = random_centroid(rng, f, 0.5, 4.0)
        ball = fields.Ball(pc, x.D * 1.0001)
        if ball.contains(f.source):
            continue
        rb = fields.region_bounds(f, ball, 256)
        if dep.h_condition(x, rb) > 0:
            certified += 1
            bad += not f.gradient(pc) @ ascent.L_sigma(f, pc, x) > 0
    return [Check("certificate_sound", bad == 0 and certified > 0, detail=f"{certified} certified, {bad} counterexamples")]


def suite_prop2(n=50):
    rng = np.random.default_rng(7)
    worst = 0.0
    f = fields.GaussianField(np.zeros(2), width=2.0)
    for _ in range(n):
        U, _ = np.linalg.qr(rng.normal(size=(2, 2)))
        V, _ = np.linalg.qr(rng.normal(size=(2, 2)))
        s1 = rng.uniform(0.2, 2.0)
        s = np.array([s1, s1 / rng.uniform(1.0, 10.0)])
        A = U @ np.diag(s) @ V.T
        x = dep.affine_transform(dep.regular_polygon(int(rng.integers(3, 13)), 1.0, rng.uniform(0, 2 * np.pi)), A)
        pc = random_centroid(rng, f, 0.5, 4.0)
        target = ascent.stretched_gradient_direction(A, f.gradient(pc))
        worst = max(worst, ascent.alignment_angle(f, pc, x, target))
    return [Check("stretched_alignment", worst < 1e-9, 1e-9 - worst, f"max angle {worst:.2e} rad")]


def cross_checks(N_half, f, pc):
    par, perp = dep.cross_segments(N_half)
    g = f.gradient(pc)
    th = np.arctan2(g[1], g[0])
    scale = 0.5 * np.linalg.norm(g) * (4 + N_half) / N_half
    expect_par = scale * np.cos(th) * np.array([1.0, 0.0])
    expect_perp = scale * np.sin(th) * np.array([0.0, 1.0])
    L_par = ascent.L1_sigma(f, pc, dep.Deployment(par))
    L_perp = ascent.L1_sigma(f, pc, dep.Deployment(perp))
    closed = max(np.linalg.norm(L_par - expect_par), np.linalg.norm(L_perp - expect_perp))
    rel = np.linalg.norm(L_par + L_perp - g / 2) / np.linalg.norm(g / 2)
    return closed, rel


def suite_prop3():
    f = fields.GaussianField(np.zeros(2), width=3.0)
    pc = np.array([2.0, -1.3])
    out = []
    for N_half, tol in ((40, 0.05), (800, 0.005)):
        closed, rel = cross_checks(N_half, f, pc)
        out.append(Check(f"closed_form_N{N_half}", closed < 1e-9, 1e-9 - closed))
        out.append(Check(f"half_gradient_N{N_half}", rel < tol, tol - rel, f"relative error {rel:.4g}"))
    return out


def suite_prop4():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        f = random_field(rng, "quadratic")
        half = rng.normal(size=(int(rng.integers(2, 8)), 2))
        x = dep.Deployment(np.vstack([half, -half]))
        pc = random_centroid(rng, f)
        worst = max(worst, np.linalg.norm(ascent.L2_sigma(f, pc, x)),
                    np.linalg.norm(ascent.L_sigma(f, pc, x) - ascent.L1_sigma(f, pc, x)))
    return [Check("second_order_vanishes", worst < 1e-10, 1e-10 - worst)]


def prop5_angles(f=None, pc=None, sizes=(1000, 100), radius=1.0):
    f = f or fields.GaussianField(np.zeros(2), width=2.0)
    pc = np.array([1.5, 1.0]) if pc is None else pc
    res = {}
    for n in sizes:
        x = dep.sample_disk(n, radius)
        mxy, mxx = dep.symmetry_moments(x.coords)
        var = np.trace(x.P) / 2
        res[n] = (ascent.alignment_angle(f, pc, x), max(abs(mxy), abs(mxx)) / var)
    return res


def suite_prop5():
    res = prop5_angles(sizes=(2000, 1000, 100))
    a_sym, mom = res[2000]
    a_big, a_small = res[1000][0], res[100][0]
    return [
        Check("moments_vanish", mom < 1e-3, 1e-3 - mom, f"max moment / VAR = {mom:.2e} at N=2000"),
        Check("symmetric_alignment", a_sym < 0.05, 0.05 - a_sym, f"angle {a_sym:.3g} rad at N=2000"),
        Check("dense_alignment", a_big < 0.05, 0.05 - a_big, f"angle {a_big:.3g} rad at N=1000"),
        Check("sparse_worse", a_small > a_big, a_small - a_big, f"angle {a_small:.3g} rad at N=100"),
    ]


def suite_variance():
    f = fields.GaussianField(np.zeros(2), width=3.0)
    worst = 0.0
    for sx, sy in ((1.0, 0.5), (0.3, 1.2), (2.0, 1.0)):
        x = dep.grid(9, 7, sx, sy)
        pc = np.array([1.7, -2.2])
        g = f.gradient(pc)
        L1 = ascent.L1_sigma(f, pc, x)
        varx, vary = np.mean(x.coords[:, 0] ** 2), np.mean(x.coords[:, 1] ** 2)
        ratio = (L1[0] / L1[1]) / (varx / vary * g[0] / g[1])
        worst = max(worst, abs(ratio - 1))
    return [Check("variance_law", worst < 1e-6, 1e-6 - worst)]


def _line3():
    return Graph(3, [(0, 1), (1, 2)]), np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])


def static_estimator_run(g, p, eps, dt, horizon, anchor=None, sigma=None):
    """Static swarm: centroid estimator from zero (or anchored), then the
    direction estimator on exact ``x``. Returns error histories."""
    n, m = p.shape
    x = p - p.mean(axis=0)
    st = est.EstimatorState.zeros(n, m, epsilon_x=eps, epsilon_mu=eps)
    if anchor is not None:
        st = est.EstimatorState.anchored(n, m, anchor, x[anchor], epsilon_x=eps, epsilon_mu=eps)
    target = x if anchor is None else p - p[anchor]
    z = est.relative_positions(g, p)
    sum0 = st.x_hat.sum(axis=0)
    steps = int(round(horizon / dt))
    xe, drift = np.empty(steps + 1), 0.0
    xe[0] = np.max(np.linalg.norm(st.x_hat - target, axis=1))
    for k in range(steps):
        st = est.centroid_step(st, g, z, dt)
        xe[k + 1] = np.max(np.linalg.norm(st.x_hat - target, axis=1))
        drift = max(drift, np.max(np.abs(st.x_hat.sum(axis=0) - sum0)))
    sigma = np.linspace(0.5, 1.5, n) if sigma is None else sigma
    ms = est.EstimatorState(x_hat=x, mu_hat=np.zeros_like(x), mu=np.zeros_like(x), epsilon_mu=eps)
    ms = est.mu_measure(ms, sigma)
    mu_c = ms.mu.mean(axis=0)
    me = np.empty(steps + 1)
    me[0] = np.max(np.linalg.norm(ms.mu_c - mu_c, axis=1))
    for k in range(steps):
        ms = est.mu_step(ms, g, dt)
        me[k + 1] = np.max(np.linalg.norm(ms.mu_c - mu_c, axis=1))
    t = np.arange(steps + 1) * dt
    return t, xe, me, drift, st


def random_connected_graph(rng, n, p=0.3):
    while True:
        adj = np.triu(rng.random((n, n)) < p, 1)
        g = Graph.from_adjacency(adj | adj.T)
        if g.is_connected():
            return g


def suite_estimators():
    out = []
    rng = np.random.default_rng(9)
    worst_x = worst_mu = 0.0
    final = drift = 0.0
    eps = 0.5
    for gi in range(5):
        g = random_connected_graph(rng, int(rng.integers(5, 13)))
        lam2, lmax = g.spectrum.lambda2, g.spectrum.lambda_max
        for _ in range(5):
            p = rng.normal(size=(g.node_count, 2)) * 2
            dt = 0.2 * eps / lmax
            horizon = 20 * eps / lam2
            t, xe, me, dr, _ = static_estimator_run(g, p, eps, dt, horizon, sigma=rng.uniform(0.5, 2, g.node_count))
            target = lam2 / eps
            # discrete-time Euler rate, in continuous units
            rate_x = engine.fit_rate(t, xe, lo=1e-10 * xe[0], hi=1e-2 * xe[0])
            rate_mu = engine.fit_rate(t, me, lo=1e-10 * me[0], hi=1e-2 * me[0])
            worst_x = max(worst_x, abs(rate_x / target - 1))
            worst_mu = max(worst_mu, abs(rate_mu / target - 1))
            final = max(final, xe[-1], me[-1])
            drift = max(drift, dr)
    out.append(Check("centroid_rate", worst_x < 0.1, 0.1 - worst_x, f"worst rel deviation {worst_x:.3f}"))
    out.append(Check("direction_rate", worst_mu < 0.1, 0.1 - worst_mu, f"worst rel deviation {worst_mu:.3f}"))
    out.append(Check("final_error", final < 1e-6, 1e-6 - final, f"max {final:.2e}"))
    out.append(Check("sum_conservation", drift < 1e-9, 1e-9 - drift))
    g = Graph.reference()
    p = rng.normal(size=(10, 2)) * 3
    _, _, _, _, st = static_estimator_run(g, p, eps, 0.05, 40 * eps / g.spectrum.lambda2, anchor=3)
    pair = np.max(np.abs((st.x_hat[:, None] - st.x_hat[None]) - (p[:, None] - p[None])))
    anchored = np.max(np.abs(st.x_hat - (p - p[3])))
    out.append(Check("anchored_pairs", max(pair, anchored) < 1e-6, 1e-6 - max(pair, anchored)))
    return out


def suite_formation():
    rng = np.random.default_rng(10)
    g = random_connected_graph(rng, 8)
    worst = 0.0
    for _ in range(50):
        p = rng.normal(size=(8, 2))
        ps = rng.normal(size=(8, 2))
        u = control.formation_control(g, p, ps, 0.1)
        worst = max(worst, np.linalg.norm(u.sum(axis=0)))
    d = np.array([0.6, 0.8])
    vc = control.si_control(d, u).mean(axis=0)
    err = np.linalg.norm(vc - d)
    return [
        Check("centroid_invariance", worst < 1e-12, 1e-12 - worst),
        Check("centroid_velocity", err < 1e-12, 1e-12 - err),
    ]


def unicycle_checks(tr, gamma: float, slack_steps: float = 5.0):
    """Deformation, alignment window and pairwise contraction for a unicycle trace."""
    s = tr.scenario
    N, kappa, dt = s.N, s.gains.k_gamma, s.dt
    bound = dep.deformation_bound(N, kappa)
    deform = float(np.nanmax(tr.max_deformation))
    res = {"deformation": (deform <= bound, bound - deform)}
    # alignment: |delta_i| < gamma from some T until first entry into the ball
    near = tr.dist <= s.epsilon_ball
    k_star = int(np.argmax(near)) if near.any() else len(tr) - 1
    env = tr.max_abs_delta[1 : k_star + 1]
    bad = np.nonzero(~(env < gamma))[0]
    T_align = float(tr.t[1 + bad[-1] + 1]) if len(bad) else float(tr.t[1])
    res["alignment"] = (T_align < tr.t[k_star], float(tr.t[k_star] - T_align), T_align, float(tr.t[k_star]))
    # pairwise contraction from the first recorded heading errors
    delta0 = control.heading_error(tr.headings[0], tr.direction[1])
    d0 = np.abs(control.pairwise_delta(delta0))
    worst = np.inf
    for k in range(1, k_star + 1):
        dij = np.abs(control.pairwise_delta(tr.delta[k]))
        allowed = d0 * np.exp(-kappa * tr.t[k]) + slack_steps * dt
        worst = min(worst, float(np.min(allowed - dij)))
    res["pairwise"] = (worst >= 0, worst)
    return res


def moving_source_bound(tr, factor=2.0):
    s = tr.scenario
    inside = tr.dist < s.epsilon_ball
    if not inside.any():
        return False, -np.inf
    k = int(np.argmax(inside))
    worst = float(np.max(tr.dist[k:]))
    return worst <= factor * s.epsilon_ball, factor * s.epsilon_ball - worst


def deformation_gain(s, share=0.25):
    """Smallest heading gain whose deformation bound stays below ``share * D``."""
    D = dep.from_positions(s.positions).D
    return 2 * np.pi * (s.N - 1) / s.N / (share * D)


def suite_unicycle():
    s = scenario.preset("unicycle_benchmark")
    tr = engine.run(s)
    res = unicycle_checks(tr, s.gains.gamma)
    out = [
        Check("deformation_bound", bool(res["deformation"][0]), res["deformation"][1]),
        Check("alignment_window", bool(res["alignment"][0]), res["alignment"][1],
              f"aligned from t={res['alignment'][2]:.2f} to t={res['alignment'][3]:.2f}"),
        Check("pairwise_contraction", bool(res["pairwise"][0]), res["pairwise"][1]),
    ]
    moving = tr.moving & np.isfinite(tr.speed_max)
    hi = float(np.max(tr.speed_max[moving]))
    out.append(Check("unit_speed", hi <= 1 + 1e-9, 1 + 1e-9 - hi, f"max chord speed {hi:.12f}"))
    # observed turn rate of the desired direction while far from the source
    far = tr.dist > s.epsilon_ball
    dirs = tr.direction[:, 0][far & np.isfinite(tr.direction[:, 0, 0])]
    w_obs = float(np.max(control.omega_d_estimate(dirs, s.dt))) if len(dirs) > 2 else 0.0
    kf = control.kappa_floor(s.gains.gamma, w_obs, 1.0, deformation_gain(s))
    out.append(Check("gain_above_floor", s.gains.k_gamma >= kf, s.gains.k_gamma - kf, f"floor {kf:.3g}, observed Omega_d {w_obs:.3g}"))
    sm = scenario.preset("unicycle_moving_source")
    ok, margin = moving_source_bound(engine.run(sm))
    out.append(Check("moving_source_bounded", bool(ok), margin))
    return out


def suite_engine():
    s = scenario.preset("heptagon_gaussian")
    a, b = engine.run(s), engine.run(s)
    ok = a.digest() == b.digest()
    s2 = scenario.preset("heptagon_gaussian", horizon=8.0)
    h = scenario.preset("heptagon_gaussian", horizon=8.0, dt=0.005,
                        estimator={**s.spec["estimator"], "mu_substeps": 25})
    d1, d2 = engine.run(s2).dist[-1], engine.run(h).dist[-1]
    rel = abs(d1 - d2) / d1
    return [
        Check("determinism", ok),
        Check("step_halving", rel < 0.01, 0.01 - rel, f"relative change {rel:.2e}"),
    ]


SUITES = {
    "graph": suite_graph,
    "fields": suite_fields,
    "polygon": suite_polygon,
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "lemma3": suite_lemma3,
    "prop1": suite_prop1,
    "prop2": suite_prop2,
    "prop3": suite_prop3,
    "prop4": suite_prop4,
    "prop5": suite_prop5,
    "variance": suite_variance,
    "estimators": suite_estimators,
    "formation": suite_formation,
    "unicycle": suite_unicycle,
    "engine": suite_engine,
}


def thread_cap() -> int:
    raw = os.environ.get("SWARM_SEEK_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = min(4, os.cpu_count() or 1)
    return max(1, n)


def run_suites(names) -> dict:
    """Run suites (possibly in parallel); results keep the requested order."""
    names = list(names)
    with ThreadPoolExecutor(max_workers=min(thread_cap(), len(names))) as pool:
        results = list(pool.map(lambda n: SUITES[n](), names))
    return dict(zip(names, results))
