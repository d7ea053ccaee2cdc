import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swarm_seek import ascent, deployment as dep, estimators as est
from swarm_seek.errors import StabilityError
from swarm_seek.fields import GaussianField
from swarm_seek.graph import Graph
from swarm_seek.validation import random_connected_graph, static_estimator_run

LINE = Graph(3, [(0, 1), (1, 2)])
P_LINE = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])


def run_centroid(st_, g, p, dt, horizon):
    z = est.relative_positions(g, p)
    for _ in range(int(round(horizon / dt))):
        st_ = est.centroid_step(st_, g, z, dt)
    return st_


def test_line_converges_to_centred_offsets():
    lam2 = LINE.spectrum.lambda2
    st_ = run_centroid(est.EstimatorState.zeros(3, 2, epsilon_x=1.0), LINE, P_LINE, 0.01, 20 / lam2)
    np.testing.assert_allclose(st_.x_hat, [[-1, 0], [0, 0], [1, 0]], atol=1e-6)


def test_exact_estimate_is_fixed_point():
    x = P_LINE - P_LINE.mean(0)
    st_ = est.EstimatorState(x_hat=x, mu_hat=np.zeros_like(x), mu=np.zeros_like(x))
    nxt = est.centroid_step(st_, LINE, est.relative_positions(LINE, P_LINE), 0.1)
    assert np.max(np.abs(nxt.x_hat - x)) < 1e-12


def test_rate_matches_connectivity():
    lam2 = LINE.spectrum.lambda2
    t, xe, me, drift, _ = static_estimator_run(LINE, P_LINE, 0.5, 0.01, 20 * 0.5 / lam2)
    from swarm_seek.engine import fit_rate

    assert fit_rate(t, xe, 1e-10 * xe[0], 1e-2 * xe[0]) == pytest.approx(lam2 / 0.5, rel=0.1)
    assert fit_rate(t, me, 1e-10 * me[0], 1e-2 * me[0]) == pytest.approx(lam2 / 0.5, rel=0.1)
    assert drift < 1e-12


def test_anchored_examples():
    lam2 = LINE.spectrum.lambda2
    z = P_LINE - P_LINE.mean(0)
    st_ = est.EstimatorState.anchored(3, 2, 0, z[0], epsilon_x=1.0)
    st_ = run_centroid(st_, LINE, P_LINE, 0.01, 30 / lam2)
    np.testing.assert_allclose(st_.x_hat, [[0, 0], [1, 0], [2, 0]], atol=1e-6)
    # anchoring on the robot that sits at the centroid reproduces centroid mode
    mid = est.EstimatorState.anchored(3, 2, 1, z[1], epsilon_x=1.0)
    plain = est.EstimatorState.zeros(3, 2, epsilon_x=1.0)
    np.testing.assert_array_equal(mid.x_hat, plain.x_hat)
    with pytest.raises(IndexError):
        est.centroid_step_anchored(st_, LINE, est.relative_positions(LINE, P_LINE), 0.01, 5)


def test_anchored_pairs_on_reference_graph(rng):
    g = Graph.reference()
    p = rng.normal(size=(10, 2)) * 3
    *_, st_ = static_estimator_run(g, p, 0.5, 0.05, 40 * 0.5 / g.spectrum.lambda2, anchor=6)
    pair = (st_.x_hat[:, None] - st_.x_hat[None]) - (p[:, None] - p[None])
    assert np.max(np.abs(pair)) < 1e-6
    assert np.linalg.norm(st_.x_hat[6]) < 1e-6


def test_mu_measure_examples(rng):
    st_ = est.EstimatorState.zeros(4, 2)
    assert np.all(est.mu_measure(st_, [1, 2, 3, 4]).mu == 0)
    x = dep.regular_polygon(4, 1.0).coords
    exact = est.EstimatorState(x_hat=x, mu_hat=np.zeros_like(x), mu=np.zeros_like(x))
    assert np.allclose(est.mu_measure(exact, np.full(4, 2.5)).mu.mean(0), 0)


def test_mu_step_uniform_is_fixed_point():
    mu = np.tile([0.3, -0.2], (3, 1))
    st_ = est.EstimatorState(x_hat=np.zeros((3, 2)), mu_hat=np.zeros((3, 2)), mu=mu)
    nxt = est.mu_step(st_, LINE, 0.0001)
    np.testing.assert_array_equal(nxt.mu_c, mu)


def test_mu_consensus_on_reference_graph(rng):
    g = Graph.reference()
    mu = rng.normal(size=(10, 2))
    st_ = est.EstimatorState(x_hat=np.zeros((10, 2)), mu_hat=np.zeros((10, 2)), mu=mu, epsilon_mu=0.01)
    prop = est.EulerPropagator(g, 0.001, 0.01)
    v = st_.mu_hat
    for _ in range(int(20 * 0.01 / g.spectrum.lambda2 / 0.001) + 1):
        v = prop(v, g.laplacian @ mu)
    np.testing.assert_allclose(mu - v, np.tile(mu.mean(0), (10, 1)), atol=1e-6)


def test_reset_consensus_examples(rng):
    same = np.tile([1.0, 2.0], (4, 1))
    np.testing.assert_allclose(est.reset_consensus(same, Graph(4, [(0, 1), (1, 2), (2, 3)]), 0.1, 5), same)
    two = est.reset_consensus([[1.0, -2.0], [-1.0, 2.0]], Graph(2, [(0, 1)]), 0.1, 20)
    assert np.max(np.abs(two)) < 1e-10
    g = Graph.reference()
    mu0 = rng.normal(size=(10, 3))
    out = est.reset_consensus(mu0, g, 0.05, 30 / g.spectrum.lambda2)
    np.testing.assert_allclose(out, np.tile(mu0.mean(0), (10, 1)), atol=1e-8)


def test_direction_hold_and_threshold():
    st_ = est.EstimatorState.zeros(2, 2)
    d = est.direction(st_, 0, 1e-9)
    assert d.hold and not d.valid
    good = est.EstimatorState(x_hat=np.zeros((2, 2)), mu_hat=np.zeros((2, 2)), mu=np.array([[3.0, 4.0], [0, 0]]),
                              last_direction=np.zeros((2, 2)), has_direction=np.zeros(2, bool))
    good, unit, valid = est.update_directions(good, 1e-9)
    np.testing.assert_allclose(unit[0], [0.6, 0.8])
    assert valid.tolist() == [True, False]
    tiny = est.EstimatorState(x_hat=good.x_hat, mu_hat=good.mu_hat, mu=np.array([[1e-12, 0.0], [0, 0]]),
                              last_direction=good.last_direction, has_direction=good.has_direction)
    d = est.direction(tiny, 0, 1e-9)
    assert not d.valid and not d.hold
    np.testing.assert_allclose(d.unit_direction, [0.6, 0.8])
    _, unit, valid = est.update_directions(tiny, 1e-9)
    assert not valid[0]
    np.testing.assert_allclose(unit[0], [0.6, 0.8])


def test_consensus_direction_matches_readings_direction():
    f = GaussianField(np.zeros(2), width=2.0)
    x = dep.sample_disk(12, 0.5, method="random", seed=4)
    pc = np.array([2.0, 1.5])
    g = Graph.proximity(x.positions(pc), 0.6)
    assert g.is_connected()
    sigma = f.value(x.positions(pc))
    st_ = est.mu_measure(est.EstimatorState(x_hat=x.coords, mu_hat=np.zeros_like(x.coords), mu=np.zeros_like(x.coords),
                                            epsilon_mu=0.01), sigma)
    prop = est.EulerPropagator(g, 0.01, 0.01, substeps=10)
    v = st_.mu_hat
    for _ in range(int(40 * 0.01 / g.spectrum.lambda2 / 0.01) + 1):
        v = prop(v, g.laplacian @ st_.mu)
    final = est.EstimatorState(x_hat=st_.x_hat, mu_hat=v, mu=st_.mu)
    L = ascent.L_sigma(f, pc, x)
    for i in range(x.N):
        assert ascent.angle_between(est.direction(final, i, 1e-9).unit_direction, L) < 1e-6


def test_stability_guard():
    g = Graph.reference()
    lmax = g.spectrum.lambda_max
    with pytest.raises(StabilityError, match="dt\\*lambda_max/eps"):
        est.check_step(g, 2.0 * 0.5 / lmax, 0.5)
    assert est.check_step(g, 1.9 * 0.5 / lmax, 0.5) < 2
    with pytest.raises(StabilityError):
        est.mu_step(est.EstimatorState.zeros(10, 2), g, 0.01)
    # substeps bring the same outer step under the guard
    est.EulerPropagator(g, 0.01, 0.001, substeps=30)


def test_propagator_equals_loop(rng):
    g = random_connected_graph(rng, 7)
    v = rng.normal(size=(7, 2))
    f = rng.normal(size=(7, 2))
    prop = est.EulerPropagator(g, 0.1, 0.5, substeps=4)
    w = v.copy()
    for _ in range(4):
        w = w + (0.025 / 0.5) * (f - g.laplacian @ w)
    np.testing.assert_allclose(prop(v, f), w, atol=1e-13)
    with pytest.raises(ValueError):
        est.EulerPropagator(g, 0.1, 0.5, substeps=0)


def test_warm_start_time():
    assert est.warm_start_time(0.5, 0.001, 0.25) == pytest.approx(20.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 12))
def test_centroid_sum_conserved(seed, n):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, n, 0.4)
    p = rng.normal(size=(n, 2)) * 5
    st_ = est.EstimatorState(x_hat=rng.normal(size=(n, 2)), mu_hat=np.zeros((n, 2)), mu=np.zeros((n, 2)))
    s0 = st_.x_hat.sum(0)
    z = est.relative_positions(g, p)
    dt = 0.5 * 0.5 / g.spectrum.lambda_max
    for _ in range(10_000 if seed % 5 == 0 else 1000):
        st_ = est.centroid_step(st_, g, z, dt)
    assert np.max(np.abs(st_.x_hat.sum(0) - s0)) < 1e-9
