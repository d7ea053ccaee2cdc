import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swarm_seek import ascent, deployment as dep
from swarm_seek.ascent import AscentError
from swarm_seek.deployment import DeploymentError
from swarm_seek.fields import GaussianField, QuadraticField
from swarm_seek.validation import FAMILIES, random_centroid, random_deployment, random_field

G = GaussianField(np.zeros(2), width=1.5)
Q = QuadraticField(np.array([1.0, -1.0]), c=30.0, Q=np.array([[2.0, 0.5], [0.5, 1.0]]))


def manual_L(f, pc, coords):
    # oracle: direct loop over robots
    D = max(np.linalg.norm(c) for c in coords)
    return sum(f.value(pc + c) * c for c in coords) / (len(coords) * D**2)


def test_L_matches_loop(rng):
    x = random_deployment(rng)
    pc = np.array([1.2, 0.3])
    np.testing.assert_allclose(ascent.L_sigma(G, pc, x), manual_L(G, pc, x.coords), rtol=1e-12)
    readings = G.value(x.positions(pc))
    np.testing.assert_allclose(ascent.L_sigma_from_readings(readings, x.coords), ascent.L_sigma(G, pc, x))


def test_symmetric_at_source_is_zero():
    assert np.linalg.norm(ascent.L_sigma(G, G.source, dep.regular_polygon(6, 0.5))) < 1e-10


def test_zero_spread_errors():
    x = dep.Deployment(np.zeros((3, 2)))
    for fn in (ascent.L_sigma, ascent.L1_sigma, ascent.L2_sigma):
        with pytest.raises(AscentError):
            fn(G, np.ones(2), x)
    with pytest.raises(AscentError):
        ascent.L_sigma_from_readings([1.0, 2.0], np.zeros((2, 2)))


def test_heptagon_ascends_at_distance_two():
    x = dep.regular_polygon(7, 0.75)
    pc = np.array([2.0, 0.0])
    f = GaussianField(np.zeros(2))
    assert f.gradient(pc) @ ascent.L_sigma(f, pc, x) > 0


def test_L1_examples():
    assert np.linalg.norm(ascent.L1_sigma(G, G.source, dep.regular_polygon(5))) == 0
    x = dep.Deployment([[1.0, 0.0], [-1.0, 0.0]])
    pc = np.array([0.4, 0.9])
    g = G.gradient(pc)
    np.testing.assert_allclose(ascent.L1_sigma(G, pc, x), [g[0], 0.0])
    # polygon with D = rho gives half the gradient
    np.testing.assert_allclose(ascent.L1_sigma(G, pc, dep.regular_polygon(9, 0.3)), g / 2, rtol=1e-12)


def test_L2_vanishes_for_symmetric_shapes(rng):
    pc = np.array([0.7, -1.1])
    for N in range(4, 13):
        assert np.linalg.norm(ascent.L2_sigma(G, pc, dep.regular_polygon(N, 0.4, rng.uniform(0, 6)))) < 1e-10
    # cubic moments of an N-gon cancel unless N divides 3, so the triangle keeps a term
    assert np.linalg.norm(ascent.L2_sigma(G, pc, dep.regular_polygon(3, 0.4))) > 1e-3
    half = rng.normal(size=(4, 2))
    assert np.linalg.norm(ascent.L2_sigma(G, pc, dep.Deployment(np.vstack([half, -half])))) < 1e-12


def test_quadratic_taylor_is_exact():
    x = dep.from_positions([[0.0, 0.0], [1.3, 0.1], [-0.2, 0.8]])
    pc = np.array([2.0, 1.0])
    r = ascent.decompose(Q, pc, x)
    assert np.linalg.norm(r.L - r.L1 - r.L2) < 1e-10
    sym = dep.Deployment(np.vstack([x.coords, -x.coords]))
    np.testing.assert_allclose(ascent.L_sigma(Q, pc, sym), ascent.L1_sigma(Q, pc, sym), atol=1e-12)
    lhs, rhs, ok = ascent.divergence_bound_check(Q, pc, sym)
    assert lhs < 1e-12 and ok


@pytest.mark.parametrize("D", [0.1, 0.5, 1.0])
def test_divergence_bound_gaussian(rng, D):
    for _ in range(100):
        x = random_deployment(rng)
        x = dep.affine_transform(x, D / x.D * np.eye(2))
        assert ascent.divergence_bound_check(G, random_centroid(rng, G), x)[2]


def test_divergence_shrinks_with_spread(rng):
    shapes = [random_deployment(rng) for _ in range(50)]
    pcs = [random_centroid(rng, G) for _ in range(50)]

    def envelope(D):
        return max(ascent.divergence_bound_check(G, pc, dep.affine_transform(x, D / x.D * np.eye(2)))[0]
                   for x, pc in zip(shapes, pcs))

    assert envelope(0.25) <= envelope(0.5) / 2


def test_rayleigh_examples():
    x = dep.regular_polygon(8, 0.6)
    pc = np.array([1.0, 0.5])
    assert ascent.rayleigh_quotient(G, pc, x) == pytest.approx(0.5, rel=1e-12)
    assert ascent.rayleigh_bounds_check(G, pc, x)
    stretched = dep.affine_transform(dep.regular_polygon(8, 1.0), np.diag([2.0, 1.0]))
    s = dep.stats(stretched)
    on_axis = np.array([-1.5, 0.0])  # gradient along e1
    assert ascent.rayleigh_quotient(G, on_axis, stretched) == pytest.approx(s.lambda_max / s.D**2, rel=1e-12)
    with pytest.raises(DeploymentError):
        ascent.rayleigh_bounds_check(G, pc, dep.from_positions([[0.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(AscentError):
        ascent.rayleigh_quotient(G, G.source, x)


def test_alignment_examples():
    pc = np.array([1.0, 2.0])
    assert ascent.alignment_angle(G, pc, dep.regular_polygon(11, 0.2)) < 1e-9
    U, _ = np.linalg.qr(np.array([[1.0, 2.0], [-0.5, 1.0]]))
    A = U @ np.diag([1.0, 0.1])
    x = dep.affine_transform(dep.regular_polygon(6), A)
    target = ascent.stretched_gradient_direction(A, G.gradient(pc))
    assert ascent.alignment_angle(G, pc, x, target) < 1e-9
    assert ascent.alignment_angle(G, pc, x) > ascent.alignment_angle(G, pc, dep.affine_transform(dep.regular_polygon(6), U @ np.diag([1.0, 0.5])))
    with pytest.raises(AscentError):
        ascent.alignment_angle(G, G.source, x)


def test_angle_between():
    assert ascent.angle_between([1, 0], [0, 2]) == pytest.approx(np.pi / 2)
    assert ascent.angle_between([1, 0], [-1, 0]) == pytest.approx(np.pi)
    assert ascent.angle_between([1, 0, 0], [1, 1, 0]) == pytest.approx(np.pi / 4)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=200, deadline=None)
@given(seeds, st.sampled_from(FAMILIES))
def test_first_order_term_always_ascends(seed, kind):
    rng = np.random.default_rng(seed)
    f = random_field(rng, kind)
    x = random_deployment(rng, 5 if kind == "benchmark" else 1)
    pc = random_centroid(rng, f)
    s = dep.stats(x)
    g = f.gradient(pc)
    assert g @ ascent.L1_sigma(f, pc, x) > 1e-12 * (g @ g) * s.lambda_min / s.D**2
    assert ascent.rayleigh_bounds_check(f, pc, x)


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from(FAMILIES), st.sampled_from([0.1, 0.5, 1.0]))
def test_divergence_bound_property(seed, kind, scale):
    rng = np.random.default_rng(seed)
    f = random_field(rng, kind)
    x = random_deployment(rng, scale * (5 if kind == "benchmark" else 1))
    assert ascent.divergence_bound_check(f, random_centroid(rng, f), x)[2]


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_l1_forms_agree(seed):
    rng = np.random.default_rng(seed)
    x = random_deployment(rng)
    pc = rng.normal(size=2) * 3
    g = G.gradient(pc)
    np.testing.assert_allclose(ascent.L1_sigma(G, pc, x), x.P @ g / x.D**2, rtol=1e-10, atol=1e-14)
