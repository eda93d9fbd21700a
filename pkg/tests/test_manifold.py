"""Geometry kernel tests against independent numerical oracles.

The hyperboloid exponential is checked against a fixed-step RK4
integration of the ambient geodesic equation, and the SPD distance
against a Schur-based matrix logarithm; closed-form identities
(roundtrips, comparison triangles, distance convexity) are exercised on
seeded random data.
"""

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from hsplit.manifold import (
    SPD,
    Euclidean,
    GeometryError,
    Hyperboloid,
    Product,
    comparison_triangle,
    dist,
    exp_map,
    geodesic_point,
    inner,
    log_map,
    norm,
    parse_manifold_tag,
    zero_vector,
)


def random_pair(m, rng, spread=2.0):
    return m.random_point(rng, spread), m.random_point(rng, spread)


# -- oracles -------------------------------------------------------------------


def rk4_hyperboloid_geodesic(x0, v0, t_end=1.0, step=1e-4):
    """Integrate the ambient geodesic equation y'' = <y',y'>_L y.

    Fourth-order fixed-step integration, independent of the closed-form
    exponential.  Returns the endpoint and the accumulated arc length.
    """

    def mink(a, b):
        return float(a @ b - 2.0 * a[0] * b[0])

    def rhs(state):
        y, dy = state
        return np.array([dy, mink(dy, dy) * y])

    state = np.array([x0, v0])
    n_steps = int(round(t_end / step))
    arc = 0.0
    for _ in range(n_steps):
        arc += math.sqrt(max(mink(state[1], state[1]), 0.0)) * step
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * step * k1)
        k3 = rhs(state + 0.5 * step * k2)
        k4 = rhs(state + step * k3)
        state = state + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return state[0], arc


def spd_distance_oracle(a, b):
    """Affine-invariant distance via Schur-based sqrtm/logm."""
    isq = np.linalg.inv(scipy.linalg.sqrtm(a))
    return float(np.linalg.norm(scipy.linalg.logm(isq @ b @ isq), "fro"))


# -- exp_map --------------------------------------------------------------------


def test_exp_euclidean_is_translation():
    m = Euclidean(2)
    x = m.point([0.0, 0.0])
    v = m.tangent(x, [3.0, 4.0])
    assert np.allclose(exp_map(x, v).coords, [3.0, 4.0])


def test_exp_zero_vector_identity():
    m = Hyperboloid(2)
    x = m.point([1.0, 0.0, 0.0])
    y = exp_map(x, zero_vector(x))
    assert dist(x, y) == 0.0


def test_exp_hyperboloid_matches_rk4_oracle(rng):
    m = Hyperboloid(2)
    x = m.point([1.0, 0.0, 0.0])
    v = m.tangent(x, [0.0, 1.0, 0.0])
    endpoint, arc = rk4_hyperboloid_geodesic(x.coords, v.components)
    got = exp_map(x, v)
    assert np.max(np.abs(got.coords - endpoint)) < 1e-6
    assert abs(arc - 1.0) < 1e-6
    for _ in range(5):
        x = m.random_point(rng, 1.5)
        v = m.random_tangent(rng, x, 2.0 * rng.uniform())
        endpoint, arc = rk4_hyperboloid_geodesic(x.coords, v.components)
        got = exp_map(x, v)
        assert np.max(np.abs(got.coords - endpoint)) < 1e-6
        assert abs(arc - norm(v)) < 1e-6


def test_exp_distance_equals_speed(manifold, rng):
    for _ in range(30):
        x = manifold.random_point(rng, 2.0)
        v = manifold.random_tangent(rng, x, 3.0 * rng.uniform())
        assert abs(dist(x, exp_map(x, v)) - norm(v)) < 1e-9


def test_exp_base_mismatch_rejected(rng):
    m = Hyperboloid(2)
    x, y = random_pair(m, rng)
    v = m.random_tangent(rng, x, 1.0)
    with pytest.raises(GeometryError):
        exp_map(y, v)


def test_exp_nonfinite_rejected():
    m = Euclidean(2)
    x = m.point([0.0, 0.0])
    with pytest.raises(GeometryError):
        m.tangent(x, [np.inf, 0.0])


# -- log_map --------------------------------------------------------------------


def test_log_euclidean_is_subtraction():
    m = Euclidean(3)
    x, y = m.point([1.0, 1.0, 1.0]), m.point([2.0, 0.0, 1.0])
    assert np.allclose(log_map(x, y).components, [1.0, -1.0, 0.0])


def test_log_self_is_zero(manifold, rng):
    x = manifold.random_point(rng, 2.0)
    assert norm(log_map(x, x)) == 0.0


def test_log_roundtrip_hyperboloid(rng):
    m = Hyperboloid(2)
    for _ in range(200):
        x = m.random_point(rng, 2.5)
        y = exp_map(x, m.random_tangent(rng, x, 5.0 * rng.uniform()))
        assert dist(exp_map(x, log_map(x, y)), y) < 1e-8


def test_log_norm_equals_distance(manifold, rng):
    for _ in range(50):
        x, y = random_pair(manifold, rng, 3.0)
        assert abs(norm(log_map(x, y)) - dist(x, y)) < 1e-9


def test_log_manifold_mismatch_rejected():
    with pytest.raises(GeometryError):
        log_map(Euclidean(2).point([0, 0]), Euclidean(3).point([0, 0, 0]))


# -- dist -----------------------------------------------------------------------


def test_dist_euclidean_norm():
    m = Euclidean(2)
    assert dist(m.point([1.0, 2.0]), m.point([4.0, 6.0])) == 5.0


def test_dist_hyperboloid_unit():
    m = Hyperboloid(2)
    x = m.point([1.0, 0.0, 0.0])
    y = m.point([math.cosh(1.0), math.sinh(1.0), 0.0])
    assert abs(dist(x, y) - 1.0) < 1e-12
    # arc length of the integrated geodesic agrees
    _, arc = rk4_hyperboloid_geodesic(x.coords, log_map(x, y).components)
    assert abs(arc - dist(x, y)) < 1e-6


def test_dist_spd_against_logm_oracle(rng):
    m = SPD(2)
    x = m.point(np.eye(2).ravel())
    y = m.point(np.diag([math.e, math.e]).ravel())
    assert abs(dist(x, y) - math.sqrt(2.0)) < 1e-12
    for _ in range(25):
        a, b = random_pair(m, rng, 2.0)
        oracle = spd_distance_oracle(a.coords.reshape(2, 2), b.coords.reshape(2, 2))
        assert abs(dist(a, b) - oracle) < 1e-9


def test_dist_symmetry_and_triangle(manifold, rng):
    for _ in range(40):
        x, y = random_pair(manifold, rng, 3.0)
        z = manifold.random_point(rng, 3.0)
        assert abs(dist(x, y) - dist(y, x)) < 1e-12
        assert dist(x, y) <= dist(x, z) + dist(z, y) + 1e-9
    x = manifold.random_point(rng, 2.0)
    assert dist(x, x) == 0.0


# -- inner ----------------------------------------------------------------------


def test_inner_euclidean_dot():
    m = Euclidean(3)
    x = m.point([0.0, 0.0, 0.0])
    u = m.tangent(x, [1.0, 2.0, 3.0])
    v = m.tangent(x, [4.0, -5.0, 6.0])
    assert inner(u, v) == 1.0 * 4 - 2 * 5 + 3 * 6


def test_inner_hyperboloid_positive_definite(rng):
    m = Hyperboloid(2)
    for _ in range(100):
        x = m.random_point(rng, 3.0)
        v = m.random_tangent(rng, x, 1.0 + rng.uniform())
        assert inner(v, v) > 0.0


def test_inner_spd_trace_symmetry(rng):
    m = SPD(2)
    for _ in range(50):
        p = m.random_point(rng, 2.0)
        u = m.random_tangent(rng, p, 1.0)
        v = m.random_tangent(rng, p, 1.0)
        assert abs(inner(u, v) - inner(v, u)) < 1e-12


def test_inner_cauchy_schwarz(manifold, rng):
    for _ in range(50):
        x = manifold.random_point(rng, 2.0)
        u = manifold.random_tangent(rng, x, 2.0 * rng.uniform())
        v = manifold.random_tangent(rng, x, 2.0 * rng.uniform())
        assert abs(inner(u, v)) <= norm(u) * norm(v) + 1e-12


def test_inner_base_mismatch_rejected(rng):
    m = Euclidean(2)
    x, y = m.point([0.0, 0.0]), m.point([1.0, 0.0])
    with pytest.raises(GeometryError):
        inner(m.tangent(x, [1.0, 0.0]), m.tangent(y, [1.0, 0.0]))


# -- geodesic_point ---------------------------------------------------------------


def test_geodesic_endpoints(manifold, rng):
    x, y = random_pair(manifold, rng)
    assert dist(geodesic_point(x, y, 0.0), x) == 0.0
    assert dist(geodesic_point(x, y, 1.0), y) == 0.0


def test_geodesic_euclidean_midpoint():
    m = Euclidean(2)
    mid = geodesic_point(m.point([0.0, 0.0]), m.point([2.0, 4.0]), 0.5)
    assert np.allclose(mid.coords, [1.0, 2.0])


def test_geodesic_distance_scaling(manifold, rng):
    for _ in range(20):
        x, y = random_pair(manifold, rng, 3.0)
        t = float(rng.uniform())
        assert abs(dist(x, geodesic_point(x, y, t)) - t * dist(x, y)) < 1e-9


def test_geodesic_additive_along_curve(rng):
    m = Hyperboloid(2)
    for _ in range(50):
        x, y = random_pair(m, rng, 3.0)
        t = float(rng.uniform())
        mid = geodesic_point(x, y, t)
        assert abs(dist(x, mid) + dist(mid, y) - dist(x, y)) < 1e-8


def test_geodesic_parameter_out_of_range(rng):
    m = Euclidean(2)
    x, y = random_pair(m, rng)
    with pytest.raises(GeometryError):
        geodesic_point(x, y, 1.5)
    with pytest.raises(GeometryError):
        geodesic_point(x, y, -0.1)


# -- comparison triangles ----------------------------------------------------------


def test_comparison_triangle_flat_residuals_zero(rng):
    m = Euclidean(3)
    for _ in range(50):
        pts = [m.random_point(rng, 3.0) for _ in range(3)]
        rep = comparison_triangle(*pts)
        assert np.max(np.abs(rep.cosine_law_residuals)) < 1e-12


def test_comparison_triangle_hyperboloid_cat0(rng):
    m = Hyperboloid(2)
    for _ in range(1000):
        c = m.random_point(rng, 1.5)
        pts = [exp_map(c, m.random_tangent(rng, c, 1.5 * rng.uniform())) for _ in range(3)]
        rep = comparison_triangle(*pts)
        assert rep.cosine_law_residuals.min() >= -1e-9
        # planar triangle realizes the same side lengths
        planar = rep.comparison_vertices
        for i in range(3):
            j = (i + 1) % 3
            assert abs(np.linalg.norm(planar[j] - planar[i]) - rep.side_lengths[i]) < 1e-9
        sides = rep.side_lengths
        for i in range(3):
            assert sides[i] <= sides[(i + 1) % 3] + sides[(i + 2) % 3] + 1e-9


def test_comparison_triangle_degenerate_collinear(rng):
    m = Hyperboloid(2)
    for _ in range(50):
        x, y = random_pair(m, rng, 2.0)
        z = geodesic_point(x, y, float(rng.uniform()))
        rep = comparison_triangle(x, y, z)
        assert abs(rep.cosine_law_residuals[0]) < 1e-8


def test_law_of_cosines_inequality_all_rotations(rng):
    for m in (Hyperboloid(2), SPD(2)):
        for _ in range(200):
            c = m.random_point(rng, 1.5)
            p = [exp_map(c, m.random_tangent(rng, c, 1.5 * rng.uniform())) for _ in range(3)]
            for i in range(3):
                j, k = (i + 1) % 3, (i + 2) % 3
                lhs = (
                    dist(p[i], p[j]) ** 2
                    + dist(p[j], p[k]) ** 2
                    - 2.0 * inner(log_map(p[j], p[i]), log_map(p[j], p[k]))
                )
                assert lhs <= dist(p[k], p[i]) ** 2 + 1e-9


# -- invariants ---------------------------------------------------------------------


def test_roundtrip_invariant(manifold, rng):
    for _ in range(200):
        x, y = random_pair(manifold, rng, 5.0)
        assert dist(exp_map(x, log_map(x, y)), y) <= 1e-8


def test_distance_convexity(manifold, rng):
    ts = np.linspace(0.0, 1.0, 21)
    for _ in range(30):
        a, b = random_pair(manifold, rng, 3.0)
        c, d = random_pair(manifold, rng, 3.0)
        d0, d1 = dist(a, c), dist(b, d)
        for t in ts:
            g = dist(geodesic_point(a, b, float(t)), geodesic_point(c, d, float(t)))
            assert g <= (1 - t) * d0 + t * d1 + 1e-9


def test_hyperboloid_constraint_preserved_over_chain(rng):
    m = Hyperboloid(2)
    x, y = random_pair(m, rng, 1.0)
    ops = 0
    while ops < 10_000:
        v = log_map(x, y)
        x2 = exp_map(x, 0.3 * v)
        mid = geodesic_point(x2, y, 0.5)
        x, y = mid, x
        ops += 3
        assert abs(m.minkowski(x.coords, x.coords) + 1.0) <= 1e-8


def test_product_structure(rng):
    prod = Product((Euclidean(2), Hyperboloid(2), SPD(2)))
    for _ in range(50):
        x, y = random_pair(prod, rng, 2.0)
        parts = list(zip(prod.split_point(x), prod.split_point(y)))
        assert abs(sum(dist(a, b) ** 2 for a, b in parts) - dist(x, y) ** 2) < 1e-10
        stitched = np.concatenate([log_map(a, b).components for a, b in parts])
        assert np.array_equal(log_map(x, y).components, stitched)
    rebuilt = prod.join_points(prod.split_point(x))
    assert dist(rebuilt, x) == 0.0


def test_tangent_basis_orthonormal(manifold, rng):
    x = manifold.random_point(rng, 1.5)
    basis = manifold.tangent_basis(x)
    assert len(basis) == manifold.manifold_dim
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            expected = 1.0 if i == j else 0.0
            assert abs(inner(u, v) - expected) < 1e-9


# -- validation and serialization -----------------------------------------------------


def test_invalid_hyperboloid_point_rejected():
    m = Hyperboloid(2)
    with pytest.raises(GeometryError):
        m.point([0.5, 0.0, 0.0])  # <x,x>_L > -1
    with pytest.raises(GeometryError):
        m.point([-1.0, 0.0, 0.0])  # lower sheet
    projected = m.point([2.0, 0.3, -0.1], project=True)
    assert abs(m.minkowski(projected.coords, projected.coords) + 1.0) < 1e-12


def test_invalid_spd_point_rejected():
    m = SPD(2)
    with pytest.raises(GeometryError):
        m.point([1.0, 0.5, -0.5, 1.0])  # not symmetric
    with pytest.raises(GeometryError):
        m.point([1.0, 2.0, 2.0, 1.0])  # indefinite
    with pytest.raises(GeometryError):
        m.tangent(m.base_point(), [0.0, 1.0, -1.0, 0.0])  # skew tangent


def test_descriptor_invariants():
    with pytest.raises(GeometryError):
        Euclidean(0)
    with pytest.raises(GeometryError):
        Hyperboloid(0)
    with pytest.raises(GeometryError):
        SPD(0)
    with pytest.raises(GeometryError):
        Product((Euclidean(2),))


def test_manifold_tags_roundtrip():
    instances = [
        Euclidean(4),
        Hyperboloid(3),
        SPD(2),
        Product((Euclidean(1), Product((Hyperboloid(2), SPD(2))))),
    ]
    for m in instances:
        assert parse_manifold_tag(m.tag) == m
    with pytest.raises(GeometryError):
        parse_manifold_tag("sphere:2")


# -- hypothesis properties -------------------------------------------------------------


coords = st.lists(
    st.floats(min_value=-50.0, max_value=50.0, allow_nan=False), min_size=3, max_size=3
)


@settings(max_examples=200, deadline=None, derandomize=True)
@given(coords, coords)
def test_euclidean_roundtrip_property(a, b):
    m = Euclidean(3)
    x, y = m.point(a), m.point(b)
    assert dist(exp_map(x, log_map(x, y)), y) <= 1e-9 * max(1.0, dist(x, y))


@settings(max_examples=200, deadline=None, derandomize=True)
@given(coords, coords, st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_euclidean_geodesic_interpolates_property(a, b, t):
    m = Euclidean(3)
    x, y = m.point(a), m.point(b)
    g = geodesic_point(x, y, t)
    assert abs(dist(x, g) - t * dist(x, y)) <= 1e-9 * max(1.0, dist(x, y))
