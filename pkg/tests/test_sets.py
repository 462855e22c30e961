import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellipsotope.containment import containment_radius
from ellipsotope.norms import INF, holder_conjugate, vector_norm
from ellipsotope.oracles import radius_bruteforce_zonotope_inbody
from ellipsotope.sets import (DimensionError, Ellipsotope, HPolyhedron, center_reduction, ellipsoid,
                              ellipsotope_norm, merge_parallel_generators, rank_and_projection,
                              support_function, unit_ball_zonotope, zonotope, zonotope_facets,
                              zonotope_gauge, zonotope_in_polyhedron)

P_VALUES = [1, 1.5, 2, 3, INF]


def _unit_vector(rng, m, p):
    a = rng.standard_normal(m)
    return a / vector_norm(a, p) * rng.uniform(0, 1)


def test_constructor_checks():
    with pytest.raises(DimensionError):
        Ellipsotope(2, np.eye(2), [0, 0, 0])
    with pytest.raises(DimensionError):
        Ellipsotope(2, np.zeros((2, 0)))
    with pytest.raises(ValueError):
        Ellipsotope(2, [[np.nan]])
    with pytest.raises(ValueError):
        Ellipsotope(0.5, np.eye(2))
    E = Ellipsotope("inf", [1.0, 2.0])
    assert E.G.shape == (2, 1) and E.is_zonotope and not E.is_nondegenerate


def test_ellipsotope_norm_examples():
    assert ellipsotope_norm(np.eye(2), 2, [3, 4]) == pytest.approx(5)
    assert ellipsotope_norm(np.eye(2), INF, [3, 4]) == pytest.approx(4)
    assert ellipsotope_norm([[1, 1], [1, -1]], INF, [2, 0]) == pytest.approx(1)
    assert ellipsotope_norm([[1], [0]], 2, [0, 1]) == INF


def test_ellipsotope_norm_needs_program_for_odd_exponent():
    G = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    x = np.array([1.0, 2.0])
    v = ellipsotope_norm(G, 3, x)
    # a feasible alpha bounds the norm from above
    assert v <= vector_norm([0.0, 1.0, 1.0], 3) + 1e-7
    assert v > 0


def test_contains_point_examples():
    assert ellipsoid(np.eye(2)).contains_point([1, 0], tol=0)
    assert not ellipsoid(np.eye(2)).contains_point([1.1, 0], tol=0)
    assert zonotope([[1, 1], [1, -1]]).contains_point([2, 0], tol=0)
    assert not ellipsoid([[1], [0]]).contains_point([0, 1])


def test_rank_and_projection_examples():
    rep = rank_and_projection([[1, 0], [0, 0]])
    assert rep.rank == 1
    assert np.allclose(np.abs(rep.projector), [[1, 0]])
    rep = rank_and_projection(np.eye(3))
    assert rep.rank == 3 and np.allclose(rep.projector @ rep.projector.T, np.eye(3))
    assert rank_and_projection([[1, 1], [1, 1]]).rank == 1
    with pytest.raises(ValueError):
        rank_and_projection(np.eye(2), rel_tol=0)


def test_support_function_examples():
    assert support_function(ellipsoid(np.eye(2)), [1, 0]) == pytest.approx(1)
    assert support_function(zonotope(np.eye(2), [1, 1]), [1, 1]) == pytest.approx(4)
    G = np.array([[1.0, -2.0, 0.5], [0.0, 1.0, 3.0]])
    ell = np.array([0.3, -0.7])
    assert support_function(Ellipsotope(1, G), ell) == pytest.approx(np.abs(G.T @ ell).max())


def test_zonotope_in_polyhedron_examples():
    Z = zonotope(np.eye(2))
    assert np.allclose(zonotope_in_polyhedron(Z, HPolyhedron.box([-2, -2], [2, 2])), 1)
    assert np.allclose(zonotope_in_polyhedron(Z, HPolyhedron.box([-1, -1], [1, 1])), 0)
    margins = zonotope_in_polyhedron(zonotope(np.eye(2), [3, 0]), HPolyhedron.box([-1, -1], [1, 1]))
    assert margins[0] < 0
    with pytest.raises(DimensionError):
        zonotope_in_polyhedron(Z, HPolyhedron.box([-1], [1]))
    with pytest.raises(ValueError):
        zonotope_in_polyhedron(ellipsoid(np.eye(2)), HPolyhedron.box([-1, -1], [1, 1]))


def test_center_reduction_examples():
    G = np.eye(2)
    assert np.array_equal(center_reduction(G, [1, 0], [0, 0]), [[1, 0, 1], [0, 1, 0]])
    assert np.array_equal(center_reduction(G, [2, 3], [2, 3])[:, 2], [0, 0])


def test_center_reduction_preserves_bruteforce_radius(rng):
    for _ in range(50):
        n, m = rng.integers(1, 4), rng.integers(1, 6)
        G = rng.standard_normal((n, m))
        c, d = rng.standard_normal(n), rng.standard_normal(n)
        H = rng.standard_normal((n, n + 1))
        q = [2, INF][rng.integers(2)]
        direct = radius_bruteforce_zonotope_inbody(G, c, H, d, q).value
        reduced = radius_bruteforce_zonotope_inbody(center_reduction(G, c, d), np.zeros(n), H,
                                                    np.zeros(n), q).value
        assert direct == pytest.approx(reduced, rel=1e-7)


def test_merge_parallel_generators():
    G = np.array([[1.0, -2.0, 0.0, 0.0], [1.0, -2.0, 0.0, 1.0]])
    M = merge_parallel_generators(G)
    assert M.shape == (2, 2)
    assert sorted(np.abs(M).sum(axis=0)) == pytest.approx([1.0, 6.0])


def test_unit_ball_zonotope_examples():
    assert np.array_equal(unit_ball_zonotope(2, 2, "outer"), np.eye(2))
    assert np.allclose(unit_ball_zonotope(1, 1, "inner"), [[1.0]])
    G = unit_ball_zonotope(2, 4, "inner")
    assert G.shape == (2, 4)
    dirs = G / np.linalg.norm(G, axis=0)
    angles = np.sort(np.mod(np.arctan2(dirs[1], dirs[0]), np.pi))
    assert np.allclose(np.diff(angles), np.pi / 4)
    r = radius_bruteforce_zonotope_inbody(G, np.zeros(2), np.eye(2), np.zeros(2), 2).value
    assert r == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        unit_ball_zonotope(3, 2)


@pytest.mark.parametrize("n,m", [(2, 3), (3, 5), (4, 8)])
def test_unit_ball_zonotope_inner_and_outer(n, m, rng):
    inner = unit_ball_zonotope(n, m, "inner")
    outer = unit_ball_zonotope(n, m, "outer")
    for _ in range(200):
        ell = rng.standard_normal(n)
        ell /= np.linalg.norm(ell)
        assert np.abs(inner.T @ ell).sum() <= 1 + 1e-9
        assert np.abs(outer.T @ ell).sum() >= 1 - 1e-9


def test_facets_describe_the_zonotope(rng):
    G = rng.standard_normal((3, 5))
    Y = zonotope_facets(G)
    alphas = rng.uniform(-1, 1, (5, 300))
    assert np.all(zonotope_gauge(Y, G @ alphas) <= 1 + 1e-9)
    signs = np.where(rng.standard_normal((5, 50)) > 0, 1.0, -1.0)
    # vertices are on the boundary
    assert np.allclose(zonotope_gauge(Y, G @ signs).max(), 1.0)


@given(st.integers(0, 10_000), st.sampled_from(P_VALUES))
def test_ellipsotope_norm_axioms(seed, p):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(n, n + 3))
    G = rng.standard_normal((n, m))
    a, b = rng.standard_normal(m), rng.standard_normal(m)
    x, y = G @ a, G @ b
    nx, ny = ellipsotope_norm(G, p, x), ellipsotope_norm(G, p, y)
    assert nx <= vector_norm(a, p) + 1e-7
    assert ellipsotope_norm(G, p, -2.5 * x) == pytest.approx(2.5 * nx, rel=1e-6, abs=1e-9)
    assert ellipsotope_norm(G, p, x + y) <= nx + ny + 1e-8 * (1 + nx + ny)


@given(st.integers(0, 10_000), st.sampled_from(P_VALUES))
def test_generated_points_are_members(seed, p):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    G = rng.standard_normal((n, n + int(rng.integers(0, 3))))
    c = rng.standard_normal(n)
    E = Ellipsotope(p, G, c)
    for _ in range(5):
        assert E.contains_point(c + G @ _unit_vector(rng, E.m, p), tol=1e-8)


@given(st.integers(0, 10_000), st.sampled_from(P_VALUES))
def test_support_function_central_symmetry(seed, p):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    E = Ellipsotope(p, rng.standard_normal((n, 3)), rng.standard_normal(n))
    reflected = Ellipsotope(p, -E.G, E.c)
    ell = rng.standard_normal(n)
    # reflecting through the center gives the same set
    assert support_function(reflected, ell) == pytest.approx(support_function(E, ell))
    assert support_function(E, ell) == pytest.approx(
        support_function(reflected, -ell) + 2 * ell @ E.c, abs=1e-9)
    # the support value is attained by the dual maximizer
    g = E.G.T @ ell
    assert support_function(E, ell) == pytest.approx(ell @ E.c + vector_norm(g, holder_conjugate(p)))


def test_projection_preserves_radius_on_degenerate_instances(rng):
    for _ in range(20):
        n, k = 3, 2
        B = np.linalg.qr(rng.standard_normal((n, n)))[0][:, :k]
        H = B @ rng.standard_normal((k, 3))
        d = rng.standard_normal(n)
        G = B @ rng.standard_normal((k, 4))
        c = d + B @ rng.standard_normal(k) * 0.1
        res = containment_radius(zonotope(G, c), Ellipsotope(2, H, d), "exact")
        P = rank_and_projection(H).projector
        direct = radius_bruteforce_zonotope_inbody(P @ G, P @ c, P @ H, P @ d, 2).value
        assert res.r_upper == pytest.approx(direct, rel=1e-7)
        assert res.r_lower == pytest.approx(direct, rel=1e-7)
