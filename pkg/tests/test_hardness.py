import math

import numpy as np
import pytest

from ellipsotope.hardness import (BisectionConfig, BisectionDiverged, build_instance,
                                  circumbody_generators, compute_L_rho, L_rho_residuals,
                                  one_to_one_norm, p_to_1_norm_via_bisection, sigma,
                                  slice_support)
from ellipsotope.norms import INF
from ellipsotope.oracles import opnorm_p_to_1_oracle


def test_L_rho_examples():
    assert compute_L_rho(2, INF) == (1.0, 1.0)
    L, rho = compute_L_rho(2, 2)
    assert rho == pytest.approx(0.5) and L == pytest.approx(math.sqrt(3), rel=1e-12)
    L, rho = compute_L_rho(3, 2)
    assert rho == pytest.approx(1 / 3) and L == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    with pytest.raises(ValueError):
        compute_L_rho(1, 2)
    with pytest.raises(ValueError):
        compute_L_rho(3, 1)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("p", [1.5, 2, 3, 10])
def test_L_rho_invariants(n, p):
    L, rho = compute_L_rho(n, p)
    assert n - 1 < L < n and 0 < rho < 1
    r1, r2 = L_rho_residuals(n, p, L, rho)
    assert abs(r1) <= 1e-10 and abs(r2) <= 1e-10


def test_instance_structure():
    inst = build_instance(np.eye(2), 2)
    assert np.array_equal(inst.H, [[1, 0, -1, 0], [0, 1, 0, -1], [1, 1, 1, 1]])
    assert np.array_equal(circumbody_generators(2), inst.H)
    assert np.array_equal(inst.circumbody.c, [0, 0, 2])
    assert np.allclose(inst.circumbody.G, inst.H / 2)
    G = inst.inbody_generators(2.0)
    assert np.allclose(G[:2, :2], np.eye(2) / 2) and G[2, 2] == -inst.L
    assert inst.inbody(2.0).p == 2
    with pytest.raises(ValueError):
        build_instance(np.ones((1, 3)), INF)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("height", [0.25, 0.5, 1.0])
def test_slice_is_cross_polytope(n, height):
    inst = build_instance(np.eye(n), INF)
    for i in range(n):
        for s in (1.0, -1.0):
            ell = np.zeros(n)
            ell[i] = s
            assert slice_support(inst, height, ell) == pytest.approx(height, abs=1e-9)
    ell = np.ones(n) / n
    # the support of rho * B_1 in an interior direction
    assert slice_support(inst, height, ell) == pytest.approx(height / n, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_tube_vertices_inside(n):
    inst = build_instance(np.eye(n), INF)
    Z = inst.circumbody
    for h in (1.0, 2 * n - 1.0):
        for i in range(n):
            for s in (1.0, -1.0):
                x = np.zeros(n + 1)
                x[i], x[n] = s, h
                assert Z.contains_point(x, tol=1e-9)


def test_sigma_equals_one_at_the_norm(rng):
    for _ in range(5):
        A = rng.standard_normal((3, 3))
        nrm = opnorm_p_to_1_oracle(A, INF).value
        inst = build_instance(A, INF)
        val, exact = sigma(inst, nrm)
        assert exact and val == pytest.approx(1, abs=1e-4)


def test_sigma_monotone_separation(rng):
    A = rng.standard_normal((2, 3))
    nrm = opnorm_p_to_1_oracle(A, INF).value
    inst = build_instance(A, INF)
    for f in (0.5, 0.8, 0.95):
        assert sigma(inst, f * nrm)[0] >= 1 - 1e-9
    for f in (1.05, 1.5, 3.0):
        assert sigma(inst, f * nrm)[0] <= 1 + 1e-9
    assert sigma(inst, 1e3 * nrm)[0] < 1


def test_sigma_lower_bound(rng):
    A = rng.standard_normal((3, 2))
    inst = build_instance(A, INF)
    n1inf = np.abs(A).max()
    for xi in (0.1, 0.5, 1.0, 3.0):
        assert sigma(inst, xi)[0] >= n1inf / xi - 1e-9


def test_sigma_finite_p_at_identity():
    # ||I_2||_{2->1} = sqrt(2)
    inst = build_instance(np.eye(2), 2)
    val, exact = sigma(inst, math.sqrt(2), "facets")
    assert exact and val == pytest.approx(1, abs=1e-6)


def test_sigma_inner_variants_bracket_oracle(rng):
    A = rng.standard_normal((2, 2))
    inst = build_instance(A, INF)
    exact = sigma(inst, 1.0)[0]
    for inner in ("lr", "auto", "facets"):
        assert sigma(inst, 1.0, inner)[0] >= exact - 1e-7
    with pytest.raises(ValueError):
        sigma(inst, 0.0)
    with pytest.raises(ValueError):
        sigma(inst, 1.0, "magic")


def test_config_values():
    A = np.array([[1.0, -2.0], [3.0, 0.5]])
    cfg = BisectionConfig.for_matrix(A, INF, 0.05)
    # ||A||_{1->1} = 4 (first column), ||A||_{1->inf} = 3
    assert cfg.xi_hat == pytest.approx(2 * 4)
    assert cfg.mu == pytest.approx(0.025 * 4)
    assert cfg.epsilon == pytest.approx(0.05 * 4 * 3 / (2 * 64))
    assert cfg.max_iterations >= math.log2(cfg.xi_hat / cfg.mu)
    with pytest.raises(ValueError):
        BisectionConfig.for_matrix(A, INF, 0)


def test_bisection_examples():
    res = p_to_1_norm_via_bisection(np.eye(2), INF)
    assert res.xi == pytest.approx(2, rel=0.05)
    res = p_to_1_norm_via_bisection(np.ones((1, 4)), INF)
    assert res.xi == pytest.approx(4, rel=0.05)


def test_bisection_random_3x3(rng):
    for _ in range(3):
        A = rng.standard_normal((3, 3))
        res = p_to_1_norm_via_bisection(A, INF, BisectionConfig.for_matrix(A, INF, 0.05))
        ref = opnorm_p_to_1_oracle(A, INF).value
        assert abs(res.xi / ref - 1) <= 0.05
        assert res.iterations <= math.log2(3 / 0.05) + 1
        assert res.exact_inner


def test_bisection_finite_p():
    # ||I_2||_{2->1} = sqrt(2) and the facet oracle is exact
    res = p_to_1_norm_via_bisection(np.eye(2), 2)
    assert res.xi == pytest.approx(math.sqrt(2), rel=0.05)


def test_bisection_errors():
    with pytest.raises(ValueError):
        p_to_1_norm_via_bisection(np.zeros((2, 2)), INF)
    with pytest.raises(ValueError):
        p_to_1_norm_via_bisection(np.eye(2), 1)
    cfg = BisectionConfig(0.05, 1e-6, 1e-3, 2.0 * 2, 1)
    with pytest.raises(BisectionDiverged):
        p_to_1_norm_via_bisection(np.eye(2), INF, cfg)


def test_one_to_one_norm():
    assert one_to_one_norm([[1, -2], [3, 0.5]]) == 4
