"""Reduction from the p->1 operator norm to ellipsotope-in-zonotope containment.

For ``A`` in ``R^{n x m}`` the circumbody is the zonotope
``Z(H/2, n e_{n+1})`` in ``R^{n+1}`` with ``H = [[I, -I], [1^T, 1^T]]``, whose
slices near the bottom vertex are scaled cross-polytopes and whose middle
part contains the tube ``B_1 x [1, 2n-1]``.  The inbody is
``E_p(G_{A/xi}, n e_{n+1})`` with ``G_A = blockdiag(A, -L)``.  With ``L`` and
``rho`` chosen as below, the inbody touches the circumbody exactly when
``||A/xi||_{p->1} = 1``, so ``sigma(xi) = r(inbody, circumbody)`` crosses 1 at
``xi = ||A||_{p->1}`` and a bisection on ``sigma`` recovers the norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .norms import INF, Exponent, ExponentLike, exponent, vector_norm
from .oracles import (OracleBudget, radius_bruteforce_zonotope_inbody, radius_facet_enumeration)
from .sets import Ellipsotope, zonotope_facet_count


def compute_L_rho(n: int, p: ExponentLike) -> tuple[float, float]:
    """Constants ``(L, rho)`` that make the inbody touch the bottom slices.

    For finite ``p``: ``rho = n^(-1/(p-1))`` and
    ``L = (n - rho) / (1 - rho^p)^(1/p)``; for ``p = inf``: ``L = n - 1``,
    ``rho = 1``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    p = exponent(p)
    if p == 1:
        raise ValueError("p must lie in (1, inf]")
    if p == INF:
        return float(n - 1), 1.0
    pf = float(p)
    rho = n ** (-1.0 / (pf - 1.0))
    L = (n - rho) / (1.0 - rho ** pf) ** (1.0 / pf)
    return L, rho


def L_rho_residuals(n: int, p: ExponentLike, L: float, rho: float) -> tuple[float, float]:
    """Residuals of the two defining equations of ``(L, rho)``.

    ``1 - rho^p = ((n - rho)/L)^p`` (the inbody slice at height ``rho`` has
    1-norm radius ``rho``) and
    ``L = (1 - ((n-rho)/L)^p)^(1/p - 1) ((n-rho)/L)^(p-1)`` (the slice radii
    are tangent there).
    """
    pf = float(exponent(p))
    u = (n - rho) / L
    r1 = 1.0 - rho ** pf - u ** pf
    r2 = L - (1.0 - u ** pf) ** (1.0 / pf - 1.0) * u ** (pf - 1.0)
    return r1, r2


def circumbody_generators(n: int) -> np.ndarray:
    """``H = [[I, -I], [1^T, 1^T]]`` of shape ``(n+1, 2n)``."""
    I = np.eye(n)
    return np.vstack([np.hstack([I, -I]), np.ones((1, 2 * n))])


@dataclass
class HardnessInstance:
    n: int
    p: Exponent
    A: np.ndarray
    L: float
    rho: float
    H: np.ndarray
    circumbody: Ellipsotope

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def center(self) -> np.ndarray:
        e = np.zeros(self.n + 1)
        e[-1] = self.n
        return e

    def inbody_generators(self, xi: float = 1.0) -> np.ndarray:
        n, m = self.A.shape
        G = np.zeros((n + 1, m + 1))
        G[:n, :m] = self.A / xi
        G[n, m] = -self.L
        return G

    def inbody(self, xi: float = 1.0) -> Ellipsotope:
        return Ellipsotope(self.p, self.inbody_generators(xi), self.center)


def build_instance(A, p: ExponentLike) -> HardnessInstance:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    if n < 2:
        raise ValueError(f"A needs at least 2 rows, got {n}")
    p = exponent(p)
    L, rho = compute_L_rho(n, p)
    H = circumbody_generators(n)
    e = np.zeros(n + 1)
    e[-1] = n
    return HardnessInstance(n, p, A, L, rho, H, Ellipsotope(INF, 0.5 * H, e))


def slice_support(inst: HardnessInstance, height: float, ell) -> float:
    """Support value in direction ``ell`` (in ``R^n``) of the circumbody slice at ``x_{n+1} = height``."""
    n = inst.n
    ell = np.asarray(ell, dtype=float).ravel()
    Hh = 0.5 * inst.H
    # maximize ell^T (Hh[:n] beta) subject to Hh[n] beta + n = height, |beta| <= 1
    res = linprog(-(ell @ Hh[:n]), A_eq=Hh[n:n + 1], b_eq=[height - n],
                  bounds=[(-1.0, 1.0)] * (2 * n), method="highs")
    if res.status != 0:
        return -INF
    return float(-res.fun)


INNER_METHODS = ("oracle", "bruteforce", "facets", "lr", "auto")


def sigma(inst: HardnessInstance, xi: float, inner: str = "oracle",
          budget: OracleBudget | None = None) -> tuple[float, bool]:
    """``sigma(xi) = r(E_p(G_{A/xi}), Z(H/2))`` and whether the value is exact.

    ``inner="oracle"`` uses vertex enumeration for ``p = inf`` with at most
    12 inbody generators and facet enumeration of the circumbody otherwise;
    both are exact.  ``"lr"`` reports the LR upper bound (exact when its
    certificate fires) and ``"auto"`` the dispatcher's upper bound.
    """
    if not xi > 0:
        raise ValueError("xi must be positive")
    if inner not in INNER_METHODS:
        raise ValueError(f"inner must be one of {INNER_METHODS}")
    budget = budget or OracleBudget()
    E = inst.inbody(xi)
    Z = inst.circumbody
    if inner == "oracle":
        if inst.p == INF and E.m <= 12:
            inner = "bruteforce"
        else:
            inner = "facets"
    if inner == "bruteforce":
        r = radius_bruteforce_zonotope_inbody(E.G, E.c, Z.G, Z.c, INF, budget)
        return r.value, True
    if inner == "facets":
        if zonotope_facet_count(Z.n, Z.m) > budget.max_facets:
            raise ValueError("circumbody has too many facets for enumeration")
        r = radius_facet_enumeration(E.G, E.c, Z.G, Z.c, inst.p, budget)
        return r.value, True
    from .containment import containment_radius

    res = containment_radius(E, Z, "lr" if inner == "lr" else "auto", budget)
    return res.r_upper, res.exact


@dataclass
class BisectionConfig:
    delta: float
    mu: float
    epsilon: float
    xi_hat: float
    max_iterations: int

    @staticmethod
    def for_matrix(A, p: ExponentLike, delta: float = 0.05) -> "BisectionConfig":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if not delta > 0:
            raise ValueError("delta must be positive")
        p = exponent(p)
        m = A.shape[1]
        n11 = float(np.abs(A).sum(axis=0).max())
        n1inf = float(np.abs(A).max())
        expo = 1.0 if p == INF else (float(p) - 1.0) / float(p)
        xi_hat = m ** expo * n11
        mu = 0.5 * delta * n11
        eps = delta * n11 * n1inf / (2.0 * xi_hat ** 2)
        iters = math.ceil(math.log2(xi_hat / mu)) + 2
        return BisectionConfig(delta, mu, eps, xi_hat, iters)


@dataclass
class BisectionResult:
    xi: float
    iterations: int
    exit: str  # "interval" or "certificate-free"
    exact_inner: bool
    log: list = field(default_factory=list)


class BisectionDiverged(RuntimeError):
    pass


def p_to_1_norm_via_bisection(A, p: ExponentLike, config: BisectionConfig | None = None,
                              inner: str = "oracle",
                              budget: OracleBudget | None = None) -> BisectionResult:
    """Estimate ``||A||_{p->1}`` from containment queries on the hardness instance.

    Halves ``(0, xi_hat)`` until it is at most ``2 mu`` wide: an
    approximation ``<= 1`` moves the upper end, one ``>= 1 + eps`` the lower
    end, and a value in between ends the search early ("certificate-free").
    A single-row ``A`` is padded with a zero row, which leaves the norm
    unchanged.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.any(A):
        raise ValueError("A must be nonzero")
    p = exponent(p)
    if p == 1:
        raise ValueError("p must lie in (1, inf]")
    if A.shape[0] == 1:
        A = np.vstack([A, np.zeros_like(A)])
    cfg = config or BisectionConfig.for_matrix(A, p)
    inst = build_instance(A, p)
    a, b = 0.0, cfg.xi_hat
    exact_all = True
    log = []
    for it in range(cfg.max_iterations + 1):
        if b - a <= 2.0 * cfg.mu:
            return BisectionResult(0.5 * (a + b), it, "interval", exact_all, log)
        mid = 0.5 * (a + b)
        val, exact = sigma(inst, mid, inner, budget)
        exact_all &= exact
        log.append((mid, val))
        if val <= 1.0:
            b = mid
        elif val >= 1.0 + cfg.epsilon:
            a = mid
        else:
            return BisectionResult(mid, it + 1, "certificate-free", exact_all, log)
    raise BisectionDiverged(f"no convergence in {cfg.max_iterations} iterations; last interval ({a}, {b})")


def one_to_one_norm(A) -> float:
    return float(vector_norm(np.atleast_2d(A), 1, axis=0).max())
