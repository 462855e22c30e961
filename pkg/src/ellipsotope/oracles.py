"""Ground-truth computations at desk scale.

These routines are deliberately independent of the relaxations in
:mod:`ellipsotope.containment`: exhaustive vertex enumeration, facet
enumeration of zonotope circumbodies, a sampling/ascent lower bound, the
exact maximum of a Euclidean norm over the unit ball, and p->1 operator norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .norms import (INF, ExponentLike, NormBudget, OracleInfeasible, dual_maximizer, exponent,
                    holder_conjugate, operator_norm_oracle, sign_vectors, vector_norm)
from .sets import (Ellipsotope, ellipsotope_norm, rank_and_projection, zonotope_facet_count,
                   zonotope_facets)

__all__ = [
    "OracleBudget", "OracleResult", "OracleInfeasible", "CircumbodyGauge",
    "radius_bruteforce_zonotope_inbody", "radius_facet_enumeration",
    "radius_sampling_lower_bound", "quadratic_over_ball", "opnorm_p_to_1_oracle",
    "reduce_circumbody",
]


@dataclass
class OracleBudget:
    max_enumeration_columns: int = 20
    sample_count: int = 256
    ascent_iterations: int = 50
    seed: int = 0
    max_facets: int = 200_000

    def __post_init__(self):
        for name in ("max_enumeration_columns", "sample_count", "ascent_iterations", "max_facets"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass
class OracleResult:
    value: float
    alpha: np.ndarray | None
    exact: bool
    method: str


def reduce_circumbody(G, c, H, d):
    """Project onto ``range(H)`` when ``H`` is rank deficient.

    Returns ``(G, offset, H)`` in the reduced coordinates, where
    ``offset = c - d``, or ``None`` if the inbody leaves the affine hull of
    the circumbody (radius ``+inf``).
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    off = np.asarray(c, dtype=float).ravel() - np.asarray(d, dtype=float).ravel()
    rep = rank_and_projection(H)
    n = H.shape[0]
    if rep.rank == n:
        return G, off, H
    if rank_and_projection(np.hstack([G, off[:, None], H])).rank != rep.rank:
        return None
    P = rep.projector
    return P @ G, P @ off, P @ H


class CircumbodyGauge:
    """Vectorised gauge ``||.||`` of ``E_q(H)`` for a full-row-rank ``H``.

    ``dual(y)`` returns ``x`` with ``||H^T x||_{q*} <= 1`` and ``x @ y``
    (approximately) equal to the gauge, so any evaluation through it is a
    valid lower bound on a radius.
    """

    def __init__(self, H, q: ExponentLike, max_facets: int = 200_000):
        self.H = np.atleast_2d(np.asarray(H, dtype=float))
        self.q = exponent(q)
        self.qs = holder_conjugate(self.q)
        n, l = self.H.shape
        self.mode = "program"
        if n == l and np.linalg.cond(self.H) < 1e10:
            self.mode = "inverse"
            self.Hinv = np.linalg.inv(self.H)
        elif self.q == 2:
            self.mode = "pinv"
            self.Hpinv = np.linalg.pinv(self.H)
        elif self.q == INF and zonotope_facet_count(n, l) <= max_facets:
            self.mode = "facets"
            self.Y = zonotope_facets(self.H, max_facets)

    @property
    def vectorised(self) -> bool:
        return self.mode != "program"

    def values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if self.mode == "inverse":
            return vector_norm(self.Hinv @ X, self.q, axis=0)
        if self.mode == "pinv":
            return vector_norm(self.Hpinv @ X, 2, axis=0)
        if self.mode == "facets":
            return np.abs(self.Y @ X).max(axis=0)
        return np.array([ellipsotope_norm(self.H, self.q, x) for x in X.T])

    def dual(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float).ravel()
        if self.mode == "inverse":
            return self.Hinv.T @ dual_maximizer(self.Hinv @ y, self.qs)
        if self.mode == "pinv":
            z = self.Hpinv @ y
            nz = np.linalg.norm(z)
            x = self.Hpinv.T @ (z / nz if nz > 0 else z)
        elif self.mode == "facets":
            v = self.Y @ y
            k = int(np.argmax(np.abs(v)))
            x = self.Y[k] * (1.0 if v[k] >= 0 else -1.0)
        else:
            x = self._dual_program(y)
        nrm = vector_norm(self.H.T @ x, self.qs)
        return x / nrm if nrm > 1 else x

    def _dual_program(self, y: np.ndarray) -> np.ndarray:
        from .conic import ConeProgram

        prog = ConeProgram("gauge-dual")
        x = prog.variable("x", y.size)
        prog.add_norm_leq(self.H.T @ x, self.qs, 1.0)
        prog.maximize((x * y).sum())
        sol = prog.solve()
        if not sol.ok:
            return np.zeros_like(y)
        return sol["x"]


def radius_bruteforce_zonotope_inbody(G, c, H, d, q: ExponentLike,
                                      budget: OracleBudget | None = None) -> OracleResult:
    """Exact radius of ``Z(G, c)`` in ``E_q(H, d)`` by enumerating all ``2^m`` vertices.

    The returned ``alpha`` is the first maximizing sign vector in Gray-code
    order.
    """
    budget = budget or OracleBudget()
    G = np.atleast_2d(np.asarray(G, dtype=float))
    m = G.shape[1]
    if m > budget.max_enumeration_columns:
        raise OracleInfeasible(f"{m} generators exceed the enumeration limit "
                               f"{budget.max_enumeration_columns}")
    red = reduce_circumbody(G, c, H, d)
    if red is None:
        return OracleResult(INF, np.ones(m), True, "bruteforce")
    G, off, H = red
    gauge = CircumbodyGauge(H, q, budget.max_facets)
    symmetric = not np.any(off)
    best, arg = -1.0, None
    for S in sign_vectors(m, chunk=1 << 12, fix_first=symmetric):
        vals = gauge.values(G @ S.T + off[:, None])
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, arg = float(vals[k]), S[k].copy()
    return OracleResult(best, arg, True, "bruteforce")


def radius_facet_enumeration(G, c, H, d, p: ExponentLike,
                             budget: OracleBudget | None = None) -> OracleResult:
    """Exact radius of ``E_p(G, c)`` in the zonotope ``Z(H, d)`` for any ``p``.

    The radius is the maximum of the convex function
    ``x -> ||G^T x||_{p*} + x^T (c - d)`` over the polar body
    ``{x : ||H^T x||_1 <= 1}``, attained at one of its vertices, which are
    the scaled facet normals of ``Z(H)``.
    """
    budget = budget or OracleBudget()
    p = exponent(p)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    red = reduce_circumbody(G, c, H, d)
    if red is None:
        return OracleResult(INF, None, True, "facets")
    G, off, H = red
    n, l = H.shape
    if zonotope_facet_count(n, l) > budget.max_facets:
        raise OracleInfeasible(f"{zonotope_facet_count(n, l)} facet candidates exceed "
                               f"{budget.max_facets}")
    Y = zonotope_facets(H, budget.max_facets)
    Y = np.vstack([Y, -Y])
    vals = vector_norm(Y @ G, holder_conjugate(p), axis=1) + Y @ off
    k = int(np.argmax(vals))
    return OracleResult(float(vals[k]), dual_maximizer(G.T @ Y[k], p), True, "facets")


def _unit_samples(rng: np.random.Generator, m: int, p, k: int) -> np.ndarray:
    if p == INF:
        return rng.choice([-1.0, 1.0], size=(k, m))
    Z = rng.standard_normal((k, m))
    nrm = vector_norm(Z, p, axis=1)
    return Z / nrm[:, None]


def radius_sampling_lower_bound(inbody: Ellipsotope, circumbody: Ellipsotope,
                                budget: OracleBudget | None = None) -> OracleResult:
    """Lower bound on the radius from sampled and locally ascended inbody points.

    Candidates are the ``+-e_i`` directions, random points of the unit
    ``p``-sphere and support maximizers for random directions.  The best few
    are improved by alternating between the circumbody's dual certificate and
    the inbody's support maximizer.  The reported value is evaluated as
    ``x^T (G a + c - d)`` with ``x`` feasible for the dual norm ball, so it is
    a valid lower bound whenever the inner evaluation is.
    """
    budget = budget or OracleBudget()
    if inbody.n != circumbody.n:
        raise ValueError("bodies live in different dimensions")
    p = inbody.p
    red = reduce_circumbody(inbody.G, inbody.c, circumbody.G, circumbody.c)
    m = inbody.m
    if red is None:
        return OracleResult(INF, np.eye(m)[0], False, "sampling")
    G, off, H = red
    gauge = CircumbodyGauge(H, circumbody.p, budget.max_facets)
    rng = np.random.Generator(np.random.Philox(budget.seed))
    eye = np.eye(m)
    cands = [eye, -eye]
    k = budget.sample_count if gauge.vectorised else min(budget.sample_count, 32)
    cands.append(_unit_samples(rng, m, p, k))
    dirs = rng.standard_normal((k, G.shape[0]))
    cands.append(np.array([dual_maximizer(G.T @ u, p) for u in dirs]))
    A = np.vstack(cands)
    vals = gauge.values(G @ A.T + off[:, None])
    order = np.argsort(-vals, kind="stable")[:4]
    best_val, best_alpha = -INF, None
    for i in order:
        alpha = A[i]
        val = -INF
        for _ in range(budget.ascent_iterations):
            y = G @ alpha + off
            x = gauge.dual(y)
            cand = float(x @ y)
            if cand <= val * (1 + 1e-12) + 1e-15:
                break
            val = cand
            alpha_next = dual_maximizer(G.T @ x, p)
            if np.array_equal(alpha_next, alpha):
                break
            alpha = alpha_next
        if val > best_val:
            best_val, best_alpha = val, alpha
    return OracleResult(max(best_val, 0.0), best_alpha, False, "sampling")


def quadratic_over_ball(Theta, theta) -> OracleResult:
    """Exact ``max ||Theta a + theta||_2`` over ``||a||_2 <= 1``.

    With ``M = Theta^T Theta`` and ``b = Theta^T theta`` the maximizer solves
    ``(lam I - M) a = b`` on the unit sphere with ``lam >= lambda_max(M)``;
    ``lam`` is the root of a monotone secular equation, found by bisection in
    the eigenbasis.  The "hard case" (``b`` orthogonal to the top eigenspace)
    is handled explicitly.
    """
    Theta = np.atleast_2d(np.asarray(Theta, dtype=float))
    theta = np.asarray(theta, dtype=float).ravel()
    m = Theta.shape[1]
    M = Theta.T @ Theta
    b = Theta.T @ theta
    c0 = float(theta @ theta)
    lam, Q = np.linalg.eigh(M)
    bt = Q.T @ b
    lmax = lam[-1]
    scale = max(1.0, abs(lmax))
    top = lam >= lmax - 1e-12 * scale
    if np.linalg.norm(bt) == 0.0:
        alpha = Q[:, -1]
    else:
        rest = ~top
        if np.linalg.norm(bt[top]) <= 1e-14 * max(1.0, np.linalg.norm(bt)):
            # hard case candidate: check whether lam = lmax already reaches the sphere
            z = np.zeros(m)
            z[rest] = bt[rest] / (lmax - lam[rest])
            nz = np.linalg.norm(z)
            if nz <= 1.0:
                z[np.argmax(top)] = np.sqrt(max(0.0, 1.0 - nz * nz))
                alpha = Q @ z
                val = float(alpha @ M @ alpha + 2 * b @ alpha + c0)
                return OracleResult(float(np.sqrt(max(val, 0.0))), alpha, True, "eigen")

        def norm_at(mu):
            return np.linalg.norm(bt / (mu - lam))

        lo = lmax
        hi = lmax + np.linalg.norm(bt) + 1e-300
        # norm_at is decreasing on (lmax, inf); bisect on 1/norm - 1 which is close to linear
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if norm_at(mid) > 1.0:
                lo = mid
            else:
                hi = mid
        z = bt / (hi - lam)
        alpha = Q @ (z / np.linalg.norm(z))
    val = float(alpha @ M @ alpha + 2 * b @ alpha + c0)
    return OracleResult(float(np.sqrt(max(val, 0.0))), alpha, True, "eigen")


def opnorm_p_to_1_oracle(A, p: ExponentLike, budget: OracleBudget | None = None) -> OracleResult:
    """``||A||_{p->1}``; exact by sign enumeration when a side is small enough.

    For ``p = inf`` the column count must be within the enumeration limit
    (or the row count, using the dual form).  Other exponents fall back to a
    multi-start ascent whose value is only a lower bound.
    """
    budget = budget or OracleBudget()
    p = exponent(p)
    if p == 1:
        raise ValueError("p must lie in (1, inf]")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    nb = NormBudget(max_enumeration=budget.max_enumeration_columns,
                    starts=max(1, budget.sample_count // 16),
                    iterations=budget.ascent_iterations, seed=budget.seed)
    est = operator_norm_oracle(A, p, 1, nb, require_exact=(p == INF))
    return OracleResult(est.value, est.argmax, est.exact, est.method)
