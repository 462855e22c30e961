"""Ellipsotopes ``E_p(G, c) = {G a + c : ||a||_p <= 1}`` and their geometry.

``p = 2`` gives ellipsoids (possibly degenerate), ``p = inf`` zonotopes and
``p = 1`` cross-polytopes.  Generators are the columns of ``G``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .norms import INF, Exponent, ExponentLike, exponent, holder_conjugate, vector_norm


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Ellipsotope:
    """The set ``{G a + c : ||a||_p <= 1}``."""

    p: Exponent
    G: np.ndarray
    c: np.ndarray

    def __init__(self, p: ExponentLike, G, c=None):
        G = np.asarray(G, dtype=float)
        if G.ndim == 1:
            G = G.reshape(-1, 1)
        if G.ndim != 2:
            raise DimensionError(f"generator matrix must be 2-D, got shape {G.shape}")
        c = np.zeros(G.shape[0]) if c is None else np.asarray(c, dtype=float).ravel()
        if c.shape[0] != G.shape[0]:
            raise DimensionError(f"center has length {c.shape[0]}, generators have {G.shape[0]} rows")
        if G.shape[0] == 0 or G.shape[1] == 0:
            raise DimensionError(f"need n >= 1 and m >= 1, got generator shape {G.shape}")
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(c))):
            raise ValueError("ellipsotope data must be finite")
        object.__setattr__(self, "p", exponent(p))
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def m(self) -> int:
        return self.G.shape[1]

    @property
    def is_nondegenerate(self) -> bool:
        return self.n <= self.m and np.linalg.matrix_rank(self.G) == self.n

    @property
    def is_zonotope(self) -> bool:
        return self.p == INF

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ellipsotope):
            return NotImplemented
        return (self.p == other.p and self.G.shape == other.G.shape
                and np.array_equal(self.G, other.G) and np.array_equal(self.c, other.c))

    def __repr__(self) -> str:
        return f"Ellipsotope(p={self.p}, n={self.n}, m={self.m})"

    def translate(self, v) -> "Ellipsotope":
        return Ellipsotope(self.p, self.G, self.c + np.asarray(v, dtype=float))

    def scale(self, lam: float) -> "Ellipsotope":
        """Scale about the center."""
        return Ellipsotope(self.p, lam * self.G, self.c)

    def linear_map(self, M) -> "Ellipsotope":
        M = np.asarray(M, dtype=float)
        return Ellipsotope(self.p, M @ self.G, M @ self.c)

    def support(self, ell) -> float:
        return support_function(self, ell)

    def contains_point(self, x, tol: float = 1e-9) -> bool:
        return ellipsotope_norm(self.G, self.p, np.asarray(x, dtype=float) - self.c) <= 1 + tol


@dataclass(frozen=True, eq=False)
class HPolyhedron:
    """``{x : Lambda x <= lam}``."""

    Lambda: np.ndarray
    lam: np.ndarray

    def __init__(self, Lambda, lam):
        Lambda = np.atleast_2d(np.asarray(Lambda, dtype=float))
        lam = np.asarray(lam, dtype=float).ravel()
        if Lambda.shape[0] != lam.shape[0]:
            raise DimensionError(f"{Lambda.shape[0]} halfspace rows but {lam.shape[0]} offsets")
        object.__setattr__(self, "Lambda", Lambda)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.Lambda.shape[1]

    @staticmethod
    def box(lower, upper) -> "HPolyhedron":
        lower = np.asarray(lower, dtype=float).ravel()
        upper = np.asarray(upper, dtype=float).ravel()
        n = lower.size
        return HPolyhedron(np.vstack([np.eye(n), -np.eye(n)]), np.concatenate([upper, -lower]))

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.all(self.Lambda @ np.asarray(x, dtype=float) <= self.lam + tol))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HPolyhedron):
            return NotImplemented
        return (self.Lambda.shape == other.Lambda.shape and np.array_equal(self.Lambda, other.Lambda)
                and np.array_equal(self.lam, other.lam))


def zonotope_in_polyhedron(Z: Ellipsotope, P: HPolyhedron) -> np.ndarray:
    """Per-face margins ``lam - (Lambda c + |Lambda G| 1)``; all >= 0 iff ``Z`` is inside."""
    if Z.p != INF:
        raise ValueError("margins by row sums need a zonotope")
    if P.n != Z.n:
        raise DimensionError(f"polyhedron lives in R^{P.n}, zonotope in R^{Z.n}")
    return P.lam - (P.Lambda @ Z.c + np.abs(P.Lambda @ Z.G).sum(axis=1))


def zonotope(G, c=None) -> Ellipsotope:
    return Ellipsotope(INF, G, c)


def ellipsoid(G, c=None) -> Ellipsotope:
    return Ellipsotope(2, G, c)


def support_function(E: Ellipsotope, ell) -> float:
    """``h_E(l) = l^T c + ||G^T l||_{p*}``."""
    ell = np.asarray(ell, dtype=float).ravel()
    return float(ell @ E.c + vector_norm(E.G.T @ ell, holder_conjugate(E.p)))



RANK_REL_TOL = 1e-10


@dataclass
class RankReport:
    """Numerical rank, a projector ``U[:, :rank]^T`` onto the range and the singular values."""

    rank: int
    projector: np.ndarray
    singular_values: np.ndarray


def rank_and_projection(H, rel_tol: float = RANK_REL_TOL) -> RankReport:
    """SVD rank of ``H`` at threshold ``rel_tol * sigma_max`` and a projector onto its range.

    The projector has orthonormal rows, so ``P^T P`` is the orthogonal
    projector onto ``range(H)``.
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    H = np.atleast_2d(np.asarray(H, dtype=float))
    U, s, _ = np.linalg.svd(H, full_matrices=True)
    k = int(np.sum(s > rel_tol * s[0])) if s.size and s[0] > 0 else 0
    return RankReport(k, U[:, :k].T.copy(), s)


def project(E: Ellipsotope, P) -> Ellipsotope:
    return E.linear_map(P)


def center_reduction(G, c, d) -> np.ndarray:
    """Append the center offset as a generator: ``[G, c - d]``.

    For a zonotope inbody with circumbody centered at ``d`` the radius of
    ``Z(G, c)`` equals that of the origin-centered ``Z([G, c - d])``.
    """
    G = np.asarray(G, dtype=float)
    off = (np.asarray(c, dtype=float) - np.asarray(d, dtype=float)).reshape(-1, 1)
    return np.hstack([G, off])


def merge_parallel_generators(G, tol: float = 1e-12) -> np.ndarray:
    """Drop zero generators and add up parallel ones.

    For a zonotope this leaves the set unchanged: ``a g`` and ``b g`` together
    sweep the same segment as ``(|a| + |b|) g``.
    """
    G = np.asarray(G, dtype=float)
    norms = np.linalg.norm(G, axis=0)
    scale = norms.max(initial=0.0)
    keep = norms > tol * max(scale, 1.0)
    G, norms = G[:, keep], norms[keep]
    if G.shape[1] == 0:
        return np.zeros((G.shape[0], 0))
    U = G / norms
    # canonical sign: first entry of largest magnitude positive
    lead = np.argmax(np.abs(U) > 1e-9, axis=0)
    flip = np.sign(U[lead, np.arange(U.shape[1])])
    U = U * flip
    keys = np.round(U / 1e-9).astype(np.int64)
    _, inverse = np.unique(keys.T, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    out = np.zeros((G.shape[0], inverse.max() + 1))
    np.add.at(out.T, inverse, (U * norms).T)
    return out


# ---------------------------------------------------------------------------
# gauge / ellipsotope norm


def ellipsotope_norm(G, p: ExponentLike, x, rel_tol: float = 1e-9) -> float:
    """``min ||a||_p`` subject to ``G a = x``; ``inf`` when ``x`` is outside ``range(G)``.

    Membership in the range is decided by ``||G G^+ x - x|| <= rel_tol (1 + ||x||)``
    before any solve.  Closed forms cover square invertible ``G`` and
    ``p = 2``; ``p`` in ``{1, inf}`` goes through an LP and other exponents
    through a power-cone program.
    """
    p = exponent(p)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    n, m = G.shape
    if x.shape[0] != n:
        raise DimensionError("point and generator matrix disagree in dimension")
    if not np.any(x):
        return 0.0
    if m == 0:
        return INF
    if n == m and np.linalg.cond(G) < 1e12:
        return float(vector_norm(np.linalg.solve(G, x), p))
    a0 = np.linalg.pinv(G) @ x
    if np.linalg.norm(G @ a0 - x) > rel_tol * (1.0 + np.linalg.norm(x)):
        return INF
    if p == 2:
        return float(np.linalg.norm(a0))
    if p == INF:
        cost = np.zeros(m + 1)
        cost[-1] = 1.0
        A_ub = np.block([[np.eye(m), -np.ones((m, 1))], [-np.eye(m), -np.ones((m, 1))]])
        res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(2 * m),
                      A_eq=np.hstack([G, np.zeros((n, 1))]), b_eq=x,
                      bounds=[(None, None)] * (m + 1), method="highs")
        return float(res.fun) if res.status == 0 else INF
    if p == 1:
        res = linprog(np.ones(2 * m), A_eq=np.hstack([G, -G]), b_eq=x,
                      bounds=[(0, None)] * (2 * m), method="highs")
        return float(res.fun) if res.status == 0 else INF
    from .conic import ConeProgram

    prog = ConeProgram("ellipsotope-norm")
    a = prog.variable("a", m)
    t = prog.variable("t")
    prog.add_zero(G @ a - x)
    prog.add_norm_leq(a, p, t)
    prog.minimize(t)
    sol = prog.solve()
    if sol.status == "infeasible":
        return INF
    if not sol.ok:
        raise RuntimeError(f"ellipsotope norm program failed: {sol.raw_status}")
    return float(sol.objective)


def zonotope_facet_count(n: int, m: int) -> int:
    return math.comb(m, n - 1) if n >= 1 else 0


def zonotope_facets(G, max_facets: int = 200_000) -> np.ndarray:
    """Facet normals of ``Z(G)`` scaled so that ``||G^T y||_1 = 1``.

    Returns an array ``Y`` of shape ``(k, n)`` with one row per facet pair
    ``{y, -y}``, so that ``Z(G) = {x : |Y x| <= 1}``.  The rows are also the
    vertices (up to sign) of the polar body ``{y : ||G^T y||_1 <= 1}``.
    ``G`` must have full row rank.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    n, m = G.shape
    if n == 0:
        return np.zeros((0, 0))
    if np.linalg.matrix_rank(G) < n:
        raise DimensionError("zonotope is not full-dimensional")
    if n == 1:
        return np.array([[1.0 / np.abs(G).sum()]])
    if zonotope_facet_count(n, m) > max_facets:
        raise ValueError(f"{zonotope_facet_count(n, m)} facet candidates exceed the limit {max_facets}")
    if n == 2:
        Y = np.stack([-G[1], G[0]], axis=1)
    else:
        combos = np.array(list(itertools.combinations(range(m), n - 1)))
        Y = np.empty((len(combos), n))
        # the null vector of an (n-1) x n matrix is its last right singular vector
        for start in range(0, len(combos), 4096):
            sub = G.T[combos[start:start + 4096]]  # (b, n-1, n)
            _, s, vt = np.linalg.svd(sub, full_matrices=True)
            Y[start:start + 4096] = vt[:, -1, :]
            degenerate = s[:, -1] <= 1e-10 * max(1.0, np.abs(G).max())
            Y[start:start + 4096][degenerate] = 0.0
    h = np.abs(Y @ G).sum(axis=1)
    good = h > 1e-12 * max(1.0, np.abs(Y).max())
    Y = Y[good] / h[good, None]
    return Y


def zonotope_gauge(Y: np.ndarray, X) -> np.ndarray:
    """Gauge of a zonotope with facet rows ``Y`` at the columns of ``X``."""
    X = np.asarray(X, dtype=float)
    return np.abs(Y @ X).max(axis=0)


# ---------------------------------------------------------------------------
# unit-ball zonotopes


def _spread_directions(n: int, m: int) -> np.ndarray:
    """``m`` unit directions in ``R^n``; evenly rotated in the plane."""
    if n == 2:
        ang = np.pi * np.arange(m) / m
        return np.vstack([np.cos(ang), np.sin(ang)])
    cols = [np.eye(n)[:, i] for i in range(min(n, m))]
    pairs = itertools.combinations(range(n), 2)
    for i, j in pairs:
        for sgn in (1.0, -1.0):
            if len(cols) >= m:
                break
            v = np.zeros(n)
            v[i], v[j] = 1.0, sgn
            cols.append(v / math.sqrt(2.0))
    rng = np.random.Generator(np.random.Philox(n * 1000 + m))
    while len(cols) < m:
        v = rng.standard_normal(n)
        cols.append(v / np.linalg.norm(v))
    return np.column_stack(cols[:m])


def _max_vertex_norm(G: np.ndarray) -> float:
    from .norms import sign_vectors

    best = 0.0
    for S in sign_vectors(G.shape[1], fix_first=True):
        best = max(best, float(np.sqrt(((G @ S.T) ** 2).sum(axis=0)).max()))
    return best


def unit_ball_zonotope(n: int, m: int, mode: str = "inner") -> np.ndarray:
    """Generators of a zonotope approximating the Euclidean unit ball.

    ``mode="inner"`` scales the directions so that every vertex lies in the
    ball (exact vertex enumeration up to 20 generators, an SDP bound above).
    ``mode="outer"`` scales them so that the ball lies inside, checked exactly
    through the facet normals.  ``m == n`` with outer mode returns ``I``.
    """
    if m < n:
        raise ValueError(f"need at least n={n} generators, got {m}")
    if mode not in ("inner", "outer"):
        raise ValueError(f"mode must be 'inner' or 'outer', got {mode!r}")
    D = _spread_directions(n, m)
    if mode == "outer":
        if m == n:
            return np.eye(n)
        Y = zonotope_facets(D)
        # B2 in Z(D) iff every facet row has Euclidean norm <= 1
        return D * float(np.linalg.norm(Y, axis=1).max())
    if m <= 20:
        r = _max_vertex_norm(D)
    else:
        from .containment import zsr_relaxation

        r = zsr_relaxation(D, np.eye(n), 2).value * (1 + 1e-9)
    return D / r
