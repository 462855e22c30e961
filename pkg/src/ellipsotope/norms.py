"""Vector, mixed and operator norms plus the Gaussian moment constants.

Exponents are kept exact: finite values are :class:`fractions.Fraction`
instances and the infinite exponent is ``math.inf``.  Conjugation is exact,
so ``holder_conjugate(holder_conjugate(p)) == p`` for every admissible ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

Exponent = Union[Fraction, float]
ExponentLike = Union[int, float, Fraction, str]

INF = math.inf


def exponent(p: ExponentLike) -> Exponent:
    """Parse ``p`` into a canonical exponent.

    Accepts ints, floats, fractions and the strings ``"inf"``/``"infinity"``.
    Floats are converted through their shortest decimal repr so that
    ``1.5`` becomes ``3/2`` rather than a binary expansion.

    Raises:
        ValueError: if ``p`` is below 1 or not a number.
    """
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "+inf", "∞"):
            return INF
        try:
            p = Fraction(s)
        except ValueError as exc:
            raise ValueError(f"not an exponent: {p!r}") from exc
    if isinstance(p, bool):
        raise ValueError(f"not an exponent: {p!r}")
    if isinstance(p, float):
        if math.isnan(p):
            raise ValueError("exponent is NaN")
        if math.isinf(p):
            if p < 0:
                raise ValueError("exponent must be >= 1")
            return INF
        p = Fraction(repr(float(p)))
    elif isinstance(p, (int, np.integer)):
        p = Fraction(int(p))
    elif isinstance(p, np.floating):
        return exponent(float(p))
    elif not isinstance(p, Fraction):
        raise ValueError(f"not an exponent: {p!r}")
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    return p


def is_inf(p: Exponent) -> bool:
    return p == INF


def as_float(p: ExponentLike) -> float:
    """Float value of an exponent (``math.inf`` for the infinite one)."""
    p = exponent(p)
    return INF if p == INF else float(p)


def holder_conjugate(p: ExponentLike) -> Exponent:
    """Return ``p*`` with ``1/p + 1/p* = 1``, exactly."""
    p = exponent(p)
    if p == INF:
        return Fraction(1)
    if p == 1:
        return INF
    return p / (p - 1)


def sr_exponent(p: ExponentLike) -> Exponent:
    """Return ``p / (p - 2)`` for ``p >= 2``, with ``2 -> inf`` and ``inf -> 1``.

    This is the dual exponent of the ``p/2``-norm.  For ``q`` in ``(1, 2]`` the
    quantity ``q / (2 - q)`` equals ``sr_exponent(holder_conjugate(q))``.
    """
    p = exponent(p)
    if p == INF:
        return Fraction(1)
    if p < 2:
        raise ValueError(f"p/(p-2) needs p >= 2, got {p}")
    if p == 2:
        return INF
    return p / (p - 2)


def format_exponent(p: ExponentLike) -> str:
    p = exponent(p)
    if p == INF:
        return "inf"
    if p.denominator == 1:
        return str(p.numerator)
    if Fraction(repr(float(p))) == p:
        return repr(float(p))
    return f"{p.numerator}/{p.denominator}"


def vector_norm(x, p: ExponentLike, axis: int | None = None) -> np.ndarray | float:
    """The ``p``-norm of ``x`` (along ``axis`` if given, else of the flattened array).

    Finite non-standard exponents are evaluated with a max-scaling so that large
    entries do not overflow.
    """
    p = exponent(p)
    x = np.asarray(x, dtype=float)
    if axis is None:
        x = x.ravel()
        axis = 0
    a = np.abs(x)
    if a.shape[axis] == 0:
        out = np.zeros(np.delete(a.shape, axis))
        return float(out) if out.ndim == 0 else out
    if p == INF:
        out = a.max(axis=axis)
    elif p == 1:
        out = a.sum(axis=axis)
    elif p == 2:
        out = np.sqrt((a * a).sum(axis=axis))
    else:
        pf = float(p)
        mx = a.max(axis=axis, keepdims=True)
        safe = np.where(mx > 0, mx, 1.0)
        out = (np.squeeze(safe, axis=axis)
               * ((a / safe) ** pf).sum(axis=axis) ** (1.0 / pf))
        out = np.where(np.squeeze(mx, axis=axis) > 0, out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def lpq_norm(X, p: ExponentLike, q: ExponentLike, transposed: bool = False) -> float:
    """Mixed norm: the ``q``-norm of the vector of column ``p``-norms of ``X``.

    With ``transposed=True`` the same is applied to ``X.T``, i.e. rows are
    aggregated instead of columns.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.size == 0:
        return 0.0
    return float(vector_norm(vector_norm(X, p, axis=1 if transposed else 0), q))


def dual_maximizer(g, p: ExponentLike) -> np.ndarray:
    """A unit ``p``-norm vector ``a`` with ``g @ a == ||g||_{p*}``.

    The zero vector maps to ``e_1`` scaled to unit norm.
    """
    p = exponent(p)
    g = np.asarray(g, dtype=float).ravel()
    n = g.size
    if n == 0:
        return g.copy()
    if not np.any(g):
        a = np.zeros(n)
        a[0] = 1.0
        return a
    if p == INF:
        return np.where(g >= 0, 1.0, -1.0)
    if p == 1:
        a = np.zeros(n)
        i = int(np.argmax(np.abs(g)))
        a[i] = 1.0 if g[i] >= 0 else -1.0
        return a
    ps = float(holder_conjugate(p))
    a = np.sign(g) * np.abs(g / np.abs(g).max()) ** (ps - 1.0)
    return a / vector_norm(a, p)


def gaussian_moment(k: ExponentLike) -> float:
    """``gamma_k = (E|X|^k)^(1/k)`` for a standard normal ``X``.

    Uses ``E|X|^k = 2^(k/2) Gamma((k+1)/2) / sqrt(pi)``.  ``gamma_1 = sqrt(2/pi)``,
    ``gamma_2 = 1``.  The infinite exponent is rejected.
    """
    k = exponent(k)
    if k == INF:
        raise ValueError("gaussian moment is unbounded for k = inf")
    kf = float(k)
    log_moment = 0.5 * kf * math.log(2.0) + math.lgamma(0.5 * (kf + 1.0)) - 0.5 * math.log(math.pi)
    return math.exp(log_moment / kf)


def sign_vectors(n: int, chunk: int = 1 << 14, fix_first: bool = False) -> Iterator[np.ndarray]:
    """Yield all sign vectors of length ``n`` in Gray-code order, as row blocks.

    Each block has shape ``(k, n)``.  With ``fix_first`` only the half with a
    positive first coordinate is produced, which suffices for symmetric
    objectives.
    """
    if n == 0:
        yield np.ones((1, 0))
        return
    free = n - 1 if fix_first else n
    total = 1 << free
    shifts = np.arange(free, dtype=np.int64)
    for start in range(0, total, chunk):
        i = np.arange(start, min(start + chunk, total), dtype=np.int64)
        gray = i ^ (i >> 1)
        bits = (gray[:, None] >> shifts) & 1
        signs = 1.0 - 2.0 * bits
        if fix_first:
            signs = np.hstack([np.ones((signs.shape[0], 1)), signs])
        yield signs


@dataclass
class OperatorNormEstimate:
    """Result of :func:`operator_norm_oracle`.

    ``exact`` is False when ``value`` is only a lower bound (the ascent path).
    ``argmax`` is a unit ``p``-norm vector attaining ``value``.
    """

    value: float
    exact: bool
    argmax: np.ndarray
    method: str


@dataclass
class NormBudget:
    """Limits for :func:`operator_norm_oracle`; ``starts`` random restarts are
    added to the deterministic ``+-e_i``-type starts."""

    max_enumeration: int = 20
    starts: int = 16
    iterations: int = 200
    seed: int = 0


class OracleInfeasible(RuntimeError):
    """An exact answer was requested but lies beyond the enumeration limit."""


def operator_norm_oracle(A, p: ExponentLike, q: ExponentLike,
                         budget: NormBudget | None = None,
                         require_exact: bool = False) -> OperatorNormEstimate:
    """``||A||_{p->q} = max ||A v||_q`` over ``||v||_p <= 1``.

    Exact for ``p = 1``, ``q = inf``, ``p = q = 2``, and by sign enumeration for
    ``p = inf`` (columns) or ``q = 1`` (rows, via the dual form
    ``max_s ||A^T s||_{p*}``) when the enumerated side is at most
    ``budget.max_enumeration``.  Otherwise a multi-start power-type ascent
    returns a certified lower bound flagged ``exact=False``; with
    ``require_exact`` that case raises :class:`OracleInfeasible` instead.
    """
    budget = budget or NormBudget()
    p, q = exponent(p), exponent(q)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n, m = A.shape
    if m == 0 or not np.any(A):
        v = np.zeros(m)
        if m:
            v[0] = 1.0
        return OperatorNormEstimate(0.0, True, v, "zero")
    if p == 1:
        cols = vector_norm(A, q, axis=0)
        j = int(np.argmax(cols))
        v = np.zeros(m)
        v[j] = 1.0
        return OperatorNormEstimate(float(cols[j]), True, v, "columns")
    if q == INF:
        ps = holder_conjugate(p)
        rows = vector_norm(A, ps, axis=1)
        i = int(np.argmax(rows))
        return OperatorNormEstimate(float(rows[i]), True, dual_maximizer(A[i], p), "rows")
    if p == 2 and q == 2:
        _, s, vt = np.linalg.svd(A)
        return OperatorNormEstimate(float(s[0]), True, vt[0], "svd")
    if p == INF and m <= budget.max_enumeration:
        best, arg = -1.0, None
        for S in sign_vectors(m, fix_first=True):
            vals = vector_norm(A @ S.T, q, axis=0)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, arg = float(vals[k]), S[k].copy()
        return OperatorNormEstimate(best, True, arg, "enumeration")
    if q == 1 and n <= budget.max_enumeration:
        ps = holder_conjugate(p)
        best, arg = -1.0, None
        for S in sign_vectors(n, fix_first=True):
            vals = vector_norm(S @ A, ps, axis=1)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, arg = float(vals[k]), dual_maximizer(S[k] @ A, p)
        return OperatorNormEstimate(best, True, arg, "enumeration")
    if require_exact:
        raise OracleInfeasible(
            f"no exact method for p={p}, q={q} on a {n}x{m} matrix within "
            f"enumeration limit {budget.max_enumeration}")
    return _ascent(A, p, q, budget)


def _ascent(A: np.ndarray, p: Exponent, q: Exponent, budget: NormBudget) -> OperatorNormEstimate:
    qs = holder_conjugate(q)
    rng = np.random.Generator(np.random.Philox(budget.seed))
    m = A.shape[1]
    starts = [dual_maximizer(row, p) for row in A]
    starts += [dual_maximizer(rng.standard_normal(m), p) for _ in range(budget.starts)]
    best, arg = -1.0, None
    for v in starts:
        val = vector_norm(A @ v, q)
        for _ in range(budget.iterations):
            u = dual_maximizer(A @ v, qs)
            v_new = dual_maximizer(A.T @ u, p)
            val_new = vector_norm(A @ v_new, q)
            if val_new <= val * (1 + 1e-13):
                if val_new > val:
                    v, val = v_new, val_new
                break
            v, val = v_new, val_new
        if val > best:
            best, arg = float(val), v
    return OperatorNormEstimate(best, False, arg, "ascent")
