"""Containment radius of one ellipsotope in another.

The radius ``r(E_in, E_out)`` is the smallest ``r`` such that ``E_in`` lies in
``E_out`` scaled by ``r`` about its center, so ``E_in`` is contained iff
``r <= 1``.  Exact algorithms cover cross-polytope inbodies (vertex scan) and
ellipsoid pairs (a 2x2-block LMI); zonotope inbodies are bracketed by a
linear relaxation (LR), a zonotope semidefinite relaxation (ZSR) and an
inbody dual certificate; ``p >= 2`` inbodies use a semidefinite relaxation
(SR); remaining exponent pairs are reduced to tractable ones through norm
equivalence.  Every bound reported here is certified either by a proven
approximation ratio or by an explicit feasible point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .conic import ConeProgram, Solution, bmat, diag, verify_solution
from .norms import (INF, Exponent, ExponentLike, exponent, gaussian_moment, holder_conjugate,
                    lpq_norm, sr_exponent, vector_norm)
from .oracles import (OracleBudget, quadratic_over_ball, radius_facet_enumeration,
                      radius_sampling_lower_bound, reduce_circumbody)
from .sets import Ellipsotope, center_reduction, ellipsotope_norm, rank_and_projection

log = logging.getLogger(__name__)

DEAD_BAND = 1e-9
CERTIFICATE_TOL = 1e-6
VERIFY_TOL = 1e-6
_ONE = exponent(1)


class SolverFailure(RuntimeError):
    pass


class DegenerateCircumbody(ValueError):
    """The relaxations need a circumbody generator matrix of full row rank."""


def verdict_from_bounds(r_lower: float, r_upper: float, band: float = DEAD_BAND) -> str:
    if r_upper <= 1.0 + band:
        return "contained"
    if r_lower > 1.0 + band:
        return "not_contained"
    return "unknown"


@dataclass
class ContainmentResult:
    """Certified bracket ``r_lower <= r <= r_upper`` and the derived verdict."""

    r_lower: float
    r_upper: float
    method: str
    verdict: str = ""
    witness: dict = field(default_factory=dict)
    exact: bool = False
    certificate: bool = False
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.r_lower = max(0.0, float(self.r_lower))
        self.r_upper = float(self.r_upper)
        if self.r_lower > self.r_upper:
            gap = self.r_lower - self.r_upper
            if gap > 1e-7 * max(1.0, self.r_upper):
                raise ValueError(f"inconsistent bounds [{self.r_lower}, {self.r_upper}]")
            # solver noise on an exact method; keep the upper value
            self.r_lower = self.r_upper
        if not self.verdict:
            self.verdict = verdict_from_bounds(self.r_lower, self.r_upper)

    @property
    def value(self) -> float:
        """Midpoint of the bracket (the radius itself when exact)."""
        if math.isinf(self.r_upper):
            return self.r_lower if math.isinf(self.r_lower) else INF
        return 0.5 * (self.r_lower + self.r_upper)


@dataclass
class Relaxation:
    value: float
    witness: dict
    solution: Solution | None = None


def _check_solution(prog: ConeProgram, sol: Solution, what: str) -> None:
    if not sol.ok:
        raise SolverFailure(f"{what}: solver returned {sol.status} ({sol.raw_status})")
    bad = verify_solution(prog, sol, VERIFY_TOL)
    if bad:
        worst = max(bad, key=lambda v: v.magnitude)
        raise SolverFailure(f"{what}: constraint {worst.name} violated by {worst.magnitude:.3g}")


def _require_surjective(H: np.ndarray) -> None:
    if rank_and_projection(H).rank < H.shape[0]:
        raise DegenerateCircumbody("circumbody generators do not span the space; "
                                   "project onto their range first")


def _nonzero_columns(G: np.ndarray) -> np.ndarray:
    return G[:, np.any(G != 0.0, axis=0)]


# ---------------------------------------------------------------------------
# exact methods


def radius_vpoly_in_ellipsotope(G, c, H, d, q: ExponentLike) -> ContainmentResult:
    """Exact radius of the cross-polytope ``E_1(G, c)`` in ``E_q(H, d)``.

    The convex gauge attains its maximum at a vertex ``c +- g_i``.  Ties go
    to the first vertex in the order ``+g_1, -g_1, +g_2, ...``.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    off = np.asarray(c, dtype=float) - np.asarray(d, dtype=float)
    best, arg = -1.0, None
    for i in range(G.shape[1]):
        for s in (1.0, -1.0):
            val = ellipsotope_norm(H, q, s * G[:, i] + off)
            if val > best:
                best, arg = val, (i, s)
    alpha = np.zeros(G.shape[1])
    alpha[arg[0]] = arg[1]
    return ContainmentResult(best, best, "vertex", exact=True, witness={"alpha": alpha})


def radius_ellipsoid_in_ellipsoid(G, c, H, d) -> ContainmentResult:
    """Exact radius of ``E_2(G, c)`` in the nondegenerate ellipsoid ``E_2(H, d)``.

    With ``Theta = H^+ G`` and ``theta = H^+ (c - d)`` the squared radius is the
    least ``rho`` for which some ``delta >= 0`` makes

        [[Theta^T Theta - delta I, Theta^T theta],
         [theta^T Theta, theta^T theta - rho + delta]]

    negative semidefinite.  The eigenvalue oracle gives the same number and
    is used as a fallback if the solve fails.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    _require_surjective(H)
    Hp = np.linalg.pinv(H)
    Theta = Hp @ G
    theta = Hp @ (np.asarray(c, dtype=float) - np.asarray(d, dtype=float))
    m = G.shape[1]
    oracle = quadratic_over_ball(Theta, theta)
    prog = ConeProgram("ellipsoid-in-ellipsoid")
    rho = prog.variable("rho")
    delta = prog.variable("delta")
    prog.add_nonneg(delta, "delta>=0")
    TT = Theta.T @ Theta
    Tt = (Theta.T @ theta).reshape(m, 1)
    tt = float(theta @ theta)
    lmi = bmat([[diag(delta * np.ones(m)) - TT, -Tt],
                [-Tt.T, (rho - delta - tt).reshape(1, 1)]])
    prog.add_psd(lmi, "lmi")
    prog.minimize(rho)
    sol = prog.solve()
    try:
        _check_solution(prog, sol, "ellipsoid LMI")
    except SolverFailure as exc:
        r = oracle.value
        return ContainmentResult(r, r, "ellipsoid_eigen", exact=True,
                                 witness={"alpha": oracle.alpha}, notes=[str(exc)])
    r = math.sqrt(max(0.0, float(sol["rho"])))
    notes = []
    if abs(r - oracle.value) > 1e-6 * max(1.0, oracle.value):
        notes.append(f"LMI value {r:.12g} differs from eigen oracle {oracle.value:.12g}")
    return ContainmentResult(r, r, "ellipsoid_sdp", exact=True,
                             witness={"rho": float(sol["rho"]), "delta": float(sol["delta"]),
                                      "alpha": oracle.alpha},
                             notes=notes)


# ---------------------------------------------------------------------------
# zonotope inbodies: LR and its dual


def lr_relaxation(G, H, q: ExponentLike) -> Relaxation:
    """``LR_q(G, H) = min ||X||`` over ``H X = G``.

    The norm is the ``q``-norm of the row 1-norms of ``X``.  The solver's
    ``X`` is pushed back onto ``H X = G`` with the pseudo-inverse before the
    norm is evaluated, so the value is attained by an exactly feasible point.
    """
    q = exponent(q)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    _require_surjective(H)
    n, m = G.shape
    l = H.shape[1]
    prog = ConeProgram("lr")
    X = prog.variable("X", (l, m))
    U = prog.variable("U", (l, m))
    t = prog.variable("t")
    prog.add_zero(H @ X - G, "HX=G")
    prog.add_nonneg(U - X, "U>=X")
    prog.add_nonneg(U + X, "U>=-X")
    prog.add_norm_leq(U.sum(axis=1), q, t, "rownorms")
    prog.minimize(t)
    sol = prog.solve()
    _check_solution(prog, sol, "LR")
    Xv = sol["X"]
    Xv = Xv + np.linalg.pinv(H) @ (G - H @ Xv)
    val = lpq_norm(Xv, 1, q, transposed=True)
    return Relaxation(val, {"X": Xv}, sol)


def lr_dual(G, H, q: ExponentLike) -> Relaxation:
    """Dual of LR: ``max tr(G^T Y)`` over ``||H^T Y|| <= 1``.

    The constraint norm is the ``q*``-norm of the row max-norms of ``H^T Y``.
    The returned ``Y`` is rescaled onto the feasible set before ``tr(G^T Y)``
    is evaluated, so the value is a valid lower bound on LR.
    """
    q = exponent(q)
    qs = holder_conjugate(q)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    _require_surjective(H)
    n, m = G.shape
    l = H.shape[1]
    prog = ConeProgram("lr-dual")
    Y = prog.variable("Y", (n, m))
    s = prog.variable("s", l)
    Z = H.T @ Y
    S = s.reshape(l, 1) @ np.ones((1, m))
    prog.add_nonneg(S - Z, "s>=Z")
    prog.add_nonneg(S + Z, "s>=-Z")
    prog.add_norm_leq(s, qs, 1.0, "dualball")
    prog.maximize((Y * G).sum())
    sol = prog.solve()
    _check_solution(prog, sol, "LR dual")
    Yv = sol["Y"]
    nrm = lpq_norm(H.T @ Yv, INF, qs, transposed=True)
    if nrm > 1.0:
        Yv = Yv / nrm
    return Relaxation(float(np.sum(G * Yv)), {"Y": Yv}, sol)


def lr_exactness_certificate(Y, tol: float = CERTIFICATE_TOL) -> bool:
    """True iff all columns of ``Y`` agree up to sign (relative ``tol``)."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[1] <= 1:
        return True
    scale = np.abs(Y).max()
    if scale == 0.0:
        return True
    ref = Y[:, int(np.argmax(np.abs(Y).max(axis=0)))]
    for j in range(Y.shape[1]):
        y = Y[:, j]
        if min(np.abs(y - ref).max(), np.abs(y + ref).max()) > tol * scale:
            return False
    return True


def dual_lower_bound(G, H, q: ExponentLike, candidates) -> tuple[float, np.ndarray | None]:
    """Best ``||G^T x||_1`` over candidate directions scaled into ``||H^T x||_{q*} <= 1``.

    Every such ``x`` certifies ``r(Z(G), E_q(H)) >= ||G^T x||_1``.
    """
    qs = holder_conjugate(q)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    best, arg = 0.0, None
    for y in candidates:
        nrm = vector_norm(H.T @ y, qs)
        if not nrm > 0:
            continue
        x = y / nrm
        val = float(np.abs(G.T @ x).sum())
        if val > best:
            best, arg = val, x
    return best, arg


def _y_candidates(Y: np.ndarray) -> list[np.ndarray]:
    cands = [Y[:, j] for j in range(Y.shape[1])]
    if Y.size:
        U, _, _ = np.linalg.svd(Y, full_matrices=False)
        cands.append(U[:, 0])
    return cands


def zsr_relaxation(G, H, q: ExponentLike) -> Relaxation:
    """Semidefinite relaxation for zonotope inbodies, ``q`` in ``(1, 2]``.

    ``ZSR_q = 1/2 min (||v||_1 + ||w||_{q/(2-q)})`` subject to
    ``[[Diag(v), G^T], [G, H Diag(w) H^T]] >= 0``.  A small diagonal shift
    repairs any residual infeasibility of the solver's point before the
    objective is evaluated.
    """
    q = exponent(q)
    if not (1 < q <= 2):
        raise ValueError(f"ZSR needs q in (1, 2], got {q}")
    return _lmi_relaxation(G, H, _ONE, sr_exponent(holder_conjugate(q)), "ZSR")


def sr_relaxation(G, H, p: ExponentLike, q: ExponentLike) -> Relaxation:
    """Semidefinite relaxation for ``E_p`` inbodies, ``1 < q <= 2 <= p < inf``.

    ``SR = 1/2 min (||v||_{p/(p-2)} + ||w||_{q*/(q*-2)})`` over the same LMI as
    ZSR.  The bodies must share their center.
    """
    p, q = exponent(p), exponent(q)
    if not (1 < q <= 2 and 2 <= p < INF):
        raise ValueError(f"SR needs 1 < q <= 2 <= p < inf, got p={p}, q={q}")
    return _lmi_relaxation(G, H, sr_exponent(p), sr_exponent(holder_conjugate(q)), "SR")



def _lmi_relaxation(G, H, ev: Exponent, ew: Exponent, what: str) -> Relaxation:
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    _require_surjective(H)
    n, m = G.shape
    l = H.shape[1]
    prog = ConeProgram(what.lower())
    v = prog.variable("v", m)
    w = prog.variable("w", l)
    tv = prog.variable("tv")
    tw = prog.variable("tw")
    lmi = bmat([[diag(v), G.T], [G, H @ diag(w) @ H.T]])
    prog.add_psd(lmi, "lmi")
    prog.add_norm_leq(v, ev, tv, "vnorm")
    prog.add_norm_leq(w, ew, tw, "wnorm")
    prog.minimize(0.5 * (tv + tw))
    sol = prog.solve()
    if not sol.ok:
        raise SolverFailure(f"{what}: solver returned {sol.status} ({sol.raw_status})")
    vv, wv = sol["v"].copy(), sol["w"].copy()

    def lmi_min_eig(a, b):
        M = np.block([[np.diag(a), G.T], [G, H @ np.diag(b) @ H.T]])
        return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])

    lam = lmi_min_eig(vv, wv)
    if lam < 0:
        smin2 = float(np.linalg.svd(H, compute_uv=False)[n - 1] ** 2)
        eps = -lam * (1 + 1e-6) + 1e-14 * max(1.0, np.abs(vv).max(), np.abs(wv).max())
        for _ in range(20):
            va, wa = vv + eps, wv + eps / smin2
            if lmi_min_eig(va, wa) >= 0:
                break
            eps *= 2.0
        vv, wv = va, wa
    val = 0.5 * (vector_norm(vv, ev) + vector_norm(wv, ew))
    return Relaxation(float(val), {"v": vv, "w": wv}, sol)


# ---------------------------------------------------------------------------
# bound bookkeeping


def lr_ratio(q: ExponentLike, m: int) -> float | None:
    """``gamma_{q*} sqrt(m) / gamma_1`` for finite ``q*``; ``None`` for ``q = 1``."""
    qs = holder_conjugate(q)
    if qs == INF:
        return None
    return gaussian_moment(qs) * math.sqrt(m) / gaussian_moment(1)


def zsr_ratio(q: ExponentLike) -> float:
    return gaussian_moment(holder_conjugate(q)) / gaussian_moment(1)


def sr_ratio(p: ExponentLike, q: ExponentLike) -> float:
    return gaussian_moment(holder_conjugate(q)) * gaussian_moment(p)


def _zonotope_radius(G, off, H, q: Exponent, use_lr: bool, use_zsr: bool,
                     budget: OracleBudget | None) -> ContainmentResult:
    """LR and/or ZSR bracket for the origin-centered ``Z([G, off])`` in ``E_q(H)``."""
    Gp = _nonzero_columns(center_reduction(G, off, np.zeros_like(off)))
    if Gp.shape[1] == 0:
        return ContainmentResult(0.0, 0.0, "trivial", exact=True, witness={"alpha": np.zeros(G.shape[1])})
    m = Gp.shape[1]
    lo, hi = 0.0, INF
    witness: dict = {}
    methods, notes = [], []
    certificate = False
    if use_lr:
        try:
            lr = lr_relaxation(Gp, H, q)
            dual = lr_dual(Gp, H, q)
        except SolverFailure as exc:
            notes.append(str(exc))
        else:
            methods.append("lr")
            hi = min(hi, lr.value)
            witness["X"] = lr.witness["X"]
            witness["Y"] = dual.witness["Y"]
            ratio = lr_ratio(q, m)
            if ratio is not None:
                lo = max(lo, lr.value / ratio)
            lb, x = dual_lower_bound(Gp, H, q, _y_candidates(dual.witness["Y"]))
            if lb > lo:
                lo = lb
                witness["x"] = x
            if lr_exactness_certificate(dual.witness["Y"]):
                certificate = True
                if abs(dual.value - lr.value) <= CERTIFICATE_TOL * max(1.0, lr.value):
                    lo = hi
                else:
                    notes.append("certificate columns agree but the duality gap is open")
    if use_zsr:
        try:
            zsr = zsr_relaxation(Gp, H, q)
        except SolverFailure as exc:
            notes.append(str(exc))
        else:
            methods.append("zsr")
            witness["v"], witness["w"] = zsr.witness["v"], zsr.witness["w"]
            if zsr.value < hi:
                hi = zsr.value
            lo = max(lo, zsr.value / zsr_ratio(q))
    if not methods:
        raise SolverFailure("; ".join(notes))
    if lo > hi:
        lo = hi
    return ContainmentResult(lo, hi, "+".join(methods), witness=witness,
                             exact=(lo == hi), certificate=certificate, notes=notes)


def _sampling_floor(inbody: Ellipsotope, circumbody: Ellipsotope,
                    budget: OracleBudget | None) -> tuple[float, np.ndarray | None]:
    res = radius_sampling_lower_bound(inbody, circumbody, budget)
    return res.value, res.alpha


def norm_equivalence_fallback(inbody: Ellipsotope, circumbody: Ellipsotope,
                              budget: OracleBudget | None = None) -> ContainmentResult:
    """Bracket the radius by swapping the inbody exponent for a tractable one.

    With ``m`` inbody generators and ``p' >= p``, ``E_{p'}(m^(1/p'-1/p) G)`` lies in
    ``E_p(G)`` which lies in ``E_{p'}(G)``; for ``p' <= p`` the factor moves to
    the outer body.  Surrogates are ``p' = 1`` (exact vertex scan),
    ``p' = inf`` (LR/ZSR) and ``p' = 2`` when ``q = 2`` (exact LMI).  The
    resulting intervals are intersected, together with a sampling lower
    bound.
    """
    p, q = inbody.p, circumbody.p
    m = inbody.m
    same_center = np.array_equal(inbody.c, circumbody.c)
    lo, hi = 0.0, INF
    parts = []
    surrogates = [_ONE, INF] + ([exponent(2)] if q == 2 else [])
    for ps in surrogates:
        if ps == p:
            continue
        inv_p = 0.0 if p == INF else 1.0 / float(p)
        inv_ps = 0.0 if ps == INF else 1.0 / float(ps)
        factor = m ** abs(inv_p - inv_ps)
        # ps <= p: E_p(G) in E_ps(factor G) and E_ps(G) in E_p(G)
        up_scale, low_scale = (factor, 1.0) if ps <= p else (1.0, 1.0 / factor)
        try:
            if same_center:
                res = containment_radius(Ellipsotope(ps, inbody.G, inbody.c), circumbody,
                                         budget=budget)
                s_lo, s_hi = res.r_lower * low_scale, res.r_upper * up_scale
            else:
                r_up = containment_radius(Ellipsotope(ps, up_scale * inbody.G, inbody.c),
                                          circumbody, budget=budget)
                r_dn = containment_radius(Ellipsotope(ps, low_scale * inbody.G, inbody.c),
                                          circumbody, budget=budget)
                s_lo, s_hi = r_dn.r_lower, r_up.r_upper
        except SolverFailure as exc:
            log.warning("surrogate p'=%s failed: %s", ps, exc)
            continue
        parts.append(f"p'={'inf' if ps == INF else ps}")
        lo, hi = max(lo, s_lo), min(hi, s_hi)
    s_lo, alpha = _sampling_floor(inbody, circumbody, budget)
    lo = max(lo, s_lo)
    if lo > hi:
        lo = hi
    return ContainmentResult(lo, hi, "norm_equivalence", witness={"alpha": alpha},
                             notes=["surrogates " + ", ".join(parts)])


# ---------------------------------------------------------------------------
# dispatcher


METHODS = ("auto", "exact", "vertex", "ellipsoid", "lr", "zsr", "sr", "fallback", "bruteforce")


def containment_radius(inbody: Ellipsotope, circumbody: Ellipsotope, method: str = "auto",
                       budget: OracleBudget | None = None) -> ContainmentResult:
    """Certified bracket on the radius of ``inbody`` in ``circumbody``.

    ``method="auto"`` picks by exponents: ``p = 1`` vertex scan; ``p = q = 2``
    ellipsoid LMI; ``p = inf`` LR plus ZSR when ``q`` is in ``(1, 2]``;
    ``2 <= p < inf`` with ``q`` in ``(1, 2]`` and a shared center SR; anything
    else the norm-equivalence fallback.  A degenerate circumbody yields
    ``+inf`` when the inbody leaves its affine hull and is otherwise handled
    by projecting both bodies onto that hull.  ``method="exact"`` picks an
    exact method (vertex scan, ellipsoid LMI, vertex enumeration or facet
    enumeration) and raises when none applies.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if inbody.n != circumbody.n:
        raise ValueError(f"inbody lives in R^{inbody.n} but circumbody in R^{circumbody.n}")
    p, q = inbody.p, circumbody.p
    red = reduce_circumbody(inbody.G, inbody.c, circumbody.G, circumbody.c)
    if red is None:
        return ContainmentResult(INF, INF, "degenerate", exact=True,
                                 notes=["inbody leaves the affine hull of the circumbody"])
    G, off, H = red
    if G.shape[0] != inbody.n:
        sub_in = Ellipsotope(p, G, off)
        sub_out = Ellipsotope(q, H, np.zeros_like(off))
        res = containment_radius(sub_in, sub_out, method, budget)
        res.notes.append(f"projected onto a {G.shape[0]}-dimensional range")
        return res

    if method == "auto":
        if p == 1:
            method = "vertex"
        elif p == 2 and q == 2:
            method = "ellipsoid"
        elif p == INF:
            method = "lr+zsr" if 1 < q <= 2 else "lr"
        elif 2 <= p < INF and 1 < q <= 2 and not np.any(off):
            method = "sr"
        else:
            method = "fallback"

    if method == "exact":
        budget = budget or OracleBudget()
        if p == 1:
            method = "vertex"
        elif p == 2 and q == 2:
            method = "ellipsoid"
        elif p == INF and G.shape[1] <= budget.max_enumeration_columns:
            method = "bruteforce"
        elif q == INF:
            o = radius_facet_enumeration(G, off, H, np.zeros_like(off), p, budget)
            return ContainmentResult(o.value, o.value, "facets", exact=True,
                                     witness={"alpha": o.alpha})
        else:
            raise ValueError(f"no exact method for p={p}, q={q} within the enumeration limit")

    if method == "vertex":
        _need(p == 1, "vertex scan needs p = 1")
        return radius_vpoly_in_ellipsotope(G, off, H, np.zeros_like(off), q)
    if method == "ellipsoid":
        _need(p == 2 and q == 2, "ellipsoid LMI needs p = q = 2")
        return radius_ellipsoid_in_ellipsoid(G, off, H, np.zeros_like(off))
    if method in ("lr", "zsr", "lr+zsr"):
        _need(p == INF, f"{method} needs a zonotope inbody")
        if "zsr" in method:
            _need(1 < q <= 2, "ZSR needs q in (1, 2]")
        res = _zonotope_radius(G, off, H, q, "lr" in method, "zsr" in method, budget)
        if q == 1 and not res.exact:
            s_lo, alpha = _sampling_floor(inbody, circumbody, budget)
            if s_lo > res.r_lower:
                res = ContainmentResult(min(s_lo, res.r_upper), res.r_upper, res.method,
                                        witness={**res.witness, "alpha": alpha},
                                        certificate=res.certificate, notes=res.notes)
        return res
    if method == "sr":
        _need(2 <= p < INF and 1 < q <= 2, "SR needs 1 < q <= 2 <= p < inf")
        if np.any(off):
            raise ValueError("SR is only available for bodies with a shared center")
        sr = sr_relaxation(G, H, p, q)
        lo = sr.value / sr_ratio(p, q)
        return ContainmentResult(lo, sr.value, "sr", witness=sr.witness)
    if method == "fallback":
        return norm_equivalence_fallback(inbody, circumbody, budget)
    if method == "bruteforce":
        from .oracles import radius_bruteforce_zonotope_inbody

        _need(p == INF, "vertex enumeration needs a zonotope inbody")
        o = radius_bruteforce_zonotope_inbody(G, off, H, np.zeros_like(off), q, budget)
        return ContainmentResult(o.value, o.value, "bruteforce", exact=True,
                                 witness={"alpha": o.alpha})
    raise AssertionError(method)  # pragma: no cover


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)
