"""A small conic modelling layer on top of the Clarabel interior-point solver.

Expressions are affine maps of one flat decision vector.  An :class:`Affine`
stores a sparse coefficient matrix (one row per entry, C order) and a constant
vector.  Programs collect constraints in the cones

* ``zero``      expression == 0
* ``nonneg``    expression >= 0
* ``soc``       ||x||_2 <= t
* ``psd``       symmetric matrix expression is positive semidefinite
* ``power``     x^a * y^(1-a) >= |z| with x, y >= 0

together with linear or convex quadratic objectives.  Geometric-mean
hypographs and p-norm epigraphs are expanded into these cones.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import clarabel
import numpy as np
import scipy.sparse as sp

from .norms import INF, ExponentLike, exponent

_SQRT2 = math.sqrt(2.0)


class ModelError(ValueError):
    """Raised for malformed expressions or constraints."""


def _widen(coef: sp.csr_matrix, width: int) -> sp.csr_matrix:
    if coef.shape[1] == width:
        return coef
    if coef.shape[1] > width:
        raise ModelError("expression refers to more variables than requested width")
    return sp.csr_matrix((coef.data, coef.indices, coef.indptr), shape=(coef.shape[0], width))


class Affine:
    """Affine expression ``coef @ x + const`` reshaped to ``shape`` (C order)."""

    __array_priority__ = 1000

    def __init__(self, coef, const, shape):
        self.shape = tuple(int(s) for s in shape)
        size = int(np.prod(self.shape)) if self.shape else 1
        self.coef = sp.csr_matrix(coef)
        self.const = np.asarray(const, dtype=float).ravel()
        if self.coef.shape[0] != size or self.const.size != size:
            raise ModelError(f"inconsistent affine expression of shape {self.shape}")

    # -- construction -------------------------------------------------
    @staticmethod
    def constant(value, width: int = 0) -> "Affine":
        value = np.asarray(value, dtype=float)
        return Affine(sp.csr_matrix((value.size, width)), value.ravel(), value.shape)

    @staticmethod
    def lift(value, width: int = 0) -> "Affine":
        if isinstance(value, Affine):
            return value
        return Affine.constant(value, width)

    # -- basic properties ---------------------------------------------
    @property
    def size(self) -> int:
        return self.const.size

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def width(self) -> int:
        return self.coef.shape[1]

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = self.width
        out = self.coef @ x[:w] + self.const
        return out.reshape(self.shape)

    def widened(self, width: int) -> "Affine":
        return Affine(_widen(self.coef, width), self.const, self.shape)

    def __repr__(self) -> str:
        return f"Affine(shape={self.shape}, nnz={self.coef.nnz})"

    # -- arithmetic ---------------------------------------------------
    def _align(self, other) -> tuple["Affine", "Affine"]:
        other = Affine.lift(other)
        if other.shape != self.shape:
            if other.size == 1:
                other = Affine(sp.csr_matrix(np.ones((self.size, 1))) @ other.coef,
                               np.full(self.size, other.const[0]), self.shape)
            elif self.size == 1:
                a, b = other._align(self)
                return b, a
            else:
                raise ModelError(f"shape mismatch {self.shape} vs {other.shape}")
        w = max(self.width, other.width)
        return self.widened(w), other.widened(w)

    def __add__(self, other) -> "Affine":
        a, b = self._align(other)
        return Affine(a.coef + b.coef, a.const + b.const, a.shape)

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        return Affine(-self.coef, -self.const, self.shape)

    def __sub__(self, other) -> "Affine":
        return self + (-Affine.lift(other))

    def __rsub__(self, other) -> "Affine":
        return (-self) + other

    def __mul__(self, other) -> "Affine":
        if isinstance(other, Affine):
            raise ModelError("product of two expressions is not affine")
        other = np.asarray(other, dtype=float)
        if other.ndim == 0:
            return Affine(self.coef * float(other), self.const * float(other), self.shape)
        if self.size == 1 and (other.size > 1 or other.ndim > self.ndim):
            ones = sp.csr_matrix(np.ones((other.size, 1)))
            return Affine(ones @ self.coef, np.full(other.size, self.const[0]), other.shape) * other
        other = np.broadcast_to(other, self.shape).ravel()
        D = sp.diags(other)
        return Affine(D @ self.coef, other * self.const, self.shape)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Affine":
        return self * (1.0 / np.asarray(other, dtype=float))

    def __matmul__(self, N) -> "Affine":
        if isinstance(N, Affine):
            raise ModelError("product of two expressions is not affine")
        N = np.asarray(N, dtype=float)
        if self.ndim == 1 and N.ndim == 1:
            return (self @ N[:, None]).reshape(())
        if self.ndim == 1:
            if N.ndim != 2 or N.shape[0] != self.shape[0]:
                raise ModelError("dimension mismatch in vector @ matrix")
            M = sp.csr_matrix(N.T)
            return Affine(M @ self.coef, M @ self.const, (N.shape[1],))
        if self.ndim != 2:
            raise ModelError("matmul needs a vector or matrix expression")
        r, c = self.shape
        if N.ndim == 1:
            if N.shape[0] != c:
                raise ModelError("dimension mismatch in matrix @ vector")
            M = sp.kron(sp.identity(r), sp.csr_matrix(N[None, :]), format="csr")
            return Affine(M @ self.coef, M @ self.const, (r,))
        if N.shape[0] != c:
            raise ModelError("dimension mismatch in matrix @ matrix")
        M = sp.kron(sp.identity(r), sp.csr_matrix(N.T), format="csr")
        return Affine(M @ self.coef, M @ self.const, (r, N.shape[1]))

    def __rmatmul__(self, M) -> "Affine":
        M = np.asarray(M, dtype=float)
        if M.ndim == 1 and self.ndim in (1, 2):
            out = M[None, :] @ self
            return out.reshape(out.shape[1:])
        if M.ndim != 2 or M.shape[1] != self.shape[0]:
            raise ModelError("dimension mismatch in matrix @ expression")
        if self.ndim == 1:
            S = sp.csr_matrix(M)
            return Affine(S @ self.coef, S @ self.const, (M.shape[0],))
        r, c = self.shape
        K = sp.kron(sp.csr_matrix(M), sp.identity(c), format="csr")
        return Affine(K @ self.coef, K @ self.const, (M.shape[0], c))

    # -- reshaping ----------------------------------------------------
    def _take(self, idx: np.ndarray) -> "Affine":
        flat = idx.ravel()
        return Affine(self.coef[flat], self.const[flat], idx.shape)

    def __getitem__(self, key) -> "Affine":
        idx = np.arange(self.size).reshape(self.shape)[key]
        return self._take(np.asarray(idx))

    @property
    def T(self) -> "Affine":
        if self.ndim < 2:
            return self
        return self._take(np.arange(self.size).reshape(self.shape).T)

    def reshape(self, *shape) -> "Affine":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Affine(self.coef, self.const, np.empty(self.shape).reshape(shape).shape)

    def ravel(self) -> "Affine":
        return Affine(self.coef, self.const, (self.size,))

    def sum(self, axis: int | None = None) -> "Affine":
        if axis is None:
            ones = sp.csr_matrix(np.ones((1, self.size)))
            return Affine(ones @ self.coef, ones @ self.const, ())
        idx = np.arange(self.size).reshape(self.shape)
        idx = np.moveaxis(idx, axis, -1)
        out_shape = idx.shape[:-1]
        k = idx.shape[-1]
        rows = np.repeat(np.arange(int(np.prod(out_shape))), k)
        S = sp.csr_matrix((np.ones(rows.size), (rows, idx.reshape(-1))),
                          shape=(int(np.prod(out_shape)), self.size))
        return Affine(S @ self.coef, S @ self.const, out_shape)


def concatenate(items: Sequence, axis: int = 0) -> Affine:
    """``np.concatenate`` for a mix of expressions and numeric arrays."""
    exprs = [Affine.lift(e) for e in items]
    w = max(e.width for e in exprs)
    exprs = [e.widened(w) for e in exprs]
    offsets = np.cumsum([0] + [e.size for e in exprs])
    idx = np.concatenate([np.arange(e.size).reshape(e.shape) + o
                          for e, o in zip(exprs, offsets)], axis=axis)
    coef = sp.vstack([e.coef for e in exprs], format="csr")
    const = np.concatenate([e.const for e in exprs])
    return Affine(coef, const, (offsets[-1],))._take(idx)


def hstack(items: Sequence) -> Affine:
    items = [Affine.lift(e) for e in items]
    return concatenate(items, axis=1 if items[0].ndim > 1 else 0)


def vstack(items: Sequence) -> Affine:
    items = [Affine.lift(e) for e in items]
    items = [e.reshape(1, e.size) if e.ndim == 1 else e for e in items]
    return concatenate(items, axis=0)


def bmat(blocks: Sequence[Sequence]) -> Affine:
    return vstack([hstack(row) for row in blocks])


def diag(v: Affine) -> Affine:
    """Square diagonal matrix expression built from a vector expression."""
    v = Affine.lift(v).ravel()
    n = v.size
    rows = np.arange(n) * (n + 1)
    P = sp.csr_matrix((np.ones(n), (rows, np.arange(n))), shape=(n * n, n))
    return Affine(P @ v.coef, P @ v.const, (n, n))


# ---------------------------------------------------------------------------
# programs


@dataclass
class Constraint:
    name: str
    kind: str  # zero | nonneg | soc | psd | power
    expr: Affine  # flat; for soc: [t, x], for power: [x, y, z] triples
    dim: int = 0  # matrix size for psd, number of triples for power
    alpha: float = 0.0

    @property
    def rows(self) -> int:
        if self.kind == "psd":
            return self.dim * (self.dim + 1) // 2
        return self.expr.size


@dataclass
class Variable:
    name: str
    offset: int
    shape: tuple


class ConeProgram:
    """Container for variables, cone constraints and an objective."""

    def __init__(self, name: str = "program"):
        self.name = name
        self.n = 0
        self.variables: dict[str, Variable] = {}
        self.constraints: list[Constraint] = []
        self.objective: Affine | None = None
        self.quadratic: sp.csc_matrix | None = None  # objective adds 0.5 x^T P x
        self.sense = "min"
        self._auto = 0

    # -- variables --------------------------------------------------------
    def variable(self, name: str, shape=()) -> Affine:
        if name in self.variables:
            raise ModelError(f"duplicate variable {name!r}")
        shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
        size = int(np.prod(shape)) if shape else 1
        self.variables[name] = Variable(name, self.n, shape)
        coef = sp.csr_matrix((np.ones(size), (np.arange(size), self.n + np.arange(size))),
                             shape=(size, self.n + size))
        self.n += size
        return Affine(coef, np.zeros(size), shape)

    def _fresh(self, prefix: str) -> str:
        self._auto += 1
        return f"{prefix}#{self._auto}"

    def _check(self, expr) -> Affine:
        expr = Affine.lift(expr)
        if not np.all(np.isfinite(expr.const)) or not np.all(np.isfinite(expr.coef.data)):
            raise ModelError("non-finite data in expression")
        return expr

    # -- constraints ------------------------------------------------------
    def add_zero(self, expr, name: str | None = None) -> Constraint:
        c = Constraint(name or self._fresh("eq"), "zero", self._check(expr).ravel())
        self.constraints.append(c)
        return c

    def add_nonneg(self, expr, name: str | None = None) -> Constraint:
        c = Constraint(name or self._fresh("ineq"), "nonneg", self._check(expr).ravel())
        self.constraints.append(c)
        return c

    def add_leq(self, lhs, rhs, name: str | None = None) -> Constraint:
        return self.add_nonneg(Affine.lift(rhs) - lhs, name)

    def add_soc(self, t, x, name: str | None = None) -> Constraint:
        """``||x||_2 <= t`` for a scalar ``t``."""
        t = self._check(t).ravel()
        if t.size != 1:
            raise ModelError("second-order cone needs a scalar bound")
        expr = concatenate([t, self._check(x).ravel()])
        c = Constraint(name or self._fresh("soc"), "soc", expr)
        self.constraints.append(c)
        return c

    def add_rotated_soc(self, a, b, x, name: str | None = None) -> Constraint:
        """``||x||^2 <= a * b`` with ``a, b >= 0``, via ``||(2x, a-b)|| <= a+b``."""
        a = Affine.lift(a).ravel()
        b = Affine.lift(b).ravel()
        x = Affine.lift(x).ravel()
        return self.add_soc(a + b, concatenate([2.0 * x, a - b]), name)

    def add_psd(self, M, name: str | None = None) -> Constraint:
        M = self._check(M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ModelError(f"semidefinite constraint needs a square matrix, got {M.shape}")
        c = Constraint(name or self._fresh("psd"), "psd", M.ravel(), dim=M.shape[0])
        self.constraints.append(c)
        return c

    def add_power(self, x, y, z, alpha: float, name: str | None = None) -> Constraint:
        """Componentwise ``x^alpha * y^(1-alpha) >= |z|``, ``x, y >= 0``."""
        if not 0.0 < alpha < 1.0:
            raise ModelError("power cone exponent must lie in (0, 1)")
        x, y, z = (self._check(e).ravel() for e in (x, y, z))
        k = max(x.size, y.size, z.size)
        x, y, z = (e if e.size == k else e + np.zeros(k) for e in (x, y, z))
        triples = concatenate([x.reshape(k, 1), y.reshape(k, 1), z.reshape(k, 1)], axis=1)
        c = Constraint(name or self._fresh("pow"), "power", triples.ravel(), dim=k, alpha=alpha)
        self.constraints.append(c)
        return c

    def add_norm_leq(self, x, p: ExponentLike, t, name: str | None = None) -> None:
        """Epigraph ``||x||_p <= t`` for any exponent ``p >= 1``."""
        p = exponent(p)
        x = Affine.lift(x).ravel()
        t = Affine.lift(t).ravel()
        name = name or self._fresh("norm")
        k = x.size
        if k == 0:
            self.add_nonneg(t, name)
            return
        if p == 2:
            self.add_soc(t, x, name)
        elif p == INF:
            self.add_nonneg(concatenate([t - x, t + x]), name)
        elif p == 1:
            u = self.variable(self._fresh(name + ".abs"), k)
            self.add_nonneg(concatenate([u - x, u + x]), name + ".abs")
            self.add_nonneg(t - u.sum(), name)
        else:
            r = self.variable(self._fresh(name + ".pow"), k)
            self.add_power(r, t + np.zeros(k), x, 1.0 / float(p), name + ".pow")
            self.add_zero(r.sum() - t, name)

    def add_geo_mean_hypograph(self, t, x, name: str | None = None) -> None:
        """``t <= (prod x_i)^(1/k)`` with ``x >= 0``, as a tree of rotated cones."""
        t = Affine.lift(t).ravel()
        x = Affine.lift(x).ravel()
        name = name or self._fresh("geomean")
        k = x.size
        self.add_nonneg(x, name + ".dom")
        if k == 1:
            self.add_nonneg(x - t, name)
            return
        size = 1 << (k - 1).bit_length()
        level = [x[i] for i in range(k)] + [t] * (size - k)
        depth = 0
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level), 2):
                y = self.variable(self._fresh(f"{name}.l{depth}"), ())
                self.add_rotated_soc(level[i], level[i + 1], y, f"{name}.l{depth}.{i // 2}")
                nxt.append(y)
            level = nxt
            depth += 1
        self.add_nonneg(level[0] - t, name)

    # -- objective --------------------------------------------------------
    def minimize(self, expr, quadratic=None) -> None:
        self.objective = Affine.lift(expr).ravel()
        if self.objective.size != 1:
            raise ModelError("objective must be scalar")
        self.quadratic = None if quadratic is None else sp.csc_matrix(quadratic)
        self.sense = "min"

    def maximize(self, expr) -> None:
        self.minimize(-Affine.lift(expr))
        self.sense = "max"

    # -- solving ----------------------------------------------------------
    def solve(self, feas_tol: float = 1e-8, gap_tol: float = 1e-8, max_iter: int = 200,
              verbose: bool = False) -> "Solution":
        return solve(self, feas_tol=feas_tol, gap_tol=gap_tol, max_iter=max_iter, verbose=verbose)


def _svec_map(k: int) -> sp.csr_matrix:
    """Rows map a C-order k*k matrix to Clarabel's scaled upper-triangle svec."""
    rows, cols, vals = [], [], []
    r = 0
    for j in range(k):
        for i in range(j + 1):
            if i == j:
                rows.append(r), cols.append(i * k + j), vals.append(1.0)
            else:
                h = _SQRT2 / 2.0
                rows += [r, r]
                cols += [i * k + j, j * k + i]
                vals += [h, h]
            r += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(r, k * k))


def _svec_to_matrix(v: np.ndarray, k: int) -> np.ndarray:
    M = np.zeros((k, k))
    r = 0
    for j in range(k):
        for i in range(j + 1):
            M[i, j] = M[j, i] = v[r] if i == j else v[r] / _SQRT2
            r += 1
    return M


@dataclass
class Solution:
    """Solver outcome.

    ``status`` is one of ``optimal``, ``infeasible``, ``unbounded`` or
    ``numerical_failure``.  ``objective`` is reported in the sense the program
    was posed (a maximization returns the maximum).
    """

    status: str
    x: np.ndarray
    objective: float
    dual_objective: float
    duals: dict = field(default_factory=dict)
    iterations: int = 0
    solve_time: float = 0.0
    raw_status: str = ""
    program: ConeProgram | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"

    def value(self, expr) -> np.ndarray:
        if isinstance(expr, Affine):
            return expr.value(self.x)
        return np.asarray(expr)

    def __getitem__(self, name: str) -> np.ndarray:
        v = self.program.variables[name]
        size = int(np.prod(v.shape)) if v.shape else 1
        return self.x[v.offset:v.offset + size].reshape(v.shape)


_STATUS = {
    "Solved": "optimal",
    "PrimalInfeasible": "infeasible",
    "AlmostPrimalInfeasible": "infeasible",
    "DualInfeasible": "unbounded",
    "AlmostDualInfeasible": "unbounded",
}


def _assemble(program: ConeProgram):
    n = program.n
    blocks_A, blocks_b, cones = [], [], []
    for c in program.constraints:
        e = c.expr.widened(n)
        if c.kind == "zero":
            A, b = e.coef, e.const
            cones.append(clarabel.ZeroConeT(c.rows))
        elif c.kind == "nonneg":
            A, b = e.coef, e.const
            cones.append(clarabel.NonnegativeConeT(c.rows))
        elif c.kind == "soc":
            A, b = e.coef, e.const
            cones.append(clarabel.SecondOrderConeT(c.rows))
        elif c.kind == "psd":
            S = _svec_map(c.dim)
            A, b = S @ e.coef, S @ e.const
            cones.append(clarabel.PSDTriangleConeT(c.dim))
        elif c.kind == "power":
            A, b = e.coef, e.const
            cones += [clarabel.PowerConeT(c.alpha)] * c.dim
        else:  # pragma: no cover - guarded by the add_* methods
            raise ModelError(f"unknown cone {c.kind}")
        if c.rows:
            blocks_A.append(-A)
            blocks_b.append(b)
        else:
            cones.pop()
    if blocks_A:
        A = sp.vstack(blocks_A, format="csc")
        b = np.concatenate(blocks_b)
    else:
        A = sp.csc_matrix((0, n))
        b = np.zeros(0)
    obj = program.objective.widened(n) if program.objective is not None else Affine.constant(0.0, n)
    q = np.asarray(obj.coef.todense()).ravel() if obj.coef.nnz else np.zeros(n)
    P = program.quadratic if program.quadratic is not None else sp.csc_matrix((n, n))
    return sp.triu(P, format="csc"), q, float(obj.const[0]), A, b, cones


def solve(program: ConeProgram, feas_tol: float = 1e-8, gap_tol: float = 1e-8,
          max_iter: int = 200, verbose: bool = False) -> Solution:
    """Solve ``program`` with Clarabel and map the outcome onto :class:`Solution`."""
    P, q, q0, A, b, cones = _assemble(program)
    settings = clarabel.DefaultSettings()
    settings.verbose = verbose
    settings.tol_feas = feas_tol
    settings.tol_gap_abs = gap_tol
    settings.tol_gap_rel = gap_tol
    settings.max_iter = max_iter
    t0 = time.perf_counter()
    solver = clarabel.DefaultSolver(P, q, A, b, cones, settings)
    res = solver.solve()
    elapsed = time.perf_counter() - t0
    raw = str(res.status).split(".")[-1]
    status = _STATUS.get(raw, "numerical_failure")
    x = np.asarray(res.x, dtype=float)
    sign = -1.0 if program.sense == "max" else 1.0
    obj = sign * (res.obj_val + q0) if status == "optimal" else math.nan
    dobj = sign * (res.obj_val_dual + q0) if status == "optimal" else math.nan
    duals = {}
    z = np.asarray(res.z, dtype=float)
    r = 0
    for c in program.constraints:
        seg = z[r:r + c.rows]
        duals[c.name] = _svec_to_matrix(seg, c.dim) if c.kind == "psd" else seg.copy()
        r += c.rows
    return Solution(status, x, obj, dobj, duals, int(res.iterations), elapsed, raw, program)


@dataclass
class Violation:
    name: str
    kind: str
    magnitude: float


def constraint_residual(c: Constraint, x: np.ndarray) -> float:
    """Largest amount by which ``x`` violates ``c`` (0 when satisfied)."""
    v = c.expr.value(x).ravel()
    if c.kind == "zero":
        return float(np.max(np.abs(v), initial=0.0))
    if c.kind == "nonneg":
        return float(max(0.0, -np.min(v, initial=0.0)))
    if c.kind == "soc":
        return float(max(0.0, np.linalg.norm(v[1:]) - v[0]))
    if c.kind == "psd":
        M = v.reshape(c.dim, c.dim)
        M = 0.5 * (M + M.T)
        return float(max(0.0, -np.linalg.eigvalsh(M)[0])) if c.dim else 0.0
    if c.kind == "power":
        t = v.reshape(c.dim, 3)
        xs, ys, zs = t[:, 0], t[:, 1], t[:, 2]
        neg = max(0.0, -xs.min(initial=0.0), -ys.min(initial=0.0))
        prod = np.maximum(xs, 0) ** c.alpha * np.maximum(ys, 0) ** (1 - c.alpha)
        return float(max(neg, np.max(np.abs(zs) - prod, initial=0.0)))
    raise ModelError(f"unknown cone {c.kind}")


def verify_solution(program: ConeProgram, solution: Solution | np.ndarray,
                    tol: float = 1e-8) -> list[Violation]:
    """Recompute every constraint residual with numpy.

    A constraint is reported when its residual exceeds
    ``tol * (1 + max|constant term|)``; the reported magnitude is the raw
    residual.  An empty list means the point is feasible at ``tol``.
    """
    x = solution.x if isinstance(solution, Solution) else np.asarray(solution, dtype=float)
    x = np.concatenate([x, np.zeros(max(0, program.n - x.size))])
    out = []
    for c in program.constraints:
        res = constraint_residual(c, x)
        scale = 1.0 + float(np.max(np.abs(c.expr.const), initial=0.0))
        if res > tol * scale:
            out.append(Violation(c.name, c.kind, res))
    return out


def dump(program: ConeProgram) -> str:
    """Plain-text sparse listing of a program, one line per constraint row block."""
    def fmt(e: Affine) -> str:
        e = e.widened(program.n)
        coo = e.coef.tocoo()
        rows = []
        for r in range(e.size):
            mask = coo.row == r
            terms = " ".join(f"{j}:{v:.17g}" for j, v in zip(coo.col[mask], coo.data[mask]))
            rows.append(f"[{terms} | {e.const[r]:.17g}]")
        return " ".join(rows)

    lines = [f"program {program.name} vars {program.n} sense {program.sense}"]
    for v in program.variables.values():
        lines.append(f"var {v.name} offset {v.offset} shape {list(v.shape)}")
    if program.objective is not None:
        lines.append(f"objective {fmt(program.objective)}")
    for c in program.constraints:
        extra = f" dim {c.dim}" if c.kind in ("psd", "power") else ""
        extra += f" alpha {c.alpha:.17g}" if c.kind == "power" else ""
        lines.append(f"con {c.name} {c.kind}{extra} {fmt(c.expr)}")
    return "\n".join(lines) + "\n"
