"""JSON documents for sets, matrices, results, safe-set problems and controllers.

Floats are written with 17 significant digits so every finite double
round-trips exactly; infinities are the strings ``"inf"``/``"-inf"``.
Exponents that are not exactly representable as a double are written as
fraction strings such as ``"4/3"``.  Generators are stored column by column.
Output is deterministic: keys keep a fixed order and nothing depends on the
clock unless a caller adds it explicitly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .containment import ContainmentResult
from .norms import INF, exponent, format_exponent
from .safeset import Controller, LtiSystem, SafeSetProblem, platoon_benchmark
from .sets import Ellipsotope, HPolyhedron


class DocumentError(ValueError):
    """Malformed or inconsistent document."""


# ---------------------------------------------------------------------------
# encoding


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        raise DocumentError("NaN cannot be serialized")
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        # "-0" would read back as the integer 0
        return "-0.0" if math.copysign(1.0, x) < 0 else "0.0"
    return "%.17g" % x


def _encode(obj, indent: int, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        return format_number(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        pad = " " * (indent * (level + 1))
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * (indent * level) + "}"
    raise DocumentError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text for dicts, lists, strings, numbers and arrays."""
    return _encode(obj, indent, 0) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc


def read_json(path):
    try:
        with open(path) as fh:
            return loads(fh.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# decoding helpers


def _number(v, what: str, allow_inf: bool = False) -> float:
    if isinstance(v, str) and allow_inf and v in ("inf", "-inf"):
        return INF if v == "inf" else -INF
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DocumentError(f"{what}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v) and not allow_inf:
        raise DocumentError(f"{what}: non-finite value")
    return v


def _vector(v, what: str) -> np.ndarray:
    if not isinstance(v, list):
        raise DocumentError(f"{what}: expected an array")
    return np.array([_number(e, what) for e in v], dtype=float)


def _matrix(v, what: str, rows: int | None = None) -> np.ndarray:
    """Matrix from a list of rows.  An empty list needs ``rows`` for its shape."""
    if not isinstance(v, list):
        raise DocumentError(f"{what}: expected an array of arrays")
    if not v:
        return np.zeros((rows or 0, 0))
    out = [_vector(r, what) for r in v]
    if len({r.size for r in out}) != 1:
        raise DocumentError(f"{what}: ragged rows")
    return np.array(out, dtype=float).reshape(len(out), out[0].size)


def _exponent(v, what: str = "p"):
    if isinstance(v, bool):
        raise DocumentError(f"{what}: not an exponent")
    try:
        return exponent(v)
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"{what}: {exc}") from exc


def exponent_json(p):
    s = format_exponent(p)
    if s == "inf" or "/" in s:
        return s
    f = Fraction(s)
    return int(f) if f.denominator == 1 else float(s)


def _require(d, key: str, kind: str):
    if not isinstance(d, dict):
        raise DocumentError(f"{kind} document must be an object")
    if key not in d:
        raise DocumentError(f"{kind} document lacks {key!r}")
    return d[key]


def _check_kind(d, kind: str) -> None:
    if _require(d, "kind", kind) != kind:
        raise DocumentError(f"expected kind {kind!r}, got {d.get('kind')!r}")


def _eq_arrays(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.array_equal(a, b)


# ---------------------------------------------------------------------------
# documents


@dataclass(eq=False)
class SetDocument:
    set: Ellipsotope
    name: str | None = None

    def to_dict(self) -> dict:
        d = {"kind": "ellipsotope", "p": exponent_json(self.set.p), "center": self.set.c,
             "generators": self.set.G.T}
        if self.name is not None:
            d["name"] = self.name
        return d

    @staticmethod
    def from_dict(d) -> "SetDocument":
        _check_kind(d, "ellipsotope")
        p = _exponent(_require(d, "p", "ellipsotope"))
        c = _vector(_require(d, "center", "ellipsotope"), "center")
        cols = _matrix(_require(d, "generators", "ellipsotope"), "generators")
        if cols.size == 0 or cols.shape[1] != c.size:
            raise DocumentError(f"generators must be nonempty columns of length {c.size}")
        name = d.get("name")
        if name is not None and not isinstance(name, str):
            raise DocumentError("name must be a string")
        try:
            E = Ellipsotope(p, cols.T, c)
        except ValueError as exc:
            raise DocumentError(str(exc)) from exc
        return SetDocument(E, name)

    def __eq__(self, other) -> bool:
        return isinstance(other, SetDocument) and self.set == other.set and self.name == other.name


@dataclass(eq=False)
class MatrixDocument:
    matrix: np.ndarray

    def to_dict(self) -> dict:
        return {"kind": "matrix", "rows": self.matrix}

    @staticmethod
    def from_dict(d) -> "MatrixDocument":
        if isinstance(d, list):
            M = _matrix(d, "matrix")
        else:
            _check_kind(d, "matrix")
            M = _matrix(_require(d, "rows", "matrix"), "rows")
        if M.size == 0:
            raise DocumentError("matrix is empty")
        return MatrixDocument(M)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixDocument) and _eq_arrays(self.matrix, other.matrix)


def _jsonable(v):
    """Plain JSON values for witness and diagnostics blocks."""
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        # keep free-form blocks round-trippable: non-finite values become strings
        return v if math.isfinite(v) else str(v)
    if v is None or isinstance(v, (int, str)):
        return v
    return str(v)


@dataclass(eq=False)
class ResultDocument:
    r_lower: float
    r_upper: float
    verdict: str
    method: str
    exact: bool = False
    certificate: bool = False
    witness: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    timing: float | None = None

    @staticmethod
    def from_result(res: ContainmentResult, timing: float | None = None,
                    diagnostics: dict | None = None) -> "ResultDocument":
        wit = {k: np.asarray(v, dtype=float) for k, v in res.witness.items()
               if isinstance(v, (np.ndarray, list, float, int)) and np.ndim(v) <= 2}
        return ResultDocument(res.r_lower, res.r_upper, res.verdict, res.method, bool(res.exact),
                              bool(res.certificate), wit, [str(n) for n in res.notes],
                              _jsonable(diagnostics or {}), timing)

    def to_dict(self) -> dict:
        d = {"kind": "containment-result", "r_lower": self.r_lower, "r_upper": self.r_upper,
             "verdict": self.verdict, "method": self.method, "exact": self.exact,
             "certificate": self.certificate,
             "witness": {k: np.asarray(v).tolist() for k, v in self.witness.items()},
             "notes": list(self.notes), "diagnostics": self.diagnostics}
        if self.timing is not None:
            d["timing"] = self.timing
        return d

    @staticmethod
    def from_dict(d) -> "ResultDocument":
        _check_kind(d, "containment-result")
        lo = _number(_require(d, "r_lower", "result"), "r_lower", allow_inf=True)
        hi = _number(_require(d, "r_upper", "result"), "r_upper", allow_inf=True)
        if lo > hi:
            raise DocumentError("r_lower exceeds r_upper")
        verdict = _require(d, "verdict", "result")
        if verdict not in ("contained", "not_contained", "unknown"):
            raise DocumentError(f"unknown verdict {verdict!r}")
        wit = {}
        for k, v in d.get("witness", {}).items():
            if isinstance(v, list) and v and isinstance(v[0], list):
                wit[k] = _matrix(v, k)
            elif isinstance(v, list):
                wit[k] = _vector(v, k)
            else:
                wit[k] = np.asarray(_number(v, k, allow_inf=True))
        timing = d.get("timing")
        return ResultDocument(lo, hi, verdict, str(_require(d, "method", "result")),
                              bool(d.get("exact", False)), bool(d.get("certificate", False)), wit,
                              list(d.get("notes", [])), d.get("diagnostics", {}),
                              None if timing is None else _number(timing, "timing"))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultDocument):
            return False
        return (self.r_lower == other.r_lower and self.r_upper == other.r_upper
                and self.verdict == other.verdict and self.method == other.method
                and self.exact == other.exact and self.certificate == other.certificate
                and self.witness.keys() == other.witness.keys()
                and all(_eq_arrays(self.witness[k], other.witness[k]) for k in self.witness)
                and self.notes == other.notes and self.diagnostics == other.diagnostics
                and self.timing == other.timing)


def _poly_dict(P: HPolyhedron) -> dict:
    return {"Lambda": P.Lambda, "lam": P.lam}


def _poly(d, what: str, n: int) -> HPolyhedron:
    L = _matrix(_require(d, "Lambda", what), what + ".Lambda")
    lam = _vector(_require(d, "lam", what), what + ".lam")
    if L.size == 0:
        L = np.zeros((0, n))
    if L.shape[1] != n or L.shape[0] != lam.size:
        raise DocumentError(f"{what}: expected Lambda with {n} columns and one offset per row")
    return HPolyhedron(L, lam)


@dataclass(eq=False)
class ProblemDocument:
    problem: SafeSetProblem

    def to_dict(self) -> dict:
        p = self.problem
        s = p.system
        return {"kind": "safeset-problem", "A": s.A, "B": s.B, "E": s.E, "chi": s.chi,
                "X": _poly_dict(p.X), "U": _poly_dict(p.U), "G_W": p.G_W, "t_end": p.t_end,
                "N_ts": p.N_ts, "eta": p.eta, "template": p.template, "m": p.m,
                "lqr_Q": p.lqr_Q, "lqr_Rw": p.lqr_Rw, "substeps": p.substeps}

    @staticmethod
    def from_dict(d, template: str | None = None) -> "ProblemDocument":
        kind = _require(d, "kind", "problem")
        try:
            if kind == "platoon":
                k = d.get("k")
                if not isinstance(k, int) or isinstance(k, bool):
                    raise DocumentError("platoon k must be an integer")
                return ProblemDocument(platoon_benchmark(
                    k, template or d.get("template", "zonotope"),
                    eta=_int(d.get("eta", 4), "eta"), substeps=_int(d.get("substeps", 10), "substeps")))
            if kind != "safeset-problem":
                raise DocumentError(f"unknown problem kind {kind!r}")
            A = _matrix(_require(d, "A", "problem"), "A")
            n = A.shape[0]
            B = _matrix(_require(d, "B", "problem"), "B", n)
            E = _matrix(d.get("E", []), "E", n)
            chi = _vector(d.get("chi", [0.0] * n), "chi")
            sysm = LtiSystem(A, B.reshape(n, -1), E.reshape(n, -1), chi)
            G_W = _matrix(d.get("G_W", []), "G_W", sysm.n_w)
            m = d.get("m")
            prob = SafeSetProblem(
                sysm, _poly(_require(d, "X", "problem"), "X", n),
                _poly(_require(d, "U", "problem"), "U", sysm.n_u),
                G_W, _number(_require(d, "t_end", "problem"), "t_end"),
                _int(_require(d, "N_ts", "problem"), "N_ts"), _int(d.get("eta", 4), "eta"),
                template or d.get("template", "zonotope"), None if m is None else _int(m, "m"),
                _matrix(d["lqr_Q"], "lqr_Q") if "lqr_Q" in d else None,
                _matrix(d["lqr_Rw"], "lqr_Rw") if "lqr_Rw" in d else None,
                _int(d.get("substeps", 10), "substeps"))
        except DocumentError:
            raise
        except ValueError as exc:
            raise DocumentError(str(exc)) from exc
        return ProblemDocument(prob)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemDocument):
            return False
        a, b = self.to_dict(), other.to_dict()
        return all(_deep_eq(a[k], b[k]) for k in a) and a.keys() == b.keys()


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"{what} must be an integer")
    return v


def _deep_eq(a, b) -> bool:
    if isinstance(a, dict):
        return isinstance(b, dict) and a.keys() == b.keys() and all(_deep_eq(a[k], b[k]) for k in a)
    if isinstance(a, (np.ndarray, list)):
        return _eq_arrays(a, b)
    return a == b


@dataclass(eq=False)
class ControllerDocument:
    controller: Controller

    def to_dict(self) -> dict:
        c = self.controller
        return {"kind": "controller", "q": exponent_json(c.q), "K": c.K, "c_u": c.c_u,
                "U_blocks": c.U_blocks, "G_T": c.G_T, "c_T": c.c_T, "t_end": c.t_end}

    @staticmethod
    def from_dict(d) -> "ControllerDocument":
        _check_kind(d, "controller")
        K = _matrix(_require(d, "K", "controller"), "K")
        c_u = _matrix(_require(d, "c_u", "controller"), "c_u")
        blocks = _require(d, "U_blocks", "controller")
        if not isinstance(blocks, list):
            raise DocumentError("U_blocks must be a list of matrices")
        U = [_matrix(b, "U_blocks", K.shape[0]) for b in blocks]
        if len({u.shape for u in U}) > 1:
            raise DocumentError("U_blocks must share one shape")
        G_T = _matrix(_require(d, "G_T", "controller"), "G_T")
        c_T = _vector(_require(d, "c_T", "controller"), "c_T")
        try:
            ctl = Controller(K, c_u.reshape(len(U), -1), np.array(U).reshape(len(U), K.shape[0], -1),
                             _exponent(_require(d, "q", "controller"), "q"), G_T, c_T,
                             _number(_require(d, "t_end", "controller"), "t_end"))
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise DocumentError(str(exc)) from exc
        return ControllerDocument(ctl)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ControllerDocument):
            return False
        a, b = self.to_dict(), other.to_dict()
        return a.keys() == b.keys() and all(_deep_eq(a[k], b[k]) for k in a)


DOCUMENT_TYPES = {
    "ellipsotope": SetDocument,
    "matrix": MatrixDocument,
    "containment-result": ResultDocument,
    "safeset-problem": ProblemDocument,
    "controller": ControllerDocument,
}


def serialize(doc) -> str:
    return dumps(doc.to_dict())


def parse(text: str):
    """Parse any document type by its ``kind`` field."""
    d = loads(text)
    kind = d.get("kind") if isinstance(d, dict) else None
    if kind not in DOCUMENT_TYPES:
        raise DocumentError(f"unknown document kind {kind!r}")
    return DOCUMENT_TYPES[kind].from_dict(d)
