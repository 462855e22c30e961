"""Command-line front end.

Exit codes: 0 contained (or success), 1 not contained, 2 unknown,
3 no safe set found, 64 unusable input, 70 solver failure.
Set ``ELLIPSOTOPE_SOLVER_TOL`` to override the conic solver tolerance used by
``safeset``.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .containment import SolverFailure, containment_radius, verdict_from_bounds
from .documents import (ControllerDocument, DocumentError, MatrixDocument, ProblemDocument,
                        ResultDocument, SetDocument, _jsonable, dumps, exponent_json, read_json)
from .hardness import BisectionConfig, p_to_1_norm_via_bisection
from .norms import INF, NormBudget, exponent, lpq_norm, operator_norm_oracle
from .oracles import OracleBudget, opnorm_p_to_1_oracle
from .safeset import LqrFailure, ReachError, synthesize_safe_set

EXIT_CONTAINED, EXIT_NOT_CONTAINED, EXIT_UNKNOWN = 0, 1, 2
EXIT_INFEASIBLE, EXIT_USAGE, EXIT_SOFTWARE = 3, 64, 70
VERDICT_EXIT = {"contained": EXIT_CONTAINED, "not_contained": EXIT_NOT_CONTAINED,
                "unknown": EXIT_UNKNOWN}
CLI_METHODS = ("auto", "lr", "zsr", "sr", "exact", "bruteforce")
TOL_ENV = "ELLIPSOTOPE_SOLVER_TOL"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _exponent_arg(s: str):
    try:
        return exponent(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _load_set(path) -> SetDocument:
    return SetDocument.from_dict(read_json(path))


def cmd_contain(args) -> int:
    a, b = _load_set(args.inbody).set, _load_set(args.circumbody).set
    if a.n != b.n:
        raise DocumentError(f"inbody lives in R^{a.n} but circumbody in R^{b.n}")
    budget = OracleBudget(max_enumeration_columns=args.oracle_limit)
    t0 = time.perf_counter()
    res = containment_radius(a, b, args.method, budget)
    elapsed = time.perf_counter() - t0
    res.verdict = verdict_from_bounds(res.r_lower, res.r_upper, args.tol)
    doc = ResultDocument.from_result(res, elapsed if args.timing else None)
    _emit(doc.to_dict())
    return VERDICT_EXIT[res.verdict]


def cmd_norm(args) -> int:
    A = MatrixDocument.from_dict(read_json(args.matrix)).matrix
    out = {"kind": "norm", "norm_kind": args.kind, "p": exponent_json(args.p),
           "q": exponent_json(args.q)}
    if args.kind == "lpq":
        out.update(value=lpq_norm(A, args.p, args.q), exact=True, method="closed-form")
    else:
        est = operator_norm_oracle(A, args.p, args.q, NormBudget(max_enumeration=args.oracle_limit))
        out.update(value=est.value, exact=est.exact, method=est.method, argmax=est.argmax)
    _emit(out)
    return 0


def _projection_boundary(T, count: int = 256) -> np.ndarray:
    """Boundary points of the projection of ``T`` onto its first two coordinates."""
    G2 = T.G[:2]
    c2 = T.c[:2]
    ang = 2 * np.pi * np.arange(count) / count
    pts = []
    for th in ang:
        ell = np.array([math.cos(th), math.sin(th)])
        g = G2.T @ ell
        if T.p == INF:
            alpha = np.where(g >= 0, 1.0, -1.0)
        else:
            nrm = np.linalg.norm(g)
            alpha = g / nrm if nrm > 0 else np.zeros_like(g)
        pts.append(c2 + G2 @ alpha)
    out = [pts[0]]
    for p in pts[1:]:
        if not np.allclose(p, out[-1], rtol=0, atol=1e-12):
            out.append(p)
    return np.array(out)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["%.17g" % v for v in r])


def cmd_safeset(args) -> int:
    problem = ProblemDocument.from_dict(read_json(args.problem), args.template).problem
    tol = os.environ.get(TOL_ENV)
    try:
        feas_tol = float(tol) if tol else 1e-8
    except ValueError as exc:
        raise DocumentError(f"{TOL_ENV} is not a number: {tol!r}") from exc
    res = synthesize_safe_set(problem, feas_tol=feas_tol)
    diag = {k: v for k, v in res.diagnostics.items() if args.timing or not k.endswith("_time")}
    summary = {"kind": "safeset-result", "status": res.status, "message": res.message,
               "template": problem.template, "diagnostics": _jsonable(diag)}
    if res.status == "infeasible":
        _emit(summary)
        return EXIT_INFEASIBLE
    if res.status == "failed":
        _emit(summary)
        return EXIT_SOFTWARE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "T.json").write_text(dumps(SetDocument(res.T, "T").to_dict()))
    (out / "T_hat.json").write_text(dumps(SetDocument(res.T_hat, "T_hat").to_dict()))
    (out / "controller.json").write_text(dumps(ControllerDocument(res.controller).to_dict()))
    (out / "diagnostics.json").write_text(dumps(summary))
    n = problem.system.n_x
    rows = []
    for p in res.reach.points:
        c = p.center.value(res.x)
        G = p.gens.value(res.x)
        rad = np.abs(G).sum(axis=1) + np.abs(p.dist).sum(axis=1)
        rows.append([p.t, *c, *rad])
    _write_csv(out / "reach.csv", ["t"] + [f"c{i + 1}" for i in range(n)]
               + [f"r{i + 1}" for i in range(n)], rows)
    _write_csv(out / "projection.csv", ["x1", "x2"], _projection_boundary(res.T))
    summary["files"] = sorted(f.name for f in out.iterdir())
    _emit(summary)
    return 0 if res.ok else EXIT_SOFTWARE


def cmd_hardness_demo(args) -> int:
    A = MatrixDocument.from_dict(read_json(args.matrix)).matrix
    if not np.any(A):
        raise DocumentError("the matrix must be nonzero")
    if args.p == 1:
        raise DocumentError("p must lie in (1, inf]")
    if not args.delta > 0:
        raise DocumentError("delta must be positive")
    Ap = A if A.shape[0] > 1 else np.vstack([A, np.zeros_like(A)])
    cfg = BisectionConfig.for_matrix(Ap, args.p, args.delta)
    res = p_to_1_norm_via_bisection(A, args.p, cfg, "oracle")
    try:
        ref = opnorm_p_to_1_oracle(A, args.p)
        oracle, exact = ref.value, ref.exact
    except Exception:  # noqa: BLE001 - the report still stands without a reference
        oracle, exact = None, False
    _emit({"kind": "hardness-demo", "p": exponent_json(args.p), "delta": args.delta,
           "xi_star": res.xi, "oracle": oracle, "oracle_exact": exact,
           "relative_error": None if oracle is None else abs(res.xi / oracle - 1),
           "iterations": res.iterations, "exit": res.exit, "inner_exact": res.exact_inner,
           "xi_hat": cfg.xi_hat, "mu": cfg.mu, "epsilon": cfg.epsilon,
           "log": [[xi, s] for xi, s in res.log]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ellipsotope", description="Ellipsotope containment toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("contain", help="containment radius of one set in another")
    c.add_argument("inbody")
    c.add_argument("circumbody")
    c.add_argument("--method", choices=CLI_METHODS, default="auto")
    c.add_argument("--tol", type=float, default=1e-9, help="dead band around r = 1 for the verdict")
    c.add_argument("--oracle-limit", type=int, default=20,
                   help="largest generator count for vertex enumeration")
    c.add_argument("--timing", action="store_true")
    c.set_defaults(func=cmd_contain)

    n = sub.add_parser("norm", help="mixed or operator norm of a matrix")
    n.add_argument("matrix")
    n.add_argument("--kind", choices=("lpq", "op"), default="op")
    n.add_argument("--p", type=_exponent_arg, required=True)
    n.add_argument("--q", type=_exponent_arg, required=True)
    n.add_argument("--oracle-limit", type=int, default=20)
    n.set_defaults(func=cmd_norm)

    s = sub.add_parser("safeset", help="synthesize a safe set and its controller")
    s.add_argument("problem")
    s.add_argument("--template", choices=("zonotope", "ellipsoid"), default=None)
    s.add_argument("--out", required=True)
    s.add_argument("--timing", action="store_true")
    s.set_defaults(func=cmd_safeset)

    h = sub.add_parser("hardness-demo", help="recover ||A||_{p->1} from containment queries")
    h.add_argument("matrix")
    h.add_argument("--p", type=_exponent_arg, default=INF)
    h.add_argument("--delta", type=float, default=0.05)
    h.set_defaults(func=cmd_hardness_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"ellipsotope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverFailure, LqrFailure, ReachError) as exc:
        print(f"ellipsotope: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOFTWARE
    except ValueError as exc:
        print(f"ellipsotope: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
