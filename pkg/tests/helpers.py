"""Shared fixtures data and random instance generators."""

import numpy as np

WORKED_G = np.array([[40, -54, 44, 98, -30, 12, -20, 62],
                       [-42, 12, -14, 38, 46, 88, 48, 64]]) / 100.0


def random_surjective(rng, n, l):
    while True:
        H = rng.standard_normal((n, l))
        if np.linalg.svd(H, compute_uv=False)[-1] > 0.2:
            return H


def random_spd_factor(rng, n):
    A = rng.standard_normal((n, n))
    return A + 0.5 * np.sign(np.linalg.det(A)) * np.eye(n) if abs(np.linalg.det(A)) < 0.1 else A


_PLATOON = {}


def platoon_k2(template):
    """Synthesized platoon k=2 problem and result, computed once per session."""
    from ellipsotope.safeset import platoon_benchmark, synthesize_safe_set

    if template not in _PLATOON:
        problem = platoon_benchmark(2, template)
        _PLATOON[template] = (problem, synthesize_safe_set(problem))
    return _PLATOON[template]


def _float(rng):
    kind = rng.integers(6)
    if kind == 0:
        return float(rng.choice([0.0, -0.0, 5e-324, -1e308, 1 / 3, 0.1]))
    if kind == 1:
        return float(rng.standard_normal() * 10.0 ** rng.integers(-300, 300))
    if kind == 2:
        return float(rng.integers(-5, 6))
    return float(rng.standard_normal())


def _floats(rng, shape):
    return np.array([_float(rng) for _ in range(int(np.prod(shape)))]).reshape(shape)


def _exponent(rng):
    from fractions import Fraction

    from ellipsotope.norms import INF

    return [1, 2, INF, Fraction(3, 2), Fraction(4, 3), Fraction(7, 3), 10][int(rng.integers(7))]


def random_document(rng):
    """A random document of any type, with awkward floats mixed in."""
    from ellipsotope.containment import ContainmentResult
    from ellipsotope.documents import (ControllerDocument, MatrixDocument, ProblemDocument,
                                       ResultDocument, SetDocument)
    from ellipsotope.norms import INF
    from ellipsotope.safeset import Controller, LtiSystem, SafeSetProblem
    from ellipsotope.sets import Ellipsotope, HPolyhedron

    kind = int(rng.integers(5))
    n = int(rng.integers(1, 4))
    if kind == 0:
        E = Ellipsotope(_exponent(rng), _floats(rng, (n, int(rng.integers(1, 5)))), _floats(rng, n))
        name = None if rng.integers(2) else "set-" + "αβ"[int(rng.integers(2))] + str(rng.integers(100))
        return SetDocument(E, name)
    if kind == 1:
        return MatrixDocument(_floats(rng, (n, int(rng.integers(1, 5)))))
    if kind == 2:
        lo = abs(_float(rng))
        hi = [lo, lo + abs(_float(rng)), INF][int(rng.integers(3))]
        if rng.integers(4) == 0:
            lo = hi = INF
        res = ContainmentResult(lo, hi, "lr+zsr", witness={"X": _floats(rng, (n, 3)),
                                                          "alpha": _floats(rng, 3)},
                                exact=bool(rng.integers(2)), certificate=bool(rng.integers(2)),
                                notes=["note " + str(rng.integers(10))])
        diag = {"iterations": int(rng.integers(50)), "gap": _float(rng), "nested": {"ok": True}}
        timing = None if rng.integers(2) else abs(_float(rng))
        return ResultDocument.from_result(res, timing, diag)
    if kind == 3:
        nu, nw = int(rng.integers(1, 3)), int(rng.integers(0, 3))
        sysm = LtiSystem(_floats(rng, (n, n)), _floats(rng, (n, nu)), _floats(rng, (n, nw)),
                         _floats(rng, n))
        rows = int(rng.integers(0, 3))
        X = HPolyhedron(_floats(rng, (rows, n)).reshape(rows, n), _floats(rng, rows))
        U = HPolyhedron.box(-np.ones(nu), np.ones(nu))
        template = ["zonotope", "ellipsoid"][int(rng.integers(2))]
        prob = SafeSetProblem(sysm, X, U, _floats(rng, (nw, int(rng.integers(1, 3)))),
                              float(rng.uniform(0.1, 5)), int(rng.integers(1, 40)),
                              int(rng.integers(1, 6)), template, int(rng.integers(n, n + 4)),
                              np.eye(n) * abs(_float(rng)) + np.eye(n), None,
                              int(rng.integers(1, 12)))
        return ProblemDocument(prob)
    N, nu = int(rng.integers(1, 5)), int(rng.integers(1, 3))
    q = [2, INF][int(rng.integers(2))]
    m = n if q == 2 else n + int(rng.integers(0, 3))
    G_T = np.hstack([np.eye(n) * (1 + abs(rng.standard_normal())), _floats(rng, (n, m - n))])
    ctl = Controller(_floats(rng, (nu, n)), _floats(rng, (N, nu)), _floats(rng, (N, nu, m)),
                     q, G_T, _floats(rng, n), float(rng.uniform(0.1, 5)))
    return ControllerDocument(ctl)
