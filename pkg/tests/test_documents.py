import math

import numpy as np
import pytest

from ellipsotope.containment import ContainmentResult
from ellipsotope.documents import (DOCUMENT_TYPES, ControllerDocument, DocumentError,
                                   MatrixDocument, ProblemDocument, ResultDocument, SetDocument,
                                   dumps, exponent_json, format_number, loads, parse, serialize)
from ellipsotope.norms import INF
from ellipsotope.sets import Ellipsotope
from helpers import platoon_k2, random_document


def test_number_format():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(INF) == '"inf"' and format_number(-INF) == '"-inf"'
    assert format_number(-0.0) == "-0.0"
    assert format_number(True) == "true" and format_number(np.int64(3)) == "3"
    with pytest.raises(DocumentError):
        format_number(math.nan)


def test_exponent_json():
    assert exponent_json(INF) == "inf"
    assert exponent_json(2) == 2
    assert exponent_json(1.5) == 1.5
    assert exponent_json("4/3") == "4/3"


def test_set_document_schema():
    doc = SetDocument(Ellipsotope(INF, [[1.0, 2.0], [0.0, 1.0]], [0.5, -1.0]), "box")
    d = loads(serialize(doc))
    assert d == {"kind": "ellipsotope", "p": "inf", "center": [0.5, -1.0],
                 "generators": [[1.0, 0.0], [2.0, 1.0]], "name": "box"}
    assert parse(serialize(doc)) == doc
    assert parse(serialize(doc)).set.p == INF


@pytest.mark.parametrize("text", [
    "{", "[]", '{"kind": "ellipsotope"}',
    '{"kind": "ellipsotope", "p": 0.5, "center": [0], "generators": [[1]]}',
    '{"kind": "ellipsotope", "p": 2, "center": [0, 0], "generators": [[1]]}',
    '{"kind": "ellipsotope", "p": 2, "center": [0], "generators": []}',
    '{"kind": "ellipsotope", "p": 2, "center": ["x"], "generators": [[1]]}',
    '{"kind": "ellipsotope", "p": true, "center": [0], "generators": [[1]]}',
    '{"kind": "ellipsotope", "p": 2, "center": [0], "generators": [[1]], "name": 3}',
    '{"kind": "matrix", "rows": [[1, 2], [3]]}',
    '{"kind": "matrix", "rows": []}',
    '{"kind": "containment-result", "r_lower": 2, "r_upper": 1, "verdict": "unknown", "method": "lr"}',
    '{"kind": "containment-result", "r_lower": 0, "r_upper": 1, "verdict": "maybe", "method": "lr"}',
    '{"kind": "safeset-problem", "A": [[0]], "B": [[1]], "X": {"Lambda": [], "lam": []},'
    ' "U": {"Lambda": [[1], [-1]], "lam": [1, 1]}, "t_end": -1, "N_ts": 3}',
    '{"kind": "platoon", "k": 1}',
    '{"kind": "platoon", "k": "two"}',
    '{"kind": "controller", "q": 3, "K": [[1]], "c_u": [[0]], "U_blocks": [[[0]]],'
    ' "G_T": [[1]], "c_T": [0], "t_end": 1}',
    '{"kind": "wat"}',
])
def test_malformed_documents(text):
    with pytest.raises(DocumentError):
        parse(text)


def test_platoon_shorthand():
    doc = ProblemDocument.from_dict({"kind": "platoon", "k": 2, "template": "ellipsoid"})
    assert doc.problem.template == "ellipsoid" and doc.problem.N_ts == 30
    doc = ProblemDocument.from_dict({"kind": "platoon", "k": 2}, template="zonotope")
    assert doc.problem.m == 10


def test_bare_matrix_list():
    assert np.array_equal(MatrixDocument.from_dict([[1, 2], [3, 4]]).matrix, [[1, 2], [3, 4]])


def test_result_document_from_result():
    res = ContainmentResult(1.0, INF, "fallback", witness={"alpha": np.array([1.0, -1.0])})
    doc = ResultDocument.from_result(res, 0.25, {"nan": math.nan})
    d = loads(serialize(doc))
    assert d["r_upper"] == "inf" and d["timing"] == 0.25 and d["diagnostics"]["nan"] == "nan"
    assert parse(serialize(doc)) == doc


def test_controller_document_from_synthesis():
    _, res = platoon_k2("ellipsoid")
    doc = ControllerDocument(res.controller)
    back = parse(serialize(doc))
    assert back == doc
    G = back.controller.G_T
    assert G.shape[0] == G.shape[1] and np.linalg.matrix_rank(G) == G.shape[0]


def test_dumps_is_deterministic():
    obj = {"b": [1.5, INF], "a": {"z": np.arange(3.0)}}
    assert dumps(obj) == dumps(obj)
    assert list(loads(dumps(obj)).keys()) == ["b", "a"]


def test_round_trip_over_random_documents():
    rng = np.random.default_rng(2024)
    seen = set()
    for _ in range(1000):
        doc = random_document(rng)
        seen.add(type(doc))
        text = serialize(doc)
        back = parse(text)
        assert type(back) is type(doc)
        assert back == doc, text
        assert serialize(back) == text
    assert seen == set(DOCUMENT_TYPES.values())
