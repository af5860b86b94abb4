import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshc import io
from meshc.circuit import MZI, ChipBlock, ChipLayout, Circuit, Coupling, PhaseShifter, evaluate
from meshc.compiler import compile
from meshc.core import haar_random_unitary, random_isometry
from meshc.coupled import greedy_coupled

finite = st.floats(allow_nan=False, allow_infinity=False)


def _round(obj, to, frm):
    text = io.dumps(to(obj))
    return frm(json.loads(text)), text


@given(st.lists(st.tuples(finite, finite), min_size=6, max_size=6))
def test_matrix_bit_exact(entries):
    a = np.array([complex(x, y) for x, y in entries]).reshape(2, 3)
    back, text = _round(a, io.matrix_to_json, io.matrix_from_json)
    assert back.shape == (2, 3)
    assert back.tobytes() == a.tobytes()
    assert io.dumps(io.matrix_to_json(back)) == text


@given(finite, finite, finite)
def test_circuit_bit_exact(t, p, x):
    inner = Circuit(2, [MZI((0, 1), t, p)])
    c = Circuit(
        4,
        [MZI((1, 2), t, p, adjoint=True), PhaseShifter(3, x), Coupling((2, 0, 1, 3)), ChipBlock((1, 3), inner)],
    )
    back, text = _round(c, io.circuit_to_json, io.circuit_from_json)
    assert back == c
    assert io.dumps(io.circuit_to_json(back)) == text


def test_inactive_mzi_survives():
    c = Circuit(2, [MZI((0, 1), 1.0, 2.0, active=False)])
    assert io.circuit_from_json(io.circuit_to_json(c)) == c


def test_layout_and_assignment_round_trip():
    lay = ChipLayout(4, [[(0, 1), (2, 3)], [(1, 2)], [(0, 1), (2, 3)], [(1, 2)]], False)
    back, _ = _round(lay, io.layout_to_json, io.layout_from_json)
    assert back == lay
    u = evaluate(lay.to_circuit([(0.3, 1.1)] * lay.slot_count))
    res = compile(u, lay)
    again, _ = _round(res, io.assignment_to_json, io.assignment_from_json)
    assert again == res
    assert np.allclose(evaluate(again.to_circuit()), evaluate(res.to_circuit()))


def test_coupled_round_trip():
    cc = greedy_coupled(random_isometry(8, 3, seed=4), 3)
    back, text = _round(cc, io.coupled_to_json, io.coupled_from_json)
    assert np.array_equal(back.matrix(), cc.matrix())
    assert io.dumps(io.coupled_to_json(back)) == text
    lean = greedy_coupled(random_isometry(8, 3, seed=4), 3, synthesize=False)
    assert io.coupled_from_json(io.coupled_to_json(lean)).stages[0].blocks[0].circuit is None


def test_output_deterministic():
    u = haar_random_unitary(5, seed=9)
    assert io.dumps(io.matrix_to_json(u)) == io.dumps(io.matrix_to_json(u.copy()))
    assert io.dumps({"a": 1}).endswith("\n")


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"rows": 2, "cols": 2, "data": [[[1, 0], [0, 0]], [[0, 0]]]}, "data[1]"),
        ({"rows": 1, "cols": 1, "data": [[[1, "x"]]]}, "data[0][0][1]"),
        ({"rows": 1, "cols": 1, "data": [[[1]]]}, "data[0][0]"),
        ({"rows": 1, "cols": 1}, ""),
        ({"rows": 0, "cols": 1, "data": []}, "rows"),
        ({"rows": True, "cols": 1, "data": []}, "rows"),
    ],
)
def test_matrix_errors_located(doc, where):
    with pytest.raises(io.FormatError) as e:
        io.matrix_from_json(doc)
    assert e.value.where == where


@pytest.mark.parametrize(
    "element, where, text",
    [
        ({"kind": "mzi", "modes": [1, 1], "theta": 0, "phi": 0}, "elements[1]", ""),
        ({"kind": "mzi", "modes": [0], "theta": 0, "phi": 0}, "elements[1].modes", "two modes"),
        ({"kind": "laser"}, "elements[1].kind", "unknown"),
        ({"kind": "phase", "mode": 7, "phi": 0.0}, "elements[1]", ""),
        ({"kind": "phase", "mode": 0, "phi": None}, "elements[1].phi", "number"),
        ({"kind": "coupling", "perm": [0, 0, 1]}, "elements[1]", ""),
    ],
)
def test_circuit_errors_located(element, where, text):
    doc = {"modes": 3, "elements": [{"kind": "phase", "mode": 0, "phi": 0.5}, element]}
    with pytest.raises(io.FormatError) as e:
        io.circuit_from_json(doc)
    assert e.value.where == where
    assert text in e.value.message


def test_layout_errors_located():
    with pytest.raises(io.FormatError) as e:
        io.layout_from_json({"modes": 3, "layers": [[[0, 1]], [[0, 1, 2]]]})
    assert e.value.where == "layers[1][0]"
    with pytest.raises(io.FormatError) as e:
        io.layout_from_json({"modes": 3, "layers": [[[0, 1], [1, 2]]]})
    assert e.value.where == "layout"


def test_load_names_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rows": 2, "cols": 1, "data": [[[1, 0]], []]}))
    with pytest.raises(io.FormatError) as e:
        io.load(bad, io.matrix_from_json)
    assert str(e.value) == f"{bad}: data[1]: ragged row: expected 1 entries, got 0"
    broken = tmp_path / "broken.json"
    broken.write_text('{"rows": 1,\n  "cols": }')
    with pytest.raises(io.FormatError) as e:
        io.load(broken, io.matrix_from_json)
    assert e.value.where == f"{broken}:2:11"
    with pytest.raises(io.FormatError, match="cannot read"):
        io.load(tmp_path / "missing.json", io.matrix_from_json)


def test_nan_refused():
    with pytest.raises(ValueError):
        io.dumps(io.matrix_to_json(np.array([[np.nan]])))


def test_circuit_document_shape():
    c = Circuit(2, [MZI((0, 1), 0.5, 0.25), PhaseShifter(1, 0.125)])
    assert io.circuit_to_json(c) == {
        "modes": 2,
        "elements": [
            {"kind": "mzi", "modes": [0, 1], "theta": 0.5, "phi": 0.25, "active": True},
            {"kind": "phase", "mode": 1, "phi": 0.125},
        ],
    }
