import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from regenstruct import io
from regenstruct.core import Partition, ValidationError
from regenstruct.eppf import TwoParamModel, model_levels
from regenstruct.kernels import DecrementRow
from regenstruct.paintbox import beta_spec, dirac
from regenstruct.regen import NotRegenerative, full_matrix, two_param_decrement

F = Fraction


def test_decimal_rendering():
    assert io.to_decimal(F(1, 3)) == "0.333333333333"
    assert io.to_decimal(F(2, 3), 4) == "0.6667"
    assert io.to_decimal(F(0)) == "0.000000000000"
    assert io.to_decimal(F(-5, 4), 2) == "-1.25"
    assert io.to_decimal(F(123456789, 7), 3) == "17636684.143"


@given(st.fractions(min_value=-50, max_value=50, max_denominator=10 ** 6))
def test_decimal_close_to_value(q):
    assert abs(F(io.to_decimal(q)) - q) <= F(1, 2 * 10 ** 12)


def test_matrix_round_trip(tmp_path):
    Q = full_matrix(two_param_decrement(F(1, 2), F(1, 2), 4))
    doc = io.matrix_to_json(Q)
    assert doc["rows"][2] == ["3/5", "1/5", "1/5"]
    path = tmp_path / "q.json"
    path.write_text(json.dumps(doc))
    assert io.matrix_from_json(str(path)) == Q
    assert io.matrix_from_json(json.dumps(doc)) == Q
    with pytest.raises(ValidationError):
        io.matrix_from_json({"n_max": 9, "rows": doc["rows"]})


def test_levels_round_trip(tmp_path):
    levels = model_levels(TwoParamModel(F(1, 4), 1), 5)
    doc = io.levels_to_json(levels)
    assert doc["n"] == 5
    assert doc["levels"][0] == {"partition": [1], "prob": "1"}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    assert io.levels_from_json("@" + str(path)) == levels


def test_levels_missing_entries_are_zero():
    doc = {"n": 2, "levels": [{"partition": [1], "prob": "1"}, {"partition": [2], "prob": "1"}]}
    levels = io.levels_from_json(doc)
    assert levels[2][Partition([1, 1])] == 0


def test_levels_rejects_duplicates_and_bad_levels():
    with pytest.raises(ValidationError):
        io.levels_from_json({"n": 1, "levels": [{"partition": [1], "prob": "1"}] * 2})
    with pytest.raises(ValidationError):
        io.levels_from_json({"n": 1, "levels": [{"partition": [2], "prob": "1"}]})
    with pytest.raises(ValidationError):
        io.levels_from_json({"levels": []})


def test_model_documents():
    m = io.model_from_json({"family": "two-parameter", "alpha": "1/2", "theta": "1/2"})
    assert m.decrement_row(3) == (F(3, 5), F(1, 5), F(1, 5))
    e = io.model_from_json('{"family": "ewens", "theta": "1"}')
    assert e.decrement_row(5) == (F(1, 5),) * 5
    pb = io.model_from_json({"atoms": [{"u": "1", "w": "1"}], "drift": "1"})
    assert pb.kind == "paintbox" and pb.decrement_row(3) == (F(3, 4), 0, F(1, 4))
    dec = io.model_from_json(io.matrix_to_json(full_matrix(DecrementRow([F(1, 3)] * 3))))
    assert dec.kind == "decrement" and dec.levels(3)[3][Partition([2, 1])] == F(1, 2)
    with pytest.raises(ValidationError):
        io.model_from_json({"family": "mystery"})
    with pytest.raises(ValidationError):
        dec.decrement_row(4)


def test_extended_model_fails_loudly():
    m = io.model_from_json({"family": "two-parameter", "alpha": "3/4", "theta": "-1/4"},
                           extended_range=True)
    with pytest.raises(NotRegenerative):
        m.decrement_row(6)


def test_spec_json_round_trip():
    spec = beta_spec(1, F(-1, 2), F(1, 2), drift=F(1, 3))
    assert io.parse_spec(io.spec_to_json(spec)) == spec
    assert io.parse_spec(io.spec_to_json(dirac(F(1, 2)))) == dirac(F(1, 2))


def test_describe():
    assert io.ModelSpec("ewens", TwoParamModel.ewens(2)).describe() == {"family": "ewens", "theta": "2"}


def test_bad_json():
    with pytest.raises(ValidationError):
        io.read_json("{not json")
