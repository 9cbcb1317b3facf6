import json
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from qinvert.arith import QLaurent
from qinvert.serialize import csv_text, dumps, format_real, value_to_json


def test_real_format():
    assert format_real(0.1) == "0.10000000000000001"
    assert format_real(float("inf")) == "inf" and format_real(float("nan")) == "nan"


def test_values():
    assert value_to_json(Fraction(3, 6)) == "1/2"
    assert value_to_json(QLaurent({0: 1, 2: -1})) == {"terms": [[0, "1/1"], [2, "-1/1"]]}
    assert value_to_json(True) is True


def test_dumps_is_stable_json():
    doc = {"b": [1, 0.5, Fraction(1, 3)], "a": {"x": float("inf")}}
    text = dumps(doc)
    assert text.endswith("\n") and text == dumps(doc)
    assert json.loads(text) == {"b": [1, 0.5, "1/3"], "a": {"x": "inf"}}


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip(x):
    assert float(format_real(x)) == x
    assert json.loads(dumps([x]))[0] == x


def test_csv():
    text = csv_text(["a", "b"], [(Fraction(1, 2), 0.25), (QLaurent({1: 1}), "s")])
    assert text == "a,b\n1/2,0.25\nq,s\n"
