import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nesslab.exact import Exact
from nesslab.lattice import LatticeMomentum
from nesslab.points import EigenPoint, dumps, format_content, jsonable, points_to_csv, points_to_json


@pytest.mark.parametrize(
    "content, label",
    [
        (("cascade", 3), "cascade:3"),
        (("type1", (1, -2)), "type1:(1,-2)"),
        (("composite", (), ((1, 0, "type2"),)), "composite:();((1,0,type2))"),
        (("ground",), "ground"),
    ],
)
def test_format_content(content, label):
    assert format_content(content) == label


def test_point_properties():
    k = LatticeMomentum((3, 4), 2)
    p = EigenPoint(Exact.pi_power(2, 1), k, ("free", (3, 4)))
    assert p.momentum_norm == Exact.pi_power(1, 5)
    assert p.momentum_value == pytest.approx((3 * math.pi, 4 * math.pi))
    assert EigenPoint(1.0, (3.0, 4.0), ("x",)).momentum_norm == 5.0


def test_dumps_is_sorted_and_formats_floats():
    text = dumps({"b": 50.0, "a": [1, 0.1, None, True], "c": Fraction(3, 4), "d": Exact.pi_power(1, 2)})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "50.0" in text and "0.10000000000000001" in text
    assert '"3/4"' in text
    doc = json.loads(text)
    assert doc["b"] == 50.0 and doc["a"] == [1, 0.1, None, True]


def test_dumps_non_finite_is_null():
    assert json.loads(dumps({"x": math.nan, "y": math.inf})) == {"x": None, "y": None}


def test_jsonable_rejects_objects():
    with pytest.raises(TypeError):
        jsonable(object())


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert json.loads(dumps([x]))[0] == x


@given(st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=5) | st.floats(allow_nan=False, allow_infinity=False),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=3), inner, max_size=3),
    max_leaves=10,
))
def test_dumps_matches_json(obj):
    assert json.loads(dumps(obj)) == obj
    assert dumps(obj) == dumps(json.loads(dumps(obj)))


def test_point_json_and_csv():
    k = LatticeMomentum((1,), 2)
    pts = [
        EigenPoint(Exact.pi_power(2, Fraction(1, 2)), k, ("type1", (1,)), Exact.pi_power(2, 1)),
        EigenPoint(-1.5, (0.25,), ("tail", 2), exact=False),
    ]
    doc = json.loads(points_to_json(pts, {"model": "x"}))
    assert doc["meta"] == {"model": "x"}
    first, second = doc["points"]
    assert first["E_exact"] == "1/2*pi^2"
    assert first["exact"] is True and second["exact"] is False
    assert second["P"] == [0.25]
    lines = points_to_csv(pts).splitlines()
    assert lines[0] == "label,E,P,exact"
    assert lines[2] == "tail:2,-1.5,0.25,0"
