import json

import numpy as np

from cvcluster.serialize import dumps, read_json, write_json


def test_seventeen_significant_digits():
    text = dumps({"v": 0.1})
    assert '"v": 0.10000000000000001' in text
    assert json.loads(text)["v"] == 0.1


def test_numpy_and_nesting():
    obj = {"a": np.arange(3.0), "b": [np.float64(2.0), {"c": None, "d": True}], "e": np.int64(4), "s": "x"}
    back = json.loads(dumps(obj))
    assert back == {"a": [0.0, 1.0, 2.0], "b": [2.0, {"c": None, "d": True}], "e": 4, "s": "x"}


def test_non_finite_and_integral_floats():
    text = dumps([float("nan"), float("inf"), 3.0])
    assert text.strip() == "[NaN, Infinity, 3.0]"


def test_roundtrip_file(tmp_path):
    f = tmp_path / "x.json"
    write_json(f, {"x": [1.5, -2.25e-30]})
    assert read_json(f) == {"x": [1.5, -2.25e-30]}
    assert f.read_text() == dumps({"x": [1.5, -2.25e-30]})
