"""JSON output with a fixed float format so reruns are byte-identical."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.17g"


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = FLOAT_FORMAT % x
    # keep floats recognisable as floats after a round trip
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


def dumps(obj, indent: int = 2) -> str:
    """Serialize ``obj`` writing every float with 17 significant digits."""

    def enc(o, level):
        o = _plain(o)
        pad = "\n" + " " * (indent * (level + 1))
        end = "\n" + " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _float(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{" + pad + ("," + pad).join(items) + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(_plain(v), (int, float)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[" + pad + ("," + pad).join(enc(v, level + 1) for v in o) + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())
