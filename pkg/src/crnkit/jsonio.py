"""Deterministic JSON emission.

The standard ``json`` module formats floats with ``repr``; reports here
want a fixed 17 significant digits, and exact rationals should survive
unchanged, so the encoder is written out directly.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from .network import format_number


def _is_terminating(q: Fraction) -> bool:
    den = q.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0:
        return "0.0"
    s = "%.17g" % x
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def _encode(obj, indent: int | None, level: int) -> str:
    if obj is None:
        return "null"
    if obj is True or obj is False or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, Fraction):
        if _is_terminating(obj):
            return format_number(obj)
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        items = [(json.dumps(str(k), ensure_ascii=False), _encode(v, indent, level + 1)) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(f"{pad}{k}: {v}" for k, v in items)
        return "{\n" + body + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple)):
        parts = [_encode(v, indent, level + 1) for v in obj]
        if not parts:
            return "[]"
        if indent is None or all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        pad = " " * (indent * (level + 1))
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + " " * (indent * level) + "]"
    if isinstance(obj, complex):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def dumps(obj, indent: int | None = 2) -> str:
    return _encode(obj, indent, 0)


def loads(text: str):
    """Parse JSON keeping non-integer numbers exact."""
    return json.loads(text, parse_float=Fraction)
