"""Extended reals.

Values in ``[-inf, +inf]`` are plain Python floats; IEEE infinities already
give the arithmetic needed here (finite + inf = inf). What this module adds is
the serialized form, where infinities are the strings ``"inf"``/``"-inf"``
and finite numbers are written with 12 significant digits.
"""

import math

import numpy as np

ExtReal = float

SIG_DIGITS = 12


def check(value) -> float:
    """Return ``value`` as a float, rejecting NaN."""
    x = float(value)
    if math.isnan(x):
        raise ValueError("extended real value is NaN")
    return x


def fmt(value) -> str:
    """Deterministic text form used by CSV output."""
    x = check(value)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return f"{x:.{SIG_DIGITS}g}"


def to_json(value):
    """JSON-safe form: a number, or the strings ``"inf"``/``"-inf"``."""
    x = check(value)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}")


def from_json(value) -> float:
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "+inf", "infinity"):
            return math.inf
        if v in ("-inf", "-infinity"):
            return -math.inf
        raise ValueError(f"not an extended real: {value!r}")
    return check(value)


def jsonify(obj):
    """Recursively convert arrays and floats into JSON-ready values."""
    if isinstance(obj, dict):
        return {k: jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonify(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return to_json(obj)
    return obj
