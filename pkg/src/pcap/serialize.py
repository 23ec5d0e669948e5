"""Deterministic JSON and CSV output, and schema validation.

Floats are written with 17 significant digits; non-finite values as the
strings ``"inf"``, ``"-inf"`` and ``"nan"``. CSV files use ``,`` separators,
``.`` decimals, a header row and LF line endings.
"""

import csv
import json
import math
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

FLOAT_FORMAT = "%.17g"


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FORMAT % x


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = format_float(obj)
        return json.dumps(s) if not math.isfinite(obj) else s
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with fixed float formatting (key order is insertion order)."""
    return _encode(_plain(obj), indent, 0) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


@lru_cache(maxsize=None)
def load_schema(name):
    text = resources.files("pcap").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def json_path(parts):
    """``$.a.b[0]`` style path for error messages."""
    out = "$"
    for part in parts:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def schema_errors(instance, name):
    """Validation errors as ``(path, message)`` pairs, sorted by path."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = [(json_path(e.absolute_path), e.message) for e in validator.iter_errors(instance)]
    return sorted(errors)


def validate_report(obj):
    """Round-trip ``obj`` through :func:`dumps` and validate the parsed text."""
    errors = schema_errors(json.loads(dumps(obj)), "report.schema.json")
    if errors:
        raise ValueError("report failed schema validation: " + "; ".join(f"{p}: {m}" for p, m in errors))
