"""Versioned JSON schemas and a canonical emitter.

All floating-point output is printed with 17 significant digits so values
round-trip exactly; keys are sorted and separators fixed, making every
emitted document byte-stable for identical inputs.  Complex scalars travel
as [re, im] pairs; infinities (divergent sums in evidence maps) as the
strings "inf"/"-inf".
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaError
from .ideals import EigenLaw, MembershipVerdict
from .sequences import GeometricTail, PowerTail, ScalarSequence
from .spectral import EigenSequence

SCHEMA_VERSION = "1"

__all__ = [
    "SCHEMA_VERSION",
    "canonical_json",
    "load_json_file",
    "matrix_from_json",
    "matrix_to_json",
    "scalar_sequence_from_json",
    "eigen_input_from_json",
    "complex_pair",
    "verdict_to_json",
]


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def _emit(obj, out: list) -> None:
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, complex):
        _emit([obj.real, obj.imag], out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    out: list[str] = []
    _emit(obj, out)
    return "".join(out) + "\n"


def load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _require(doc: dict, field: str, kind=None):
    if field not in doc:
        raise SchemaError(f"missing field {field!r}")
    value = doc[field]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"field {field!r} has wrong type {type(value).__name__}")
    return value


def matrix_from_json(doc) -> np.ndarray:
    """{"n": dim, "entries": [[re, im], ...]} row-major, length n*n."""
    if not isinstance(doc, dict):
        raise SchemaError("matrix document must be a JSON object")
    n = _require(doc, "n", int)
    if n < 1:
        raise SchemaError("field 'n' must be a positive integer")
    entries = _require(doc, "entries", list)
    if len(entries) != n * n:
        raise SchemaError(f"field 'entries' must hold n*n = {n * n} pairs, got {len(entries)}")
    flat = np.empty(n * n, dtype=np.complex128)
    for i, item in enumerate(entries):
        if not (isinstance(item, list) and len(item) == 2):
            raise SchemaError(f"entries[{i}] must be a [re, im] pair")
        try:
            flat[i] = complex(float(item[0]), float(item[1]))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"entries[{i}] holds non-numeric data") from exc
    m = flat.reshape(n, n)
    if not np.all(np.isfinite(flat.real)) or not np.all(np.isfinite(flat.imag)):
        raise SchemaError("matrix entries must be finite")
    return m


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "schemaVersion": SCHEMA_VERSION,
        "n": int(m.shape[0]),
        "entries": [complex_pair(z) for z in m.ravel()],
    }


def _float_field(doc: dict, name: str) -> float:
    value = _require(doc, name)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"field {name!r} must be a number")
    return float(value)


def scalar_sequence_from_json(doc) -> ScalarSequence:
    """Nonnegative nonincreasing sequence: finite, power, or geometric."""
    if not isinstance(doc, dict):
        raise SchemaError("sequence document must be a JSON object")
    kind = _require(doc, "kind", str)
    if kind == "finite":
        values = _require(doc, "values", list)
        try:
            arr = np.asarray([float(v) for v in values], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError("field 'values' holds non-numeric data") from exc
        try:
            return ScalarSequence(arr)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    if kind == "power":
        try:
            return ScalarSequence.power_law(_float_field(doc, "c"), _float_field(doc, "a"))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    if kind == "geometric":
        try:
            return ScalarSequence.geometric_law(_float_field(doc, "c"), _float_field(doc, "q"))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unknown sequence kind {kind!r}")


def eigen_input_from_json(doc):
    """Criterion input: a matrix, a finite eigenvalue list, or a decay law.

    A matrix document carries "n"/"entries"; a sequence document carries
    "kind" with finite values allowed as numbers or [re, im] pairs, and the
    symbolic kinds accept an optional "alternating" flag.
    """
    if not isinstance(doc, dict):
        raise SchemaError("criterion input must be a JSON object")
    if "entries" in doc or "n" in doc:
        return matrix_from_json(doc)
    kind = _require(doc, "kind", str)
    alternating = bool(doc.get("alternating", False))
    if kind == "finite":
        values = _require(doc, "values", list)
        vals = np.empty(len(values), dtype=np.complex128)
        for i, item in enumerate(values):
            if isinstance(item, list):
                if len(item) != 2:
                    raise SchemaError(f"values[{i}] must be a [re, im] pair")
                vals[i] = complex(float(item[0]), float(item[1]))
            elif isinstance(item, (int, float)) and not isinstance(item, bool):
                vals[i] = complex(float(item))
            else:
                raise SchemaError(f"values[{i}] holds non-numeric data")
        return EigenSequence.from_values(vals)
    if kind == "power":
        return EigenLaw("power", _float_field(doc, "c"), a=_float_field(doc, "a"), alternating=alternating)
    if kind == "geometric":
        return EigenLaw("geometric", _float_field(doc, "c"), q=_float_field(doc, "q"), alternating=alternating)
    raise SchemaError(f"unknown sequence kind {kind!r}")


def verdict_to_json(v: MembershipVerdict) -> dict:
    return {"status": v.status, "scale": v.scale, "evidence": dict(v.evidence)}


def sequence_summary(s: ScalarSequence, head: int = 16) -> dict:
    doc: dict = {"head": list(s.head(min(head, max(s.base_length * s.repeat, 1))))}
    if isinstance(s.tail, PowerTail):
        doc["tail"] = {"kind": "power", "c": s.tail.c, "a": s.tail.a}
    elif isinstance(s.tail, GeometricTail):
        doc["tail"] = {"kind": "geometric", "c": s.tail.c, "q": s.tail.q}
    elif s.tail is not None:
        doc["tail"] = {"kind": "factorial_power", "c": s.tail.c, "a": s.tail.a}
    else:
        doc["tail"] = None
    doc["repeat"] = s.repeat
    return doc
