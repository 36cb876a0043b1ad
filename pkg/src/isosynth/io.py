"""JSON schemas for matrices and operation files.

A matrix is {"rows": r, "cols": c, "entries": [...]} with row-major entries,
each either a real number or a [re, im] pair. Operation files are a bare
matrix (or {"isometry": matrix}), {"kraus": [...]}, {"effects": [...]} or
{"branches": [[...], ...]}.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

KINDS = ("iso", "channel", "povm", "instrument")


class SchemaError(ValueError):
    """Input does not match the expected JSON layout."""


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return {"rows": m.shape[0], "cols": m.shape[1],
            "entries": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def _entry(x: Any, where: str) -> complex:
    if isinstance(x, bool):
        raise SchemaError(f"{where}: boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if (isinstance(x, list) and len(x) == 2
            and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in x)):
        return complex(x[0], x[1])
    raise SchemaError(f"{where}: expected a number or [re, im], got {x!r}")


def matrix_from_json(obj: Any, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object with rows/cols/entries")
    missing = {"rows", "cols", "entries"} - obj.keys()
    if missing:
        raise SchemaError(f"{where}: missing {sorted(missing)}")
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise SchemaError(f"{where}: rows and cols must be positive integers")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise SchemaError(f"{where}: expected {rows * cols} entries")
    vals = [_entry(x, f"{where}.entries[{i}]") for i, x in enumerate(entries)]
    return np.array(vals, dtype=complex).reshape(rows, cols)


def detect_kind(obj: Any) -> str:
    if isinstance(obj, dict):
        for key, kind in (("kraus", "channel"), ("effects", "povm"), ("branches", "instrument")):
            if key in obj:
                return kind
    return "iso"


def _matrix_list(obj: Any, where: str) -> list[np.ndarray]:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{where}: expected a non-empty list of matrices")
    return [_check_qubit_dims(matrix_from_json(m, f"{where}[{i}]"), f"{where}[{i}]")
            for i, m in enumerate(obj)]


def _check_qubit_dims(m: np.ndarray, where: str) -> np.ndarray:
    for d in m.shape:
        if d & (d - 1):
            raise SchemaError(f"{where}: dimension {d} is not a power of two")
    return m


def parse_operation(obj: Any, kind: str | None = None) -> tuple[str, Any]:
    """Decode a JSON value into (kind, payload).

    The payload is a matrix for "iso", a list of matrices for "channel" and
    "povm", and a list of lists for "instrument". Validation of the physical
    invariants is left to the caller.
    """
    kind = kind or detect_kind(obj)
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}")
    if kind == "iso":
        if isinstance(obj, dict) and "isometry" in obj:
            obj = obj["isometry"]
        return kind, _check_qubit_dims(matrix_from_json(obj, "isometry"), "isometry")
    key = {"channel": "kraus", "povm": "effects", "instrument": "branches"}[kind]
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{kind} file needs a {key!r} field")
    if kind == "instrument":
        branches = obj[key]
        if not isinstance(branches, list) or not branches:
            raise SchemaError("branches: expected a non-empty list")
        return kind, [_matrix_list(b, f"branches[{j}]") for j, b in enumerate(branches)]
    return kind, _matrix_list(obj[key], key)


def load_json(path: str) -> Any:
    """Read a UTF-8 JSON file; decoding errors become SchemaError with a location."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def operation_to_json(kind: str, payload: Any) -> dict:
    if kind == "iso":
        return matrix_to_json(payload)
    if kind == "instrument":
        return {"branches": [[matrix_to_json(a) for a in b] for b in payload]}
    key = {"channel": "kraus", "povm": "effects"}[kind]
    return {key: [matrix_to_json(a) for a in payload]}
