"""JSON matrix files and deterministic serialization.

Matrix files look like ``{"dim": n, "re": [[...]], "im": [[...]]}``; real
matrices carry ``"im": null``. Output floats are written with 17 significant
digits and keys in insertion order, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ParseError


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a)
    im = None
    if np.iscomplexobj(a) and np.any(a.imag != 0):
        im = a.imag.tolist()
    return {"dim": int(a.shape[0]), "re": np.real(a).tolist(), "im": im}


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ParseError('matrix object needs a "re" field')
    try:
        re = np.array(obj["re"], dtype=float)
        im = obj.get("im")
        a = re if im is None else re + 1j * np.array(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be numbers: {exc}") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParseError(f"matrix must be square, got shape {a.shape}")
    dim = obj.get("dim", a.shape[0])
    if dim != a.shape[0]:
        raise ParseError(f'"dim" is {dim} but the matrix is {a.shape[0]}x{a.shape[1]}')
    return a


def read_matrix(path: str | Path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from None
    return matrix_from_json(obj)


def write_matrix(path: str | Path, a: np.ndarray) -> None:
    Path(path).write_text(dumps(matrix_to_json(a)) + "\n")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """``json.dumps`` with fixed 17-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    return json.dumps(str(obj))


CSV_COLUMNS = ("r", "lambda_min", "lambda_max", "dist_to_limit", "extremality_residual")


def trajectory_csv(rows: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([format_float(float(getattr(row, c))) for c in CSV_COLUMNS])
    return buf.getvalue()


def parse_trajectory_csv(text: str) -> list[dict[str, float]]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ParseError(f"unexpected CSV header {reader.fieldnames}")
    return [{k: float(v) for k, v in row.items()} for row in reader]


def parse_grid(text: str) -> list[float]:
    """Comma list of positive reals; ``a,b,...,z`` expands a geometric grid."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if "..." in parts:
        i = parts.index("...")
        if i < 2 or i != len(parts) - 2:
            raise ParseError("use 'a,b,...,z' for a geometric grid")
        head = [float(p) for p in parts[:i]]
        stop = float(parts[-1])
        ratio = head[1] / head[0]
        if ratio <= 1:
            raise ParseError("geometric grid must be ascending")
        out = list(head)
        while out[-1] * ratio <= stop * (1 + 1e-12):
            out.append(out[-1] * ratio)
        return out
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"bad grid {text!r}: {exc}") from None
