"""JSON model/pole/gain files and CSV traces.

Floats are written with Python's shortest round-trip representation, so a
value read back is bit-identical to the one written.
"""
import csv
import json
import os
import re
from dataclasses import dataclass

import numpy as np

from .decomposition import StateSpaceModel
from .errors import DimensionError, DimensionMismatch, ParseError


@dataclass(eq=False)
class SystemFile:
    model: StateSpaceModel
    labels: dict = None
    input_order: list = None
    output_order: list = None


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _matrix_field(doc, name, path):
    if name not in doc:
        raise ParseError(f"{path}: missing field '{name}'")
    rows = doc[name]
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{path}: field '{name}' must be a non-empty list of rows")
    width = None
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise ParseError(f"{path}: {name} row {i} is not a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DimensionError(f"{path}: {name} row {i} has {len(row)} entries, expected {width}")
        for k, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{path}: {name}[{i}][{k}] is not a number: {v!r}")
    mat = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(mat)):
        raise ParseError(f"{path}: field '{name}' has non-finite entries")
    return mat


def _order_field(doc, name, count, path):
    order = doc.get(name)
    if order is None:
        return None
    if (not isinstance(order, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in order)
            or sorted(order) != list(range(count))):
        raise ParseError(f"{path}: '{name}' must be a permutation of 0..{count - 1}, got {order!r}")
    return list(order)


def read_system_file(path):
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    A, B, C = (_matrix_field(doc, k, path) for k in ("A", "B", "C"))
    try:
        model = StateSpaceModel(A, B, C)
    except DimensionMismatch as exc:
        raise DimensionError(f"{path}: {exc}") from exc
    return SystemFile(
        model=model,
        labels=doc.get("labels"),
        input_order=_order_field(doc, "input_order", model.p, path),
        output_order=_order_field(doc, "output_order", model.q, path),
    )


def parse_system(path):
    """Read a system file and return its validated :class:`StateSpaceModel`."""
    return read_system_file(path).model


def system_to_dict(model, labels=None, input_order=None, output_order=None):
    doc = {"A": model.A.tolist(), "B": model.B.tolist(), "C": model.C.tolist()}
    if labels is not None:
        doc["labels"] = labels
    if input_order is not None:
        doc["input_order"] = list(input_order)
    if output_order is not None:
        doc["output_order"] = list(output_order)
    return doc


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def serialize_system(model, path, **extra):
    write_json(path, system_to_dict(model, **extra))


_IMAG_ONLY = re.compile(r"^([+-]?)[ij]$")


def _parse_point(token):
    tok = token.strip().replace(" ", "")
    if not tok:
        raise ParseError("empty pole entry")
    tok = _IMAG_ONLY.sub(r"\g<1>1j", tok)
    tok = re.sub(r"([+-])[ij]$", r"\g<1>1j", tok)
    tok = tok.replace("i", "j")
    try:
        return complex(tok)
    except ValueError as exc:
        raise ParseError(f"cannot parse pole {token!r}") from exc


def parse_inline_poles(text):
    """Parse ``-1,-2,-1+2i,-1-2i`` (``i`` and ``j`` suffixes are equivalent)."""
    return [_parse_point(tok) for tok in text.split(",")]


def _pair_to_complex(item, where):
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(item, 0.0)
    if (isinstance(item, list) and 1 <= len(item) <= 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)):
        return complex(item[0], item[1] if len(item) == 2 else 0.0)
    raise ParseError(f"{where}: expected [re, im], got {item!r}")


def read_pole_file(path):
    """Return ``(poles, assignment)``; ``assignment`` is None unless given."""
    doc = _load_json(path)
    if isinstance(doc, list):
        doc = {"poles": doc}
    if not isinstance(doc, dict) or ("poles" not in doc and "blocks" not in doc):
        raise ParseError(f"{path}: missing field 'poles'")
    poles = [_pair_to_complex(v, f"{path}: poles[{i}]") for i, v in enumerate(doc.get("poles", []))]
    assignment = None
    if doc.get("blocks") is not None:
        assignment = [[_pair_to_complex(v, f"{path}: blocks[{b}][{i}]") for i, v in enumerate(blk)]
                      for b, blk in enumerate(doc["blocks"])]
        if not poles:
            poles = [z for blk in assignment for z in blk]
    return poles, assignment


def parse_poles(arg):
    """A pole-file path or an inline pole list."""
    if os.path.isfile(arg):
        return read_pole_file(arg)
    return parse_inline_poles(arg), None


def points_to_json(points):
    return [[complex(z).real, complex(z).imag] for z in points]


def points_from_json(items, where="poles"):
    return [_pair_to_complex(v, f"{where}[{i}]") for i, v in enumerate(items)]


def read_gains(path):
    """Return ``(K, L, doc)`` from a gain file."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    K = _matrix_field(doc, "K", path)
    L = _matrix_field(doc, "L", path)
    return K, L, doc


def write_trace_csv(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace.columns())
        for row in trace.table():
            writer.writerow([repr(float(v)) for v in row])
