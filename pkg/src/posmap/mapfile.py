"""JSON map files.

One map per file, canonical form is the Choi matrix as nested ``[re, im]``
pairs. Floats are written either as shortest round-trip decimals or as
``float.hex`` strings; both decode to the identical binary value.

Schema (version 1)::

    {
      "format": "posmap-map",
      "version": 1,
      "dim_in": k, "dim_out": h,
      "float_format": "decimal" | "hex",
      "choi": [[[re, im], ...], ...],     # (k*h) x (k*h), row-major
      "metadata": {...}                   # optional, free-form
    }
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, NonFinite, ParseError
from .mapcore import LinearMap, from_choi, to_choi

FORMAT = "posmap-map"
VERSION = 1


def _enc(x: float, fmt: str):
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop negative zero for canonical output
    return x.hex() if fmt == "hex" else x


def _dec(v) -> float:
    if isinstance(v, str):
        try:
            return float.fromhex(v)
        except ValueError:
            raise ParseError(f"bad hex float {v!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}")
    return float(v)


def encode_matrix(M: np.ndarray, fmt: str = "decimal") -> list:
    return [[[_enc(z.real, fmt), _enc(z.imag, fmt)] for z in row] for row in np.asarray(M, dtype=complex)]


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a list of rows")
    try:
        M = np.array([[complex(_dec(p[0]), _dec(p[1])) for p in row] for row in rows], dtype=complex)
    except (TypeError, IndexError, KeyError):
        raise ParseError("matrix entries must be [re, im] pairs") from None
    if M.ndim != 2:
        raise ParseError("ragged matrix")
    return M


def map_to_doc(phi: LinearMap, fmt: str = "decimal", metadata: dict | None = None) -> dict:
    if fmt not in ("decimal", "hex"):
        raise ValueError(f"unknown float format {fmt!r}")
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "dim_in": phi.k,
        "dim_out": phi.h,
        "float_format": fmt,
        "choi": encode_matrix(to_choi(phi), fmt),
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def doc_to_map(doc) -> tuple[LinearMap, dict]:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ParseError("not a map file")
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}")
    try:
        k, h = int(doc["dim_in"]), int(doc["dim_out"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("dim_in and dim_out are required integers") from None
    J = decode_matrix(doc.get("choi"))
    if J.shape != (k * h, k * h):
        raise DimensionMismatch(f"choi is {J.shape}, declared dims give {(k * h, k * h)}")
    if not np.all(np.isfinite(J)):
        raise NonFinite("choi has non-finite entries")
    meta = doc.get("metadata") or {}
    return from_choi(J, k, h, name=meta.get("name")), meta


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_map(path, phi: LinearMap, fmt: str = "decimal", metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(map_to_doc(phi, fmt, metadata)), encoding="utf-8")


def read_map(path) -> tuple[LinearMap, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from None
    return doc_to_map(doc)


def jsonable(obj):
    """Convert analysis output (arrays, complex, numpy scalars) to plain JSON values.

    Complex numbers become ``[re, im]``; non-finite floats become strings.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return 0.0 if x == 0.0 else x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj
