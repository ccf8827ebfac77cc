"""JSON serialization for dense complex matrices and system triples.

The on-disk format is a plain JSON object

    {"rows": r, "cols": c, "re": [[...], ...], "im": [[...], ...]}

with row-major nested lists of floats.  Python's JSON round-trips doubles
exactly (shortest-repr), so save/load is bit-faithful.  A triple file is an
object with keys "E", "J", "R", each holding one matrix object.
"""

from __future__ import annotations

import json

import numpy as np

from .core import DaeTriple, as_matrix

__all__ = [
    "matrix_to_dict",
    "matrix_from_dict",
    "triple_to_dict",
    "triple_from_dict",
    "save_json",
    "load_json",
]


def matrix_to_dict(M) -> dict:
    """Encode a matrix as a JSON-ready dict with separate re/im parts."""
    A = as_matrix(M)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": [[float(v) for v in row] for row in A.real],
        "im": [[float(v) for v in row] for row in A.imag],
    }


def matrix_from_dict(d) -> np.ndarray:
    """Decode a matrix dict, validating shape metadata against the payload."""
    if not isinstance(d, dict):
        raise ValueError(f"expected a matrix object, got {type(d).__name__}")
    missing = {"rows", "cols", "re", "im"} - set(d)
    if missing:
        raise ValueError(f"matrix object missing keys: {sorted(missing)}")
    rows, cols = d["rows"], d["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
        raise ValueError("rows/cols must be nonnegative integers")
    try:
        re = np.asarray(d["re"], dtype=float).reshape(rows, cols)
        im = np.asarray(d["im"], dtype=float).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"matrix payload does not match rows x cols: {exc}") from exc
    A = re + 1j * im
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def triple_to_dict(t: DaeTriple) -> dict:
    return {
        "E": matrix_to_dict(t.E),
        "J": matrix_to_dict(t.J),
        "R": matrix_to_dict(t.R),
    }


def triple_from_dict(d) -> DaeTriple:
    if not isinstance(d, dict):
        raise ValueError(f"expected a triple object, got {type(d).__name__}")
    missing = {"E", "J", "R"} - set(d)
    if missing:
        raise ValueError(f"triple object missing keys: {sorted(missing)}")
    return DaeTriple(
        E=matrix_from_dict(d["E"]),
        J=matrix_from_dict(d["J"]),
        R=matrix_from_dict(d["R"]),
    )


def save_json(path, obj) -> None:
    """Write a JSON document deterministically (sorted keys, LF newline)."""
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
