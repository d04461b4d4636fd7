"""Text and JSON exchange formats.

Matrices travel as plain text: a ``rows cols`` header line followed by rows
of whitespace-separated decimals (vectors are one-row matrices).
Decompositions and witnesses serialize to JSON with row-major factor arrays.
"""

from __future__ import annotations

import json
from typing import Union

import numpy as np

from .errors import InvalidData
from .systems import Decomposition, GroupElement, ProductSystem, System, parse_system


def parse_matrix_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise InvalidData("empty matrix payload")
    head = lines[0].split()
    if len(head) != 2:
        raise InvalidData("first line must be 'rows cols'")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise InvalidData("non-integer matrix header") from exc
    if rows < 1 or cols < 1 or len(lines) != rows + 1:
        raise InvalidData("matrix body does not match its header")
    out = np.zeros((rows, cols))
    for i, ln in enumerate(lines[1:]):
        vals = ln.split()
        if len(vals) != cols:
            raise InvalidData("row %d has %d entries, expected %d" % (i, len(vals), cols))
        try:
            out[i] = [float(v) for v in vals]
        except ValueError as exc:
            raise InvalidData("non-numeric entry in row %d" % i) from exc
    if not np.all(np.isfinite(out)):
        raise InvalidData("non-finite entry in matrix")
    return out


def read_matrix(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_text(fh.read())


def format_matrix(M: np.ndarray) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    lines = ["%d %d" % M.shape]
    for row in M:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(path: str, M: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(M))


def _mat2list(M) -> list:
    return np.asarray(M, dtype=float).tolist()


def decomposition_to_json(d: Decomposition) -> dict:
    kind = d.system
    payload: dict = {"kind": kind.name}
    if d.spectrum is not None:
        payload["spectrum"] = _mat2list(d.spectrum)
    if isinstance(kind, ProductSystem):
        payload["inner"] = decomposition_to_json(d.factors)
    elif isinstance(d.factors, tuple):
        payload["u"] = _mat2list(d.factors[0])
        payload["v"] = _mat2list(d.factors[1])
    else:
        payload["u"] = _mat2list(d.factors)
    return payload


def decomposition_from_json(payload: dict) -> Decomposition:
    kind = parse_system(payload["kind"])
    spectrum = np.asarray(payload["spectrum"], dtype=float) if "spectrum" in payload else None
    if isinstance(kind, ProductSystem):
        inner = decomposition_from_json(payload["inner"])
        return Decomposition(kind, inner, spectrum=spectrum)
    if "v" in payload:
        factors = (np.asarray(payload["u"], dtype=float), np.asarray(payload["v"], dtype=float))
        return Decomposition(kind, factors, spectrum=spectrum)
    return Decomposition(kind, np.asarray(payload["u"], dtype=float), spectrum=spectrum)


def group_element_to_json(s: GroupElement) -> dict:
    return {"perm": [int(p) for p in s.perm], "signs": [int(v) for v in s.signs]}


def group_element_from_json(payload: dict) -> GroupElement:
    return GroupElement(np.asarray(payload["perm"], dtype=np.intp),
                        np.asarray(payload["signs"], dtype=float))


def ambient_to_json(X) -> Union[list, dict]:
    if isinstance(X, tuple):
        return {"matrix": _mat2list(X[0]), "scalar": float(X[1])}
    return _mat2list(X)


def witness_to_json(w) -> dict:
    out = {
        "base": ambient_to_json(w.base_point),
        "vector": ambient_to_json(w.vector),
        "flavor": w.flavor,
    }
    if w.invariant_vector is not None:
        out["invariant_vector"] = _mat2list(w.invariant_vector)
    if w.decomposition is not None:
        out["decomposition"] = decomposition_to_json(w.decomposition)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
