"""JSON encoding of complex vectors and matrices.

Complex numbers travel as [re, im] pairs, matrices as row-major nested
arrays. Everything raises InvalidArgumentError on schema violations so the
CLI can map them to its parse-error exit code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError


def complex_to_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def pair_to_complex(obj) -> complex:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(x, (int, float)) for x in obj)):
        raise InvalidArgumentError(f"expected a [re, im] pair, got {obj!r}")
    return complex(float(obj[0]), float(obj[1]))


def vector_to_json(v) -> list:
    return [complex_to_pair(z) for z in np.asarray(v).ravel()]


def json_to_vector(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise InvalidArgumentError("expected a nonempty list of [re, im] pairs")
    return np.array([pair_to_complex(row) for row in obj], dtype=np.complex128)


def matrix_to_json(a) -> list:
    a = np.asarray(a)
    return [[complex_to_pair(z) for z in row] for row in a]


def json_to_matrix(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise InvalidArgumentError("expected a nonempty list of matrix rows")
    rows = [json_to_vector(row) for row in obj]
    width = rows[0].size
    if any(r.size != width for r in rows):
        raise InvalidArgumentError("matrix rows have inconsistent lengths")
    return np.vstack(rows)


def load_matrix_file(path) -> np.ndarray:
    """Read a matrix fixture: a bare row-major nested array of [re, im] pairs."""
    text = Path(path).read_text()
    return json_to_matrix(json.loads(text))


def dump_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
