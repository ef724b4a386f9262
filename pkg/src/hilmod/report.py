"""Deterministic report encoding.

Floats are written with Python's shortest round-trip representation (at most
17 significant digits), complex numbers as ``[re, im]``, arrays as row-major
nested lists.  Identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import NumericalAnomaly
from .rkhs import BASIS_ORDERING

SCHEMA_VERSION = "hilmod.report/1"


def _float(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise NumericalAnomaly(f"non-finite value {x} in report")
    return 0.0 if x == 0 else x  # drop the sign of zero


def to_jsonable(obj):
    """Recursively convert numpy/complex containers to plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__} in a report")


def complex_array(A) -> list:
    """Nested ``[re, im]`` lists, even for real input."""
    return to_jsonable(np.asarray(A, dtype=complex))


def provenance(version: str, tolerances: dict, N) -> dict:
    return {
        "tool": "hilmod",
        "version": version,
        "tolerances": dict(sorted(tolerances.items())),
        "truncation": N,
        "basis_ordering": BASIS_ORDERING,
        "inner_product": "linear in the first argument; coordinates are orthonormal-basis coefficients",
    }


def dumps(doc: dict) -> str:
    return json.dumps(to_jsonable(doc), indent=2, allow_nan=False, ensure_ascii=True) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".hilmod-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
