"""Crystal input files.

Schema::

    {"name": str,
     "U": [[...], [...], [...]]            # or
     "monoclinic": {"alpha": .., "beta": .., "gamma": .., "delta": ..},
     "ehat": [h, k, l],                      # optional
     "notes": str}                           # optional
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..symmetry import monoclinic_variants

BUNDLED = ("cualmn", "aucuzn", "vo2")


@dataclass(frozen=True)
class CrystalSpec:
    name: str
    U: np.ndarray
    ehat: np.ndarray | None = None       # unit vector, or None when absent
    ehat_raw: tuple | None = None        # the triple as written
    monoclinic: dict | None = None
    notes: str = ""
    expected: dict = field(default_factory=dict)


def _number(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(path, f"expected a number, got {type(x).__name__}")
    if not np.isfinite(x):
        raise InputError(path, "must be finite")
    return float(x)


def _matrix(obj, path):
    if not isinstance(obj, list) or len(obj) != 3:
        raise InputError(path, "expected a 3x3 nested list")
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != 3:
            raise InputError(f"{path}[{i}]", "expected a row of 3 numbers")
        rows.append([_number(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return np.array(rows)


def parse_axis(obj, path="ehat"):
    if isinstance(obj, str):
        try:
            obj = [float(s) for s in obj.replace(" ", "").split(",")]
        except ValueError:
            raise InputError(path, f"cannot parse axis {obj!r}") from None
    if not isinstance(obj, (list, tuple)) or len(obj) != 3:
        raise InputError(path, "expected three components")
    v = np.array([_number(c, f"{path}[{i}]") for i, c in enumerate(obj)])
    nv = np.linalg.norm(v)
    if nv == 0:
        raise InputError(path, "axis must be nonzero")
    return v / nv, tuple(obj)


def parse_crystal(data: dict, source="<input>") -> CrystalSpec:
    if not isinstance(data, dict):
        raise InputError("$", "top level must be an object")
    name = data.get("name", Path(str(source)).stem)
    if not isinstance(name, str):
        raise InputError("name", "expected a string")
    has_u, has_m = "U" in data, "monoclinic" in data
    if has_u == has_m:
        raise InputError("U", "exactly one of 'U' or 'monoclinic' must be given")
    mono = None
    if has_u:
        U = _matrix(data["U"], "U")
    else:
        m = data["monoclinic"]
        if not isinstance(m, dict):
            raise InputError("monoclinic", "expected an object")
        for key in ("alpha", "beta", "gamma", "delta"):
            if key not in m:
                raise InputError(f"monoclinic.{key}", "missing")
        mono = {key: _number(m[key], f"monoclinic.{key}") for key in ("alpha", "beta", "gamma", "delta")}
        U = monoclinic_variants(**mono)[1].U
    if np.max(np.abs(U - U.T)) > 1e-12 * max(1.0, np.abs(U).max()):
        raise InputError("U", "must be symmetric")
    if np.linalg.eigvalsh(U)[0] <= 0:
        raise InputError("U", "must be positive-definite")
    ehat = raw = None
    if data.get("ehat") is not None:
        ehat, raw = parse_axis(data["ehat"])
    notes = data.get("notes", "")
    if not isinstance(notes, str):
        raise InputError("notes", "expected a string")
    return CrystalSpec(name=name, U=U, ehat=ehat, ehat_raw=raw, monoclinic=mono, notes=notes,
                       expected=dict(data.get("expected", {})))


def load_crystal(path) -> CrystalSpec:
    """Read and validate a crystal file; ``bundled:<name>`` selects packaged data."""
    p = str(path)
    if p.startswith("bundled:"):
        return bundled_crystal(p.split(":", 1)[1])
    try:
        text = Path(p).read_text()
    except OSError as exc:
        raise InputError("$", f"cannot read {p}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("$", f"invalid JSON ({exc.msg}, line {exc.lineno})") from None
    return parse_crystal(data, source=p)


def bundled_names():
    return list(BUNDLED)


def bundled_path(name):
    return resources.files("cofactor").joinpath("data", f"{name.lower()}.json")


def bundled_crystal(name) -> CrystalSpec:
    if name.lower() not in BUNDLED:
        raise InputError("name", f"unknown bundled crystal {name!r} (have {', '.join(BUNDLED)})")
    return parse_crystal(json.loads(bundled_path(name).read_text()), source=name)
