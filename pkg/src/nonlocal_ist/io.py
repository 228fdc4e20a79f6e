"""JSON and CSV formats.

Complex arrays are stored as ``[[re, im], ...]``. Every JSON object has a
``kind`` field and may carry a ``provenance`` block with the full
configuration that produced it. Output is deterministic: no timestamps,
keys in insertion order, floats written with ``repr`` precision.

==============  ==========================================================
kind            fields
==============  ==========================================================
field           lo, hi, n, values
potential       lo, hi, n, values, sigma, l1_norm, small_norm, metadata
scattering      kgrid{lo,hi,n}, sigma, a, b, d, residuals, metadata
reflection      kgrid{lo,hi,n}, sigma, t, r1, r2, sup_r, small_norm,
                realizable, metadata
report          overall, items[{name,value,tolerance,pass,anchor,note}],
                warnings
==============  ==========================================================

CSV exports: fields and potentials as ``x, re, im``; reflection data as
``k, re_r1, im_r1, re_r2, im_r2``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .grid import SampledField, UniformGrid
from .report import DiagnosticsReport, ReportItem
from .scattering import Potential, ReflectionPair, ScatteringData


def _pairs(values) -> list:
    v = np.asarray(values, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in v]


def _complex(pairs, what: str) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError(f"{what}: expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _grid(obj: dict, what: str) -> UniformGrid:
    try:
        return UniformGrid(float(obj["lo"]), float(obj["hi"]), int(obj["n"]))
    except KeyError as exc:
        raise InvalidInputError(f"{what}: missing grid key {exc}") from exc


def _jsonable(meta):
    """Metadata with numpy scalars turned into plain numbers."""
    return json.loads(json.dumps(meta, default=lambda o: o.item() if hasattr(o, "item") else str(o)))


def to_dict(obj, provenance: Optional[dict] = None) -> dict:
    if isinstance(obj, Potential):
        out = {"kind": "potential", **obj.grid.to_dict(), "sigma": obj.sigma,
               "l1_norm": obj.l1_norm, "small_norm": bool(obj.small_norm),
               "metadata": _jsonable(obj.metadata), "values": _pairs(obj.values)}
    elif isinstance(obj, SampledField):
        out = {"kind": "field", **obj.grid.to_dict(), "values": _pairs(obj.values)}
    elif isinstance(obj, ScatteringData):
        out = {"kind": "scattering", "kgrid": obj.kgrid.to_dict(), "sigma": obj.sigma,
               "residuals": {"determinant": obj.det_residual, "symmetry_a": obj.sym_residual_a,
                             "symmetry_d": obj.sym_residual_d, "wronskian": obj.wronskian_residual,
                             "tail": obj.tail_residual},
               "flagged": bool(obj.flagged),
               "small_norm": obj.small_norm, "metadata": _jsonable(obj.metadata),
               "a": _pairs(obj.a), "b": _pairs(obj.b), "d": _pairs(obj.d)}
    elif isinstance(obj, ReflectionPair):
        out = {"kind": "reflection", "kgrid": obj.kgrid.to_dict(), "sigma": obj.sigma, "t": obj.t,
               "sup_r": obj.sup_r, "small_norm": obj.small_norm, "realizable": bool(obj.realizable),
               "metadata": _jsonable(obj.metadata), "r1": _pairs(obj.r1), "r2": _pairs(obj.r2)}
    elif isinstance(obj, DiagnosticsReport):
        out = {"kind": "report", **obj.to_dict()}
    else:
        raise InvalidInputError(f"cannot serialise objects of type {type(obj).__name__}")
    if provenance is not None:
        out["provenance"] = _jsonable(provenance)
    return out


def from_dict(obj: dict):
    kind = obj.get("kind")
    if kind is None:
        # bare field format {lo, hi, n, values}
        kind = "field" if {"lo", "hi", "n", "values"} <= set(obj) else None
    if kind == "field":
        return SampledField(_grid(obj, "field"), _complex(obj["values"], "values"))
    if kind == "potential":
        field = SampledField(_grid(obj, "potential"), _complex(obj["values"], "values"))
        return Potential(field, int(obj.get("sigma", 1)), dict(obj.get("metadata", {})))
    if kind == "scattering":
        kg = _grid(obj["kgrid"], "kgrid")
        return ScatteringData(kg, _complex(obj["a"], "a"), _complex(obj["b"], "b"), _complex(obj["d"], "d"),
                              int(obj.get("sigma", 1)), obj.get("small_norm"),
                              float(obj.get("residuals", {}).get("wronskian", float("nan"))),
                              metadata=dict(obj.get("metadata", {})))
    if kind == "reflection":
        kg = _grid(obj["kgrid"], "kgrid")
        return ReflectionPair(kg, _complex(obj["r1"], "r1"), _complex(obj["r2"], "r2"), float(obj.get("t", 0.0)),
                              int(obj.get("sigma", 1)), obj.get("small_norm"), bool(obj.get("realizable", True)),
                              dict(obj.get("metadata", {})))
    if kind == "report":
        items = [ReportItem(it["name"], float(it["value"]), float(it["tolerance"]), bool(it["pass"]),
                            it.get("anchor", "plumbing"), it.get("note", "")) for it in obj["items"]]
        return DiagnosticsReport(items, list(obj.get("warnings", [])))
    raise InvalidInputError(f"unrecognised file kind {kind!r}")


def save_json(obj, path, provenance: Optional[dict] = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_dict(obj, provenance), indent=1) + "\n")
    return path


def load_json(path):
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidInputError(f"{path}: top level must be a JSON object")
    return from_dict(obj)


def save_csv(obj, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(obj, ReflectionPair):
            w.writerow(["k", "re_r1", "im_r1", "re_r2", "im_r2"])
            for k, a, b in zip(obj.kgrid.nodes, obj.r1, obj.r2):
                w.writerow([repr(float(v)) for v in (k, a.real, a.imag, b.real, b.imag)])
        elif isinstance(obj, (Potential, SampledField)):
            field = obj.field if isinstance(obj, Potential) else obj
            w.writerow(["x", "re", "im"])
            for x, v in zip(field.grid.nodes, field.values):
                w.writerow([repr(float(u)) for u in (x, v.real, v.imag)])
        else:
            raise InvalidInputError(f"no CSV format for {type(obj).__name__}")
    return path


def load_field_csv(path) -> SampledField:
    """Read an ``x, re, im`` CSV back; the nodes must be uniform."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = data[:, 0]
    grid = UniformGrid(float(x[0]), float(x[-1]), len(x))
    if not np.allclose(x, grid.nodes, rtol=0, atol=1e-9 * max(1.0, abs(grid.hi - grid.lo))):
        raise InvalidInputError(f"{path}: x column is not a uniform grid")
    return SampledField(grid, data[:, 1] + 1j * data[:, 2])
