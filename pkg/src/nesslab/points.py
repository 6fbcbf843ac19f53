"""Energy-momentum points and their bit-stable JSON/CSV encodings."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .exact import Exact
from .lattice import LatticeMomentum

__all__ = ["EigenPoint", "format_content", "dumps", "points_to_json", "points_to_csv", "jsonable"]


def format_content(content: tuple) -> str:
    """Human-readable label of an excitation-content tuple."""
    kind, *rest = content
    if not rest:
        return str(kind)

    def fmt(x):
        if isinstance(x, tuple):
            return "(" + ",".join(fmt(y) for y in x) + ")"
        return str(x)

    return f"{kind}:" + ";".join(fmt(x) for x in rest)


@dataclass(frozen=True)
class EigenPoint:
    """An eigenvalue of a boosted Hamiltonian and its total momentum.

    ``energy`` is the boosted eigenvalue, ``rest_energy`` the same eigenvector's
    energy at zero velocity (relative to the ground state).  ``content``
    records where the point comes from, e.g. ``("cascade", 3)``.
    """

    energy: Any
    momentum: LatticeMomentum | tuple[float, ...]
    content: tuple
    rest_energy: Any = None
    exact: bool = True
    depletion: Any = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return format_content(self.content)

    @property
    def momentum_value(self) -> tuple[float, ...]:
        if isinstance(self.momentum, LatticeMomentum):
            return self.momentum.value
        return tuple(float(x) for x in self.momentum)

    @property
    def momentum_norm(self):
        if isinstance(self.momentum, LatticeMomentum):
            return self.momentum.exact_norm()
        return math.hypot(*self.momentum_value)

    @property
    def energy_float(self) -> float:
        return float(self.energy)


# -- serialization ---------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".e") else text + ".0"


def jsonable(obj):
    """Reduce Fractions, Exact values and dataclass-ish things to plain JSON
    types.  Exact and Fraction become strings (``p/q`` coefficients)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Exact):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits for floats."""
    out = io.StringIO()
    _write(jsonable(obj), out, 0)
    out.write("\n")
    return out.getvalue()


def _write(obj, out, depth):
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        keys = sorted(obj)
        for i, k in enumerate(keys):
            out.write(pad + _quote(k) + ": ")
            _write(obj[k], out, depth + 1)
            out.write(",\n" if i < len(keys) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        if all(not isinstance(v, (dict, list)) for v in obj):
            out.write("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad)
            _write(v, out, depth + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(end + "]")
    else:
        out.write(_scalar(obj))


def _quote(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _scalar(v) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v)
    return _quote(v)


def point_record(p: EigenPoint) -> dict:
    rec = {
        "E": float(p.energy),
        "P": list(p.momentum_value),
        "label": p.label,
        "exact": bool(p.exact),
    }
    if isinstance(p.energy, Exact):
        rec["E_exact"] = str(p.energy)
    if p.rest_energy is not None:
        rec["E_rest"] = float(p.rest_energy)
    return rec


def points_to_json(points: Iterable[EigenPoint], meta: dict) -> str:
    return dumps({"meta": meta, "points": [point_record(p) for p in points]})


def points_to_csv(points: Iterable[EigenPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "E", "P", "exact"])
    for p in points:
        w.writerow([
            p.label,
            _fmt_float(float(p.energy)),
            ";".join(_fmt_float(x) for x in p.momentum_value),
            int(bool(p.exact)),
        ])
    return buf.getvalue()
