"""Landau critical velocity, subspace filters, NESS witnesses and verdicts.

Everything here is model agnostic: inputs are :class:`EigenPoint` clouds
(or occupation configurations), one per box size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .exact import Exact
from .lattice import to_fraction
from .points import EigenPoint, format_content

__all__ = [
    "SubspaceSpec",
    "Verdict",
    "landau_vc",
    "filter_cd",
    "filter_depletion",
    "negativity_threshold",
    "ness_witness",
    "fit_inverse_size",
    "superfluid_verdict",
    "girardeau_window_spec",
    "excitation_count",
]


@dataclass(frozen=True)
class SubspaceSpec:
    """Size-independent caps selecting a low-energy subspace.

    ``c`` caps the unboosted energy, ``d`` the total momentum, ``r`` the number
    of elementary excitations and ``rho_max`` the depleted density.
    """

    c: object = None
    d: object = None
    r: int | None = None
    rho_max: object = None

    def __post_init__(self):
        for name in ("c", "d", "rho_max"):
            x = getattr(self, name)
            if x is not None and not x > 0:
                raise ValueError(f"{name} must be positive when given")
        if self.r is not None and (int(self.r) != self.r or self.r < 1):
            raise ValueError("r must be a positive integer when given")

    def as_dict(self) -> dict:
        return {"c": self.c, "d": self.d, "r": self.r, "rho_max": self.rho_max}


@dataclass(frozen=True)
class Verdict:
    """Classification of one model at one limiting velocity."""

    model: str
    v_lim: float
    is_ness: bool
    is_superfluid: bool
    empirical_vc: float
    witness: EigenPoint | None = None
    nontrivial: bool = False
    min_extrapolated: float = math.nan
    extrapolated: dict = field(default_factory=dict)
    spec: SubspaceSpec = field(default_factory=SubspaceSpec)
    in_window: bool | None = None

    def __post_init__(self):
        if self.is_ness and (self.witness is None or not self.witness.energy < 0):
            raise ValueError("a NESS verdict needs a negative-energy witness")
        if self.empirical_vc < 0:
            raise ValueError("empirical critical velocity must be non-negative")

    def as_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "E": float(self.witness.energy),
                "P": list(self.witness.momentum_value),
                "label": self.witness.label,
            }
        return {
            "model": self.model,
            "v_lim": self.v_lim,
            "is_ness": self.is_ness,
            "is_superfluid": self.is_superfluid,
            "empirical_vc": self.empirical_vc,
            "nontrivial": self.nontrivial,
            "min_extrapolated": self.min_extrapolated,
            "extrapolated": {k: v for k, v in sorted(self.extrapolated.items())},
            "spec": self.spec.as_dict(),
            "in_window": self.in_window,
            "witness": w,
        }


def landau_vc(points: Sequence[EigenPoint]):
    """``min E / |P|`` over points with nonzero momentum, clamped at 0.

    Exact when every energy and momentum norm is exact.
    """
    if not points:
        raise ValueError("landau_vc needs at least one point")
    best = None
    for p in points:
        norm = p.momentum_norm
        if not norm > 0:
            raise ValueError(f"point {p.label} has zero momentum")
        ratio = p.energy / norm
        if best is None or ratio < best:
            best = ratio
    if best < 0:
        return Exact() if isinstance(best, Exact) else 0.0
    return best


def excitation_count(p: EigenPoint) -> int | None:
    """Number of elementary excitations encoded in a point's label, if known."""
    kind = p.content[0]
    if kind == "type1":
        return len(p.content[1]) if isinstance(p.content[1], tuple) else 1
    if kind == "cascade":
        return p.content[1]
    if kind == "composite":
        return len(p.content[1]) + len(p.content[2])
    return None


def filter_cd(points: Sequence[EigenPoint], spec: SubspaceSpec) -> list[EigenPoint]:
    """Points with unboosted energy ``<= c``, ``|P| <= d`` and at most ``r``
    excitations; order preserved.  Missing caps do not filter."""
    out = []
    for p in points:
        rest = p.rest_energy if p.rest_energy is not None else p.energy
        if spec.c is not None and rest > spec.c:
            continue
        if spec.d is not None and p.momentum_norm > spec.d:
            continue
        if spec.r is not None:
            count = excitation_count(p)
            if count is not None and count > spec.r:
                continue
        out.append(p)
    return out


def _depletion_of(x):
    dep = getattr(x, "depletion", None)
    if dep is None:
        raise ValueError("item carries no depletion")
    return dep


def filter_depletion(items: Sequence, spec: SubspaceSpec, volume) -> list:
    """Configurations (or points carrying ``depletion``) with
    ``N - n_0 <= floor(rho_max * V)``."""
    if spec.rho_max is None:
        raise ValueError("spec has no rho_max")
    rm = spec.rho_max
    V = to_fraction(volume) if not isinstance(volume, float) else volume
    cap = math.floor(rm * V)
    return [x for x in items if _depletion_of(x) <= cap]


def negativity_threshold(scale=0.0) -> float:
    return max(1e-12, 1e-9 * abs(float(scale)))


def _is_negative(energy, scale) -> bool:
    if isinstance(energy, (Exact, int, Fraction)):
        return energy < 0
    return float(energy) < -negativity_threshold(scale)


def ness_witness(points: Sequence[EigenPoint], scale=0.0) -> EigenPoint | None:
    """The lowest point if its energy is negative beyond arithmetic noise.

    Exact energies use strict ``< 0``; floating ones must lie below
    ``-max(1e-12, 1e-9 |scale|)`` with ``scale`` typically ``N v**2 / 2``.
    """
    best = None
    for p in points:
        if best is None or p.energy < best.energy:
            best = p
    if best is not None and _is_negative(best.energy, scale):
        return best
    return None


def fit_inverse_size(sides: Sequence[float], energies: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``E = eps + c / L``; returns ``(eps, c)``."""
    L = np.asarray(sides, dtype=float)
    E = np.asarray(energies, dtype=float)
    A = np.column_stack([np.ones_like(L), 1.0 / L])
    (eps, c), *_ = np.linalg.lstsq(A, E, rcond=None)
    return float(eps), float(c)


def _key(p: EigenPoint):
    return p.content


def superfluid_verdict(
    sizes: Sequence[tuple[object, Sequence[EigenPoint]]],
    spec: SubspaceSpec,
    v_lim,
    model: str = "",
    tol: float = 1e-9,
    dim: int = 1,
    scale=0.0,
    key: Callable[[EigenPoint], object] = _key,
    vc_scan: Mapping[float, bool] | None = None,
    in_window: bool | None = None,
) -> Verdict:
    """Metastability verdict from per-size point clouds ``[(L, points), ...]``.

    Points are filtered by ``spec``, grouped by ``key`` across sizes, and each
    group seen at three or more sizes is extrapolated with ``E = eps + c/L``.
    The model is superfluid when every extrapolated energy is ``>= -tol`` and
    some is ``> tol``.  The NESS flag looks for a negative witness among the
    unfiltered points of the largest box.
    """
    if len(sizes) < 3:
        raise ValueError("a verdict needs at least three box sizes")
    groups: dict[object, list[tuple[float, float]]] = {}
    for side, pts in sizes:
        kept = filter_cd(pts, spec)
        if spec.rho_max is not None:
            kept = filter_depletion(kept, spec, to_fraction(side) ** dim)
        for p in kept:
            groups.setdefault(key(p), []).append((float(side), float(p.energy)))
    extrapolated = {}
    for k, rows in groups.items():
        if len({L for L, _ in rows}) < 3:
            continue
        eps, _ = fit_inverse_size([L for L, _ in rows], [E for _, E in rows])
        extrapolated[_label(k)] = eps
    values = list(extrapolated.values())
    positive = all(e >= -tol for e in values)
    nontrivial = any(e > tol for e in values)
    is_sf = bool(values) and positive and nontrivial
    largest = max(sizes, key=lambda s: to_fraction(s[0]))
    witness = ness_witness(largest[1], scale)
    v = float(v_lim)
    if vc_scan is not None:
        passing = [float(x) for x, ok in vc_scan.items() if ok]
        vc = max(passing, default=0.0)
    else:
        vc = abs(v) if is_sf else 0.0
    return Verdict(
        model=model,
        v_lim=v,
        is_ness=witness is not None,
        is_superfluid=is_sf,
        empirical_vc=vc,
        witness=witness,
        nontrivial=nontrivial,
        min_extrapolated=min(values, default=math.nan),
        extrapolated=extrapolated,
        spec=spec,
        in_window=in_window,
    )


def _label(k) -> str:
    return format_content(k) if isinstance(k, tuple) else str(k)


def girardeau_window_spec(rho, r: int = 3) -> SubspaceSpec:
    """Caps ``c = 2 (pi rho)**2``, ``d = pi rho`` for the Girardeau gas."""
    rho = to_fraction(rho)
    return SubspaceSpec(Exact.pi_power(2, 2 * rho * rho), Exact.pi_power(1, rho), r)
