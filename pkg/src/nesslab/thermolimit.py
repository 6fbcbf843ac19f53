"""Sweeps along growing boxes, label-matched trajectories and limit points.

A sweep evaluates one model on the boxes ``side = 2 n L_base`` at fixed
density, snapping the limiting velocity to each box lattice.  Points are
relabelled by size-independent excitation labels (cascade length, two-mode
population, physical momenta of particle-hole excitations) so that
trajectories are joined by label only.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from . import girardeau as gd
from . import hyl
from .exact import Exact
from .lattice import BoxSpec, snap_velocity, thermo_sequence, to_fraction
from .metastability import (
    SubspaceSpec,
    Verdict,
    filter_cd,
    filter_depletion,
    fit_inverse_size,
    girardeau_window_spec,
    superfluid_verdict,
)
from .points import EigenPoint, dumps, format_content, point_record

__all__ = [
    "MODELS",
    "SizeRecord",
    "Trajectory",
    "LimitPoint",
    "SweepReport",
    "run_sweep",
    "limit_points",
    "landau_window_check",
    "scan_critical_velocity",
    "verdict_from_report",
    "default_spec",
]

MODELS = ("girardeau", "hyl", "mean-field")
DEFAULT_POINT_CAP = 10 ** 5


@dataclass(frozen=True)
class SizeRecord:
    n_index: int
    N: int
    side: Fraction
    v_coords: tuple[int, ...]
    v_value: tuple[float, ...]
    points: tuple[EigenPoint, ...]
    filtered: tuple[EigenPoint, ...]


@dataclass(frozen=True)
class Trajectory:
    label: tuple
    n_index: tuple[int, ...]
    sides: tuple[float, ...]
    Ns: tuple[int, ...]
    energies: tuple[float, ...]
    momenta: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class LimitPoint:
    label: tuple
    energy: float
    momentum: tuple[float, ...]
    exponent: float
    amplitude: float
    residual: float
    tol: float
    converged: bool
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "label": format_content(self.label),
            "E": self.energy,
            "P": list(self.momentum),
            "q": self.exponent if math.isfinite(self.exponent) else None,
            "c": self.amplitude,
            "residual": self.residual,
            "tol": self.tol,
            "converged": self.converged,
            "reason": self.reason,
        }


@dataclass
class SweepReport:
    model: str
    rho: Fraction
    v_lim: tuple[float, ...]
    L_base: Fraction
    d: int
    spec: SubspaceSpec
    a_tilde: Exact | None
    sizes: list[SizeRecord]
    meta: dict = field(default_factory=dict)

    @property
    def v_norm(self) -> float:
        return math.hypot(*self.v_lim)

    def trajectories(self) -> dict[tuple, Trajectory]:
        rows: dict[tuple, list] = {}
        for rec in self.sizes:
            for p in rec.points:
                rows.setdefault(p.content, []).append((rec, p))
        out = {}
        for label, items in rows.items():
            out[label] = Trajectory(
                label,
                tuple(r.n_index for r, _ in items),
                tuple(float(r.side) for r, _ in items),
                tuple(r.N for r, _ in items),
                tuple(float(p.energy) for _, p in items),
                tuple(p.momentum_value for _, p in items),
            )
        return out

    def as_dict(self, include_points: bool = True) -> dict:
        sizes = []
        for r in self.sizes:
            entry = {
                "n_index": r.n_index,
                "N": r.N,
                "L": r.side,
                "v_coords": list(r.v_coords),
                "v": list(r.v_value),
                "n_points": len(r.points),
                "n_filtered": len(r.filtered),
            }
            if include_points:
                entry["points"] = [point_record(p) for p in r.points]
            sizes.append(entry)
        return {"meta": self.meta, "sizes": sizes}

    def to_json(self, limits: Sequence[LimitPoint] = (), verdict: Verdict | None = None) -> str:
        doc = self.as_dict()
        doc["limit_points"] = [lp.as_dict() for lp in limits]
        doc["verdict"] = verdict.as_dict() if verdict is not None else None
        return dumps(doc)

    def trajectories_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "L", "N", "E", "P"])
        for label, tr in sorted(self.trajectories().items(), key=lambda kv: format_content(kv[0])):
            for L, N, E, P in zip(tr.sides, tr.Ns, tr.energies, tr.momenta):
                w.writerow([
                    format_content(label),
                    format(L, ".17g"),
                    N,
                    format(E, ".17g"),
                    ";".join(format(x, ".17g") for x in P),
                ])
        return buf.getvalue()


# -- per-size point clouds ---------------------------------------------------

def _physical(p: EigenPoint, n_index: int) -> EigenPoint:
    """Relabel lattice indices by momenta in units of ``pi / L_base``."""
    kind, ks = p.content
    label = (kind, tuple(Fraction(c, n_index) for c in ks))
    return EigenPoint(p.energy, p.momentum, label, p.rest_energy, p.exact, p.depletion)


def _girardeau_cloud(N, side, vel, n_index, opts):
    params = gd.GirardeauParams(N, side, opts.get("kf_mode", "finite"))
    spec: SubspaceSpec = opts["spec"]
    caps = girardeau_window_spec(opts["rho"], spec.r or 1)
    c = spec.c if spec.c is not None else caps.c
    d = spec.d if spec.d is not None else caps.d
    pts = [_physical(p, n_index) for p in gd.restricted_excitations(params, vel, c, d, spec.r or 1)]
    m_top = min(opts.get("max_cascade", 8), N)
    pts += [gd.umklapp_cascade(m, vel, params) for m in range(1, m_top + 1)]
    return pts


def _hyl_cloud(N, side, vel, n_index, opts, mean_field=False):
    params = hyl.HylParams(N, side, opts["a_tilde"], opts["d"])
    family = opts.get("family", "all")
    pts: list[EigenPoint] = []
    # at rest the free gas has no moved population to track
    if family in ("all", "two_mode") and not (mean_field and not any(vel.coords)):
        pts += hyl.two_mode_points(params, vel, mean_field=mean_field)
    if family in ("all", "tail") and not mean_field:
        pts += hyl.tail_points(params, vel, range(0, opts.get("tail_max", 10) + 1))
    if mean_field and family in ("all", "free"):
        w = opts.get("free_window", 2) * n_index
        if (2 * w + 1) ** params.d > opts["point_cap"]:
            raise hyl.BudgetExceeded("free-particle window exceeds the point cap")
        pts += [_physical(p, n_index) for p in hyl.free_points(params, vel, w)]
    return pts


def _size_task(args):
    n_index, N, side, model, v_lim, opts = args
    d = opts["d"]
    box = BoxSpec.from_side(side, d)
    vel = snap_velocity(v_lim, box)
    if model == "girardeau":
        pts = _girardeau_cloud(N, side, vel, n_index, opts)
    elif model == "hyl":
        pts = _hyl_cloud(N, side, vel, n_index, opts)
    else:
        pts = _hyl_cloud(N, side, vel, n_index, opts, mean_field=True)
    if len(pts) > opts["point_cap"]:
        raise hyl.BudgetExceeded(f"{len(pts)} points exceed the cap {opts['point_cap']}")
    spec: SubspaceSpec = opts["spec"]
    kept = filter_cd(pts, spec)
    if spec.rho_max is not None:
        kept = filter_depletion([p for p in kept if p.depletion is not None], spec, box.volume)
    return SizeRecord(n_index, N, side, vel.coords, vel.value, tuple(pts), tuple(kept))


def default_spec(model: str, rho, v_lim, a_tilde=None) -> SubspaceSpec:
    """Size-independent caps used when a sweep is given none.

    Girardeau and mean-field use ``c = 2 (pi rho)**2``, ``d = pi rho`` with one
    excitation; HYL caps the depleted density at ``rho - v**2 / (2 a_tilde)``
    inside its window and applies no cap outside it.
    """
    if model == "hyl":
        vec = v_lim if isinstance(v_lim, (tuple, list)) else (v_lim,)
        v2 = sum(to_fraction(x) ** 2 for x in vec)
        cap = to_fraction(rho) - v2 / (2 * hyl._coupling(a_tilde))
        return SubspaceSpec(rho_max=cap if cap > 0 else None)
    return girardeau_window_spec(rho, 1)


def run_sweep(
    model: str,
    rho,
    v_lim,
    L_base,
    n_max: int,
    spec: SubspaceSpec | None = None,
    a_tilde=None,
    d: int = 1,
    jobs: int = 1,
    point_cap: int = DEFAULT_POINT_CAP,
    **options,
) -> SweepReport:
    """Evaluate ``model`` on boxes ``n = 1..n_max`` at density ``rho``.

    Girardeau clouds hold the restricted particle-hole excitations (caps from
    ``spec``, defaulting to ``c = 2 (pi rho)**2``, ``d = pi rho``) plus umklapp
    cascades up to ``max_cascade``.  HYL clouds hold the two-mode family and
    the depletion tail; mean-field clouds the two-mode family and the free
    single-particle excitations.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    if n_max < 3:
        raise ValueError("a sweep needs n_max >= 3")
    if model == "girardeau" and d != 1:
        raise ValueError("the Girardeau model is one-dimensional")
    if model != "girardeau":
        if a_tilde is None:
            raise ValueError(f"model {model} needs a coupling a_tilde")
        a_tilde = hyl._coupling(a_tilde)
    if spec is None:
        spec = default_spec(model, rho, v_lim, a_tilde)
    parity = "odd" if model == "girardeau" else None
    seq = thermo_sequence(L_base, n_max, rho, d, parity)
    opts = dict(options, spec=spec, d=d, a_tilde=a_tilde, point_cap=point_cap, rho=to_fraction(rho))
    tasks = [(n, N, side, model, v_lim, opts) for n, (N, side) in enumerate(seq, start=1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            sizes = list(pool.map(_size_task, tasks))
    else:
        sizes = [_size_task(t) for t in tasks]
    v_vec = tuple(float(x) for x in (v_lim if isinstance(v_lim, (tuple, list)) else (v_lim,)))
    meta = {
        "model": model,
        "rho": to_fraction(rho),
        "v_lim": list(v_vec),
        "L_base": to_fraction(L_base),
        "n_max": n_max,
        "d": d,
        "a_tilde": a_tilde,
        "spec": spec.as_dict(),
        "point_cap": point_cap,
        "options": {k: v for k, v in sorted(options.items())},
    }
    return SweepReport(model, to_fraction(rho), v_vec, to_fraction(L_base), d, spec, a_tilde, sizes, meta)


# -- limit points ------------------------------------------------------------

def _power_law(L, eps, c, q):
    return eps + c * L ** (-q)


def _fit_power(L: np.ndarray, E: np.ndarray) -> tuple[float, float, float, float]:
    eps0, c0 = fit_inverse_size(L, E)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", (OptimizeWarning, RuntimeWarning))
            (eps, c, q), _ = curve_fit(
                _power_law, L, E, p0=(eps0, c0, 1.0), bounds=([-np.inf, -np.inf, 0.0], [np.inf, np.inf, 10.0]),
                maxfev=20000,
            )
    except (RuntimeError, ValueError):
        eps, c, q = eps0, c0, 1.0
    resid = E - _power_law(L, eps, c, q)
    return float(eps), float(c), float(q), float(np.sqrt(np.mean(resid ** 2)))


def limit_points(
    report: SweepReport,
    tol: float | None = None,
    min_exponent: float = 0.9,
    labels: Sequence[tuple] | None = None,
) -> tuple[list[LimitPoint], list[LimitPoint]]:
    """Fit ``E(L) = eps + c L**-q`` along every trajectory with three or more
    sizes.  Returns ``(converged, rejected)``; nothing is dropped silently.

    ``tol`` defaults to ``1e-3 |eps| + 1e-9`` and bounds the RMS residual.
    """
    accepted, rejected = [], []
    trajs = report.trajectories()
    keys = list(labels) if labels is not None else sorted(trajs, key=format_content)
    for label in keys:
        tr = trajs.get(label)
        if tr is None:
            rejected.append(LimitPoint(label, math.nan, (), math.nan, math.nan, math.nan, math.nan, False, "absent"))
            continue
        L = np.asarray(tr.sides)
        E = np.asarray(tr.energies)
        P = np.asarray(tr.momenta)
        if len(L) < 3:
            rejected.append(LimitPoint(label, float(E[-1]), tuple(P[-1]), math.nan, math.nan, math.nan, math.nan, False, "fewer than 3 sizes"))
            continue
        mom = tuple(fit_inverse_size(L, P[:, i])[0] for i in range(P.shape[1]))
        scale = max(1.0, float(np.max(np.abs(E))))
        if np.ptp(E) <= 1e-12 * scale:
            eps = float(E[-1])
            t = 1e-3 * abs(eps) + 1e-9 if tol is None else tol
            accepted.append(LimitPoint(label, eps, mom, math.inf, 0.0, 0.0, t, True, "constant"))
            continue
        eps, c, q, res = _fit_power(L, E)
        t = 1e-3 * abs(eps) + 1e-9 if tol is None else tol
        reasons = []
        if q < min_exponent:
            reasons.append(f"exponent {q:.3g} < {min_exponent}")
        if res > t:
            reasons.append(f"residual {res:.3g} > {t:.3g}")
        lp = LimitPoint(label, eps, mom, q, c, res, t, not reasons, "; ".join(reasons))
        (accepted if lp.converged else rejected).append(lp)
    return accepted, rejected


def landau_window_check(report: SweepReport) -> bool:
    """Whether ``v_lim`` lies in the model's open NESS window."""
    v = report.v_norm
    rho = float(report.rho)
    if report.model == "girardeau":
        return 0 < v < 2 * math.pi * rho
    if report.model == "hyl":
        return 0 < v and v * v < 2 * float(report.a_tilde) * rho
    return False


def verdict_from_report(
    report: SweepReport, tol: float = 1e-9, vc_scan=None
) -> Verdict:
    sizes = [(r.side, r.points) for r in report.sizes]
    last = report.sizes[-1]
    scale = last.N * report.v_norm ** 2 / 2
    return superfluid_verdict(
        sizes,
        report.spec,
        report.v_norm,
        model=report.model,
        tol=tol,
        dim=report.d,
        scale=scale,
        vc_scan=vc_scan,
        in_window=landau_window_check(report),
    )


def scan_critical_velocity(
    model: str,
    rho,
    L_base,
    n_max: int,
    v_values: Sequence[float],
    spec: SubspaceSpec | None = None,
    tol: float = 1e-9,
    **kwargs,
) -> tuple[float, dict[float, bool]]:
    """Largest tested speed below which every tested speed keeps all filtered
    extrapolated energies ``>= -tol``, with the pass/fail map."""
    results: dict[float, bool] = {}
    for v in sorted(float(x) for x in v_values):
        rep = run_sweep(model, rho, v, L_base, n_max, spec, **kwargs)
        verdict = verdict_from_report(rep, tol)
        ok = bool(verdict.extrapolated) and verdict.min_extrapolated >= -tol
        results[v] = ok
    vc = 0.0
    for v, ok in results.items():
        if not ok:
            break
        vc = v
    return vc, results
