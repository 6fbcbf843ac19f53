"""Desk-scale verification suite.

Each check reproduces one acceptance criterion and returns a
:class:`CheckResult` whose ``payload`` is the deterministic data the check
produced (used to compare runs and worker counts).
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import girardeau as gd
from . import hyl
from .exact import Exact
from .lattice import LatticeMomentum
from .metastability import landau_vc, girardeau_window_spec
from .points import dumps
from .thermolimit import limit_points, run_sweep, scan_critical_velocity, verdict_from_report

__all__ = ["CheckResult", "CHECKS", "run_checks", "check_determinism", "report_json", "format_table"]

MUTATIONS = ("eps2-sign",)


@dataclass
class CheckResult:
    cid: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit: float | None = None
    payload: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)


def _timed(cid, name, limit, fn, **kw) -> CheckResult:
    t0 = time.perf_counter()
    parts, detail, payload = fn(**kw)
    dt = time.perf_counter() - t0
    ok = all(parts.values())
    if limit is not None and dt >= limit:
        ok = False
        detail += f"; runtime {dt:.1f}s >= {limit}s"
    return CheckResult(cid, name, ok, detail, dt, limit, payload, parts)


# -- 1: oracle equivalence ----------------------------------------------------

def _oracle_equivalence(jobs=1, mutate=None):
    parts, rows, worst = {}, [], 0.0
    for N in (3, 5, 7):
        params = gd.GirardeauParams(N, N)
        spec = gd.oracle_spectrum(params, None, 10, 30, jobs=jobs)
        table = {(p.momentum.coords, p.energy) for p in spec}
        by_p: dict = {}
        for p in spec:
            by_p.setdefault(p.momentum.coords, []).append(p.energy)
        closed = gd.closed_form_points(params, None, 10, 30, max_cascade=3)
        misses = 0
        for pt in closed:
            e = pt.energy
            if mutate == "eps2-sign" and pt.content[0] in ("composite", "cascade") and (
                pt.content[0] == "cascade" or pt.content[2]
            ):
                e = -e
            hit = (pt.momentum.coords, e) in table
            misses += not hit
            near = min((abs(float(e) - float(x)) for x in by_p.get(pt.momentum.coords, [])), default=math.inf)
            worst = max(worst, near)
            rows.append([N, pt.label, str(e), pt.momentum.coords[0], hit])
        parts[f"N={N}"] = misses == 0
    detail = f"{len(rows)} closed-form points, worst |dE| = {worst:.3g}"
    return parts, detail, {"rows": rows}


# -- 2: spectral shift ------------------------------------------------------------

def _spectral_shift(jobs=1):
    parts, rows = {}, []
    for N in (3, 5, 7):
        params = gd.GirardeauParams(N, N)
        rest = gd.oracle_spectrum(params, None, 10, 30, jobs=jobs)
        ok_shift = ok_min = True
        for j in range(-3, 4):
            v = LatticeMomentum((j,), params.side)
            boosted = gd.oracle_spectrum(params, v, 10, 30, jobs=jobs)
            lhs = Counter((p.energy, p.momentum.coords) for p in boosted)
            rhs = Counter((p.energy + v.dot(p.momentum), p.momentum.coords) for p in rest)
            ok_shift &= lhs == rhs
            low = gd.oracle_minimum(params, v, 10)
            target = -v.kinetic() * N
            ok_min &= low.energy == target
            rows.append([N, j, len(boosted), str(low.energy), list(low.content[1])])
        parts[f"N={N} shift"] = ok_shift
        parts[f"N={N} minimum"] = ok_min
    return parts, f"{len(rows)} (N, v) pairs", {"rows": rows}


# -- 3: NESS ladder -------------------------------------------------------------

def _ness_ladder(jobs=1):
    rep = run_sweep("girardeau", 1, 1.0, 7 * math.pi, 6, jobs=jobs, max_cascade=4)
    labels = [("cascade", j) for j in range(1, 5)]
    acc, rej = limit_points(rep, labels=labels)
    parts, rows = {}, []
    for lp in sorted(acc + rej, key=lambda x: x.label):
        j = lp.label[1]
        target = -2 * math.pi * j
        rel = abs(lp.energy - target) / abs(target)
        parts[f"j={j}"] = lp.converged and rel <= 1e-2 and lp.exponent >= 0.9
        rows.append([j, lp.energy, rel, lp.exponent, lp.residual])
    worst = max(r[2] for r in rows)
    qmin = min(r[3] for r in rows)
    return parts, f"max rel err {worst:.2e}, min q {qmin:.3f}", {"rows": rows}


# -- 4: Girardeau metastability -----------------------------------------------

def _metastability(jobs=1):
    spec = girardeau_window_spec(1, 3)
    grid = [round(0.1 * i, 10) for i in range(0, 63)]
    vc, results = scan_critical_velocity("girardeau", 1, 1, 6, grid, spec, jobs=jobs)
    below = [v for v in results if v <= vc]
    rep = run_sweep("girardeau", 1, vc, 1, 6, spec, jobs=jobs)
    verdict = verdict_from_report(rep)
    parts = {
        "positive below v_c": all(results[v] for v in below),
        "v_c in [pi-0.2, 2pi]": math.pi - 0.2 <= vc <= 2 * math.pi,
        "nontrivial": verdict.nontrivial,
    }
    detail = f"empirical v_c = {vc}, min extrapolated at v_c = {verdict.min_extrapolated:.4g}"
    return parts, detail, {"vc": vc, "scan": [[v, ok] for v, ok in results.items()]}


# -- 5: HYL brute force ------------------------------------------------------------

def literal_split_excess(config: hyl.OccupationConfig, params: hyl.HylParams) -> Exact:
    """``2 a_tilde sum_{k != l} n_k n_l / V`` over the excited modes (ordered pairs)."""
    ns = [n for k, n in config.modes if any(k)]
    s = sum(a * b for i, a in enumerate(ns) for j, b in enumerate(ns) if i != j)
    return params.a_tilde * Fraction(2 * s) / params.volume


def exact_split_excess(config: hyl.OccupationConfig, params: hyl.HylParams, v) -> Exact:
    """Kinetic cost of leaving mode ``v`` plus ``a_tilde sum_{k<l} n_k n_l / V``."""
    cv = v.coords
    ns = [(k, n) for k, n in config.modes if any(k)]
    kin = sum(n * sum((a - b) ** 2 for a, b in zip(k, cv)) for k, n in ns)
    pairs = sum(a * b for (_, a), (_, b) in itertools.combinations(ns, 2))
    return params.half_unit * kin + params.a_tilde * Fraction(pairs) / params.volume


def _hyl_brute_force(jobs=1):
    params = hyl.HylParams(6, 6, 1, 1)
    N = params.N
    ok_global = ok_fixed = ok_literal = ok_exact = True
    rows, splits, mismatch = [], 0, 0
    for j in range(-3, 4):
        v = LatticeMomentum((j,), params.side)
        cfg, e = hyl.brute_force_minimum(params, v, 3, jobs=jobs)
        ok_global &= cfg == hyl.two_mode_config(N, params, v) and e == -v.kinetic() * N
        rows.append([j, [list(k) + [n] for k, n in cfg.modes], str(e)])
        if j == 0:
            continue  # mode v coincides with mode 0
        for n in range(N + 1):
            cfg_n, e_n = hyl.brute_force_minimum(params, v, 3, fixed_depletion=n, jobs=jobs)
            ref = hyl.two_mode_energy(n, params, v)
            ok_fixed &= e_n == ref
            for c in hyl.enumerate_configs(params, 3, fixed_depletion=n):
                if sum(1 for k, _ in c.modes if any(k)) != 2:
                    continue
                splits += 1
                excess = hyl.split_excess(c, params, v)
                lit = excess == literal_split_excess(c, params)
                ok_literal &= lit
                mismatch += not lit
                ok_exact &= excess == exact_split_excess(c, params, v) and excess > 0
    parts = {
        "global minimum n_v = N": ok_global,
        "two-mode minimal at fixed depletion": ok_fixed,
        "split excess = 2a sum_{k!=l} n_k n_l / V": ok_literal,
        "split excess = kinetic + a sum_{k<l} n_k n_l / V": ok_exact,
    }
    detail = f"{splits} three-way splits, {mismatch} differ from the literal excess"
    return parts, detail, {"rows": rows, "splits": splits, "mismatch": mismatch}


# -- 6: HYL two-mode windows -----------------------------------------------------

def _hyl_windows():
    params = hyl.HylParams(100, 100, 1, 1)
    st = hyl.two_mode_stationary(params, 1)
    f = [hyl.two_mode_energy(n, params, 1) for n in range(params.N + 1)]
    diffs = []
    for V in (100, 200, 400, 800, 1600, 3200):
        p = hyl.HylParams(V, V, 1, 1)
        diffs.append(float(hyl.depletion_tail(2, p, 1) - hyl.depletion_tail(1, p, 1)))
    parts = {
        "stationary (25, 0, 50)": (st.n_max, st.n_min1, st.n_min2) == (25, 0, 50),
        "non-negative for n <= 50": all(x >= 0 for x in f[:51]),
        "decreasing for n >= 50": all(a > b for a, b in zip(f[50:], f[51:])),
        "tail(10) = -6": hyl.depletion_tail(10, params, 1) == -6,
        "tail step -> -0.5": abs(diffs[-1] + 0.5) <= 1e-2,
    }
    detail = f"tail steps {', '.join(f'{d:.5f}' for d in diffs)}"
    return parts, detail, {"diffs": diffs, "f": [str(x) for x in f]}


# -- 7: mean-field null result ---------------------------------------------------

def _mean_field(seed=0):
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(1000):
        d = int(rng.choice([1, 3]))
        side = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 5)))
        N = int(rng.integers(1, 30))
        a = Fraction(int(rng.integers(1, 100)), int(rng.integers(1, 10)))
        params = hyl.HylParams(N, side, a, d)
        modes = [tuple(int(x) for x in rng.integers(-4, 5, size=d)) for _ in range(4)]
        counts = rng.multinomial(N, [0.25] * 4)
        cfg = hyl.OccupationConfig(tuple(zip(modes, counts.tolist())), side)
        free = sum((LatticeMomentum(k, side).kinetic() * n for k, n in cfg.modes), Exact())
        ok &= hyl.mean_field_shifted_energy(cfg, params) == free
    vcs, ok_vc = [], True
    for n in range(1, 7):
        L = 2 * n * 5
        params = hyl.HylParams(L, L, 1, 1)
        pts = hyl.free_points(params, None, 4 * n)
        vc = landau_vc(pts)
        ok_vc &= vc == Exact.pi_power(1, Fraction(1, L))
        vcs.append(str(vc))
    parts = {"shifted = free (1000 configs)": ok, "landau v_c = pi/L": ok_vc}
    return parts, f"v_c along sweep: {', '.join(vcs)}", {"vcs": vcs}


# -- 8: dilute gas ------------------------------------------------------------------

def _dilute():
    mpmath.mp.dps = 40
    worst = 0.0
    for rho, a in [(1.0, 0.01), (0.5, 0.002), (2.0, 1e-4), (1.0, 1e-2 ** (1 / 3) * 1e-2)]:
        c = hyl.dilute_expansion(rho, a, 2)
        e1 = 4 * mpmath.pi * mpmath.mpf(a) * mpmath.mpf(rho) ** 2
        ratio = 128 * mpmath.sqrt(mpmath.mpf(rho) * mpmath.mpf(a) ** 3) / (15 * mpmath.sqrt(mpmath.pi))
        worst = max(worst, float(abs(c.e1 / e1 - 1)), float(abs((c.e2 / c.e1) / ratio - 1)))
    order_ok = True
    for a in (Fraction(1, 100), Fraction(3, 7), 1):
        at = hyl.coupling_from_scattering(a)
        params = hyl.HylParams(8, 2, at, 1)
        chk = hyl.effective_order_check(params, samples=10)
        order_ok &= chk.ok and chk.e0 == at * params.rho ** 2 / 2
    parts = {"coefficients to 1e-12": worst <= 1e-12, "e0 = a rho^2 / 2 = 4 pi a rho^2": order_ok}
    return parts, f"worst relative error {worst:.2e}", {"worst": worst}


CHECKS: dict[str, tuple[str, float | None, Callable, tuple]] = {
    "1": ("Girardeau oracle equivalence", 10.0, _oracle_equivalence, ("jobs", "mutate")),
    "2": ("Spectral-shift identity", 30.0, _spectral_shift, ("jobs",)),
    "3": ("NESS ladder", 60.0, _ness_ladder, ("jobs",)),
    "4": ("Girardeau metastability", None, _metastability, ("jobs",)),
    "5": ("HYL brute force", 30.0, _hyl_brute_force, ("jobs",)),
    "6": ("HYL two-mode windows", None, _hyl_windows, ()),
    "7": ("Mean-field null result", None, _mean_field, ()),
    "8": ("Dilute-gas coefficients", None, _dilute, ()),
}


def run_check(cid: str, jobs: int = 1, mutate: str | None = None) -> CheckResult:
    name, limit, fn, accepts = CHECKS[cid]
    kw = {}
    if "jobs" in accepts:
        kw["jobs"] = jobs
    if "mutate" in accepts:
        kw["mutate"] = mutate
    return _timed(cid, name, limit, fn, **kw)


def run_checks(ids=None, jobs: int = 1, mutate: str | None = None) -> list[CheckResult]:
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}")
    return [run_check(cid, jobs, mutate) for cid in (ids or CHECKS)]


def check_determinism(ids=None, jobs_values=(1, 4)) -> CheckResult:
    """Re-run checks and compare their serialized payloads byte for byte."""
    t0 = time.perf_counter()
    ids = list(ids or CHECKS)
    blobs = []
    for jobs in (jobs_values[0],) + tuple(jobs_values):
        blobs.append({cid: dumps(run_check(cid, jobs).payload) for cid in ids})
    parts = {f"check {cid}": all(b[cid] == blobs[0][cid] for b in blobs) for cid in ids}
    detail = f"{len(blobs)} runs, jobs in {list(jobs_values)}"
    return CheckResult("9", "Determinism", all(parts.values()), detail, time.perf_counter() - t0, None, {}, parts)


def report_json(results: list[CheckResult]) -> str:
    """Run-independent JSON report (no timings)."""
    return dumps({
        "checks": [
            {
                "id": r.cid,
                "name": r.name,
                "passed": r.passed,
                "parts": r.parts,
                "detail": r.detail.split("; runtime")[0],
                "payload": r.payload,
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    })


def format_table(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] C{r.cid} {r.name}: {r.detail} ({r.seconds:.1f}s)")
        for part, ok in r.parts.items():
            if not ok:
                lines.append(f"       failed: {part}")
    return "\n".join(lines)
