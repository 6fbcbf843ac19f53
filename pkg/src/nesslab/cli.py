"""Command-line driver: ``nesslab spectrum | sweep | verify``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 enumeration budget exceeded, 4 non-converged trajectory under ``--strict``.
"""
from __future__ import annotations

import argparse
import configparser
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import girardeau as gd
from . import hyl
from .exact import Exact
from .lattice import BoxSpec, snap_velocity, to_fraction
from .metastability import SubspaceSpec
from .points import EigenPoint, points_to_csv, points_to_json
from .thermolimit import MODELS, limit_points, run_sweep, verdict_from_report
from .verify import MUTATIONS, check_determinism, format_table, report_json, run_checks

EXIT_VERIFY, EXIT_CONFIG, EXIT_BUDGET, EXIT_STRICT = 1, 2, 3, 4

_PI_RE = re.compile(r"^\s*([-+]?[0-9./eE+-]*?)\s*\*?\s*pi(?:\^(\d+))?(?:\s*/\s*(\d+))?\s*$")


class ConfigError(ValueError):
    pass


def parse_number(text):
    """Exact value of ``"3/2"``, ``"0.25"``, ``"8*pi"``, ``"pi/3"`` or ``"1/3pi^2"``."""
    if isinstance(text, (int, Fraction, Exact)):
        return text
    s = str(text).strip()
    m = _PI_RE.match(s)
    try:
        if m:
            coeff = m.group(1)
            coeff = Fraction(coeff) if coeff not in ("", "+", "-") else Fraction(f"{coeff}1")
            coeff /= int(m.group(3) or 1)
            return Exact.pi_power(int(m.group(2) or 1), coeff)
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def _positive(name, x):
    if x is not None and not x > 0:
        raise ConfigError(f"--{name} must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [nesslab] section of flag defaults")
    common.add_argument("--model", choices=MODELS, default="girardeau")
    common.add_argument("--rho", default="1", help="density")
    common.add_argument("--a", default=None, help="scattering length (a_tilde = 8 pi a)")
    common.add_argument("--a-tilde", dest="a_tilde", default=None, help="HYL coupling")
    common.add_argument("--v", default="0", help="limiting velocity (snapped to each box)")
    common.add_argument("--dim", type=int, default=1)
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--out", default=None, help="output prefix; JSON to stdout when absent")
    common.add_argument("--c", default=None, help="energy cap of the (c, d) subspace")
    common.add_argument("--d", default=None, help="momentum cap of the (c, d) subspace")
    common.add_argument("--r", type=int, default=None, help="maximal number of excitations")
    common.add_argument("--rho-max", dest="rho_max", default=None, help="depleted density cap")

    p = argparse.ArgumentParser(prog="nesslab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="point cloud for one box")
    sp.add_argument("--N", type=int, default=None, help="particle number")
    sp.add_argument("--L", default=None, help="box side")
    sp.add_argument("--window", type=int, default=10, help="lattice index window")
    sp.add_argument("--cap", default=None, help="unboosted energy cap")
    sp.add_argument(
        "--family",
        default=None,
        help="girardeau: oracle|closed|restricted; hyl: two_mode|configs; mean-field: free|two_mode",
    )
    sp.add_argument("--raw-velocity", dest="raw_velocity", action="store_true",
                    help="use --v unsnapped (HYL two-mode formula only)")

    sw = sub.add_parser("sweep", parents=[common], help="thermodynamic sweep and verdict")
    sw.add_argument("--L0", default="1", help="base length L_base; sides are 2 n L_base")
    sw.add_argument("--nmax", type=int, default=5)
    sw.add_argument("--strict", action="store_true", help="exit 4 on non-converged trajectories")
    sw.add_argument("--tol", type=float, default=None, help="limit-point residual tolerance")
    sw.add_argument("--min-exponent", dest="min_exponent", type=float, default=0.9)
    sw.add_argument("--max-cascade", dest="max_cascade", type=int, default=8)

    vf = sub.add_parser("verify", parents=[common], help="run the verification suite")
    vf.add_argument("--only", default=None, help="comma-separated check ids (1-9)")
    vf.add_argument("--mutate", choices=MUTATIONS, default=None, help=argparse.SUPPRESS)
    return p


def _apply_config_file(parser: argparse.ArgumentParser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(known.config):
        raise ConfigError(f"cannot read config file {known.config}")
    if not cp.has_section("nesslab"):
        raise ConfigError("config file needs a [nesslab] section")
    values = {k.replace("-", "_"): v for k, v in cp.items("nesslab")}
    command = next((a for a in argv if a in ("spectrum", "sweep", "verify")), None)
    subparser = parser._subparsers._group_actions[0].choices.get(command) if command else None
    target = subparser or parser
    dests = {a.dest: a for a in target._actions}
    for key, raw in values.items():
        if key not in dests:
            raise ConfigError(f"unknown config key {key!r}")
        action = dests[key]
        if isinstance(action, argparse._StoreTrueAction):
            values[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            values[key] = action.type(raw)
    target.set_defaults(**values)


def resolve_coupling(args):
    a = parse_number(args.a) if args.a is not None else None
    at = parse_number(args.a_tilde) if args.a_tilde is not None else None
    _positive("a", a)
    _positive("a-tilde", at)
    if a is not None:
        derived = hyl.coupling_from_scattering(a)
        if at is not None and abs(float(at) - float(derived)) > 1e-12 * float(derived):
            raise ConfigError("--a and --a-tilde disagree (a_tilde must equal 8 pi a)")
        return derived
    return at


def resolve_spec(args) -> SubspaceSpec | None:
    caps = {k: parse_number(getattr(args, k)) if getattr(args, k) is not None else None
            for k in ("c", "d", "rho_max")}
    if all(v is None for v in caps.values()) and args.r is None:
        return None
    try:
        return SubspaceSpec(caps["c"], caps["d"], args.r, caps["rho_max"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "config"}


def _velocity_arg(args):
    parts = [parse_number(x) for x in str(args.v).split(",")]
    return parts[0] if len(parts) == 1 else tuple(parts)


def _write(args, name_json: str, text_json: str, extra: dict[str, str] | None = None):
    if args.out is None:
        sys.stdout.write(text_json)
        return
    base = Path(args.out)
    base.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{base}{name_json}").write_text(text_json)
    for suffix, text in (extra or {}).items():
        Path(f"{base}{suffix}").write_text(text)
    print(f"wrote {base}{name_json}", file=sys.stderr)


# -- spectrum ------------------------------------------------------------------

def _spectrum_points(args) -> list[EigenPoint]:
    if args.N is None or args.L is None:
        raise ConfigError("spectrum needs --N and --L")
    side = to_fraction(parse_number(args.L))
    cap = parse_number(args.cap) if args.cap is not None else math.inf
    v = _velocity_arg(args)
    model = args.model
    if args.raw_velocity:
        if model != "hyl" or args.family not in (None, "two_mode"):
            raise ConfigError("--raw-velocity applies to the HYL two-mode family only")
        params = hyl.HylParams(args.N, side, _require_coupling(args), args.dim)
        v2 = v * v if not isinstance(v, tuple) else sum(x * x for x in v)
        speed = float(v) if not isinstance(v, tuple) else math.sqrt(float(v2))
        out = []
        for n in range(params.N + 1):
            e = hyl.two_mode_energy(n, params, v)
            out.append(EigenPoint(e, (n * speed,), ("two_mode", n), e + n * v2, True, n))
        return out
    vel = snap_velocity(_velocity_float(v), BoxSpec.from_side(side, args.dim))
    if model == "girardeau":
        if args.dim != 1:
            raise ConfigError("the Girardeau model is one-dimensional")
        params = gd.GirardeauParams(args.N, side)
        family = args.family or "oracle"
        if family == "oracle":
            return gd.oracle_spectrum(params, vel, args.window, cap, jobs=args.jobs)
        if family == "closed":
            return gd.closed_form_points(params, vel, args.window, cap)
        if family == "restricted":
            spec = resolve_spec(args)
            if spec is None or spec.c is None or spec.d is None:
                raise ConfigError("family 'restricted' needs --c and --d")
            return gd.restricted_excitations(params, vel, spec.c, spec.d, spec.r or 1)
        raise ConfigError(f"unknown girardeau family {family!r}")
    params = hyl.HylParams(args.N, side, _require_coupling(args), args.dim)
    family = args.family or "two_mode"
    if family == "two_mode":
        return hyl.two_mode_points(params, vel, mean_field=model == "mean-field")
    if model == "mean-field" and family == "free":
        return hyl.free_points(params, vel, args.window)
    if model == "hyl" and family == "configs":
        out = []
        for cfg in hyl.enumerate_configs(params, args.window):
            e = hyl.boosted_hyl_energy(cfg, params, vel)
            rest = hyl.boosted_hyl_energy(cfg, params, None)
            if cap != math.inf and rest > cap:
                continue
            out.append(EigenPoint(e, cfg.momentum, ("config", cfg.modes), rest, True, cfg.depletion))
        return out
    raise ConfigError(f"unknown {model} family {family!r}")


def _velocity_float(v):
    return tuple(float(x) for x in v) if isinstance(v, tuple) else float(v)


def _require_coupling(args):
    at = resolve_coupling(args)
    if at is None:
        raise ConfigError(f"model {args.model} needs --a or --a-tilde")
    return at


def cmd_spectrum(args) -> int:
    pts = _spectrum_points(args)
    meta = config_echo(args)
    _write(args, ".json", points_to_json(pts, meta), {".csv": points_to_csv(pts)})
    return 0


# -- sweep ------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    spec = resolve_spec(args)
    a_tilde = resolve_coupling(args) if args.model != "girardeau" else None
    rho = to_fraction(parse_number(args.rho))
    _positive("rho", rho)
    L0 = parse_number(args.L0)
    L0 = float(L0) if isinstance(L0, Exact) and not L0.is_rational else L0
    v = _velocity_float(_velocity_arg(args))
    rep = run_sweep(
        args.model, rho, v, L0, args.nmax, spec, a_tilde=a_tilde, d=args.dim,
        jobs=args.jobs, max_cascade=args.max_cascade,
    )
    acc, rej = limit_points(rep, tol=args.tol, min_exponent=args.min_exponent)
    verdict = verdict_from_report(rep)
    rep.meta["config"] = config_echo(args)
    text = rep.to_json(acc + rej, verdict)
    _write(args, ".json", text, {"_trajectories.csv": rep.trajectories_csv()})
    print(
        f"is_ness={verdict.is_ness} is_superfluid={verdict.is_superfluid} "
        f"in_window={verdict.in_window} limit points: {len(acc)} converged, {len(rej)} rejected",
        file=sys.stderr,
    )
    failed = [lp for lp in rej if math.isfinite(lp.exponent)]
    if args.strict and failed:
        for lp in failed:
            print(f"not converged: {lp.label} ({lp.reason})", file=sys.stderr)
        return EXIT_STRICT
    return 0


# -- verify --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    ids = [x.strip() for x in args.only.split(",")] if args.only else None
    base = [i for i in (ids or ["1", "2", "3", "4", "5", "6", "7", "8", "9"]) if i != "9"]
    unknown = [i for i in base if i not in "12345678" or len(i) != 1]
    if unknown:
        raise ConfigError(f"unknown check ids {unknown}")
    results = run_checks(base, jobs=args.jobs, mutate=args.mutate)
    if ids is None or "9" in ids:
        results.append(check_determinism(base, (1, max(args.jobs, 4))))
    print(format_table(results), file=sys.stderr)
    _write(args, ".json", report_json(results))
    return 0 if all(r.passed for r in results) else EXIT_VERIFY


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        handler = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "verify": cmd_verify}[args.command]
        return handler(args)
    except hyl.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
