"""Huang-Yang-Luttinger (HYL) Bose gas over occupation-number configurations.

The HYL Hamiltonian is diagonal in the occupation numbers ``n_k``:

    H = sum_k k**2 n_k / 2 + a_tilde * (2 N**2 - sum_k n_k**2) / (2 V)

Its boosted form, written with ``(k - v)**2``, has its lowest eigenvalue
``-N v**2 / 2`` at ``n_v = N``.  That display equals ``H - E0 - v.P`` with
``E0 = a_tilde N**2 / (2V)``; the package uses it as the HYL and mean-field
boost convention.

Energies are :class:`~nesslab.exact.Exact` whenever the coupling, box side and
velocity are exact.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .exact import Exact, as_exact
from .lattice import (
    BoxSpec,
    LatticeMomentum,
    LatticeVelocity,
    lattice_momenta,
    lattice_unit,
    to_fraction,
)
from .points import EigenPoint

__all__ = [
    "HylParams",
    "OccupationConfig",
    "DiluteCoefficients",
    "TwoModeStationary",
    "RhoMax",
    "OrderCheck",
    "BudgetExceeded",
    "hyl_energy",
    "boosted_hyl_energy",
    "two_mode_energy",
    "two_mode_config",
    "two_mode_stationary",
    "rho_max",
    "depletion_tail",
    "printed_tail_value",
    "split_excess",
    "enumerate_configs",
    "config_count",
    "brute_force_minimum",
    "mean_field_energy",
    "mean_field_ground_energy",
    "mean_field_shifted_energy",
    "fragmentation_cost",
    "dilute_expansion",
    "coupling_from_scattering",
    "effective_order_check",
    "two_mode_points",
    "tail_points",
    "free_points",
]

DEFAULT_BUDGET = 10 ** 7


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configuration budget."""


def _coupling(a):
    if isinstance(a, Exact):
        return a
    return Exact.rational(to_fraction(a))


@dataclass(frozen=True)
class HylParams:
    """N bosons in a periodic box of side ``side`` in ``d`` dimensions."""

    N: int
    side: Fraction
    a_tilde: Exact
    d: int = 3

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "side", to_fraction(self.side))
        object.__setattr__(self, "a_tilde", _coupling(self.a_tilde))
        if self.side <= 0:
            raise ValueError("side must be positive")
        if self.a_tilde.sign() <= 0:
            raise ValueError("a_tilde must be positive")
        if not self.a_tilde.is_monomial:
            raise ValueError("a_tilde must be a rational multiple of a power of pi")

    @classmethod
    def from_volume(cls, N, volume, a_tilde, d=1) -> "HylParams":
        """Build from ``V``; needs ``V**(1/d)`` rational for ``d > 1``."""
        V = to_fraction(volume)
        if d == 1:
            return cls(N, V, a_tilde, 1)
        num = round(V.numerator ** (1 / d))
        den = round(V.denominator ** (1 / d))
        if Fraction(num, den) ** d != V:
            raise ValueError("volume is not the d-th power of a rational side")
        return cls(N, Fraction(num, den), a_tilde, d)

    @property
    def volume(self) -> Fraction:
        return self.side ** self.d

    @property
    def rho(self) -> Fraction:
        return self.N / self.volume

    @property
    def box(self) -> BoxSpec:
        return BoxSpec.from_side(self.side, self.d)

    @property
    def half_unit(self) -> Exact:
        return lattice_unit(self.side) / 2

    @property
    def ground_energy(self) -> Exact:
        """``E0 = a_tilde N**2 / (2V)``."""
        return self.a_tilde * Fraction(self.N ** 2, 2) / self.volume


@dataclass(frozen=True)
class OccupationConfig:
    """Occupation numbers on lattice modes of one box; zero entries dropped."""

    modes: tuple[tuple[tuple[int, ...], int], ...]
    side: Fraction

    def __post_init__(self):
        acc: dict[tuple[int, ...], int] = {}
        d = None
        for coords, n in self.modes:
            coords = tuple(int(c) for c in coords)
            if d is None:
                d = len(coords)
            elif len(coords) != d:
                raise ValueError("modes have mixed dimensions")
            if int(n) != n or n < 0:
                raise ValueError("occupations must be non-negative integers")
            if n:
                acc[coords] = acc.get(coords, 0) + int(n)
        if not acc:
            raise ValueError("configuration holds no particles")
        object.__setattr__(self, "modes", tuple(sorted(acc.items())))
        object.__setattr__(self, "side", to_fraction(self.side))

    @classmethod
    def from_counts(cls, counts: Mapping | Iterable, side) -> "OccupationConfig":
        items = counts.items() if isinstance(counts, Mapping) else counts
        out = []
        for k, n in items:
            if isinstance(k, LatticeMomentum):
                if k.side != to_fraction(side):
                    raise ValueError("mode belongs to a different box")
                k = k.coords
            elif isinstance(k, int):
                k = (k,)
            out.append((tuple(k), n))
        return cls(tuple(out), side)

    @property
    def d(self) -> int:
        return len(self.modes[0][0])

    @property
    def N(self) -> int:
        return sum(n for _, n in self.modes)

    @property
    def sum_sq(self) -> int:
        return sum(n * n for _, n in self.modes)

    @property
    def kinetic_index(self) -> int:
        return sum(n * sum(c * c for c in k) for k, n in self.modes)

    @property
    def momentum(self) -> LatticeMomentum:
        P = [0] * self.d
        for k, n in self.modes:
            for i, c in enumerate(k):
                P[i] += n * c
        return LatticeMomentum(tuple(P), self.side)

    def occupation(self, coords) -> int:
        coords = tuple(coords) if not isinstance(coords, int) else (coords,)
        return dict(self.modes).get(coords, 0)

    @property
    def n0(self) -> int:
        return self.occupation((0,) * self.d)

    @property
    def depletion(self) -> int:
        return self.N - self.n0

    def shifted(self, coords) -> "OccupationConfig":
        """Every mode moved by the lattice vector ``coords``."""
        s = tuple(coords)
        return OccupationConfig(
            tuple((tuple(a + b for a, b in zip(k, s)), n) for k, n in self.modes), self.side
        )

    def counts(self) -> dict[tuple[int, ...], int]:
        return dict(self.modes)


class TwoModeStationary(NamedTuple):
    n_max: Exact
    n_min1: int
    n_min2: Exact
    valid: bool
    n_max_int: int
    last_nonnegative: int


class RhoMax(NamedTuple):
    value: Exact
    valid: bool


@dataclass(frozen=True)
class DiluteCoefficients:
    a: float
    rho: float
    e1: float
    e2: float
    gas_parameter: float
    order: int

    @property
    def energy(self) -> float:
        """Partial sum of the energy density to the requested order."""
        return self.e1 + (self.e2 if self.order >= 2 else 0.0)

    @property
    def dilute(self) -> bool:
        return self.gas_parameter < 1e-2


@dataclass(frozen=True)
class OrderCheck:
    e0: Exact
    e1: Exact
    e0_matches: bool
    sum_sq_invariant: bool
    covariance: bool
    samples: int

    @property
    def ok(self) -> bool:
        return self.e0_matches and self.sum_sq_invariant and self.covariance


# -- velocities ------------------------------------------------------------

def _lattice_v(v, params: HylParams) -> tuple[int, ...]:
    if v is None or (isinstance(v, (int, Fraction)) and v == 0):
        return (0,) * params.d
    if isinstance(v, LatticeVelocity):
        mom = v.snapped
    elif isinstance(v, LatticeMomentum):
        mom = v
    else:
        raise TypeError("velocity must be snapped to the box lattice first (snap_velocity)")
    if mom.side != params.side or mom.d != params.d:
        raise ValueError("velocity is not a lattice point of this box")
    return mom.coords


def _speed_sq(v, params: HylParams):
    if v is None:
        return Exact()
    if isinstance(v, (LatticeVelocity, LatticeMomentum)):
        return params.half_unit * (2 * sum(c * c for c in _lattice_v(v, params)))
    if isinstance(v, (int, Fraction, Exact)):
        return as_exact(v) ** 2
    if isinstance(v, float):
        return v * v
    comps = list(v)
    if all(isinstance(c, (int, Fraction, Exact)) for c in comps):
        return sum((as_exact(c) ** 2 for c in comps), Exact())
    return math.fsum(float(c) ** 2 for c in comps)


# -- energies -------------------------------------------------------------

def _check_config(config: OccupationConfig, params: HylParams):
    if config.N != params.N:
        raise ValueError(f"occupations sum to {config.N}, expected N = {params.N}")
    if config.side != params.side or config.d != params.d:
        raise ValueError("configuration belongs to a different box")


def hyl_energy(config: OccupationConfig, params: HylParams) -> Exact:
    """``sum k**2 n_k / 2 + a_tilde (2N**2 - sum n_k**2) / (2V)``."""
    _check_config(config, params)
    N = params.N
    return params.half_unit * config.kinetic_index + params.a_tilde * Fraction(
        2 * N * N - config.sum_sq, 2
    ) / params.volume


def boosted_hyl_energy(config: OccupationConfig, params: HylParams, v) -> Exact:
    """``sum (k - v)**2 n_k / 2 - N v**2 / 2 + a_tilde (N**2 - sum n_k**2) / (2V)``."""
    _check_config(config, params)
    cv = _lattice_v(v, params)
    N = params.N
    shifted = sum(n * sum((a - b) ** 2 for a, b in zip(k, cv)) for k, n in config.modes)
    v2 = sum(c * c for c in cv)
    return params.half_unit * (shifted - N * v2) + params.a_tilde * Fraction(
        N * N - config.sum_sq, 2
    ) / params.volume


def _f(n, params: HylParams, v2):
    return -v2 * n / 2 + params.a_tilde * (params.N * n - n * n) / params.volume


def two_mode_energy(n: int, params: HylParams, v):
    """Eigenvalue ``-n v**2/2 + a_tilde (N n - n**2) / V`` with ``n`` particles
    moved from mode 0 to mode ``v``."""
    if int(n) != n or not 0 <= n <= params.N:
        raise ValueError(f"n must be an integer in [0, {params.N}]")
    return _f(int(n), params, _speed_sq(v, params))


def two_mode_config(n: int, params: HylParams, v) -> OccupationConfig:
    cv = _lattice_v(v, params)
    zero = (0,) * params.d
    return OccupationConfig(((zero, params.N - n), (cv, n)), params.side)


def two_mode_stationary(params: HylParams, v) -> TwoModeStationary:
    """Stationary points of the two-mode energy and their integer neighbours.

    ``valid`` is False outside ``v**2 < 2 a_tilde rho``.  ``n_max_int`` is the
    integer maximizer among the neighbours of ``n_max``; ``last_nonnegative``
    the largest integer ``n`` with non-negative energy.
    """
    v2 = _speed_sq(v, params)
    a, V, N = params.a_tilde, params.volume, params.N
    n_max = Fraction(N, 2) - v2 * V / (4 * a)
    n_min2 = N - v2 * V / (2 * a)
    valid = v2 < 2 * a * params.rho

    def f(n):
        return _f(n, params, v2)

    cands = {min(max(x, 0), N) for x in (math.floor(n_max), math.ceil(n_max))}
    n_max_int = max(sorted(cands), key=lambda n: (f(n), -n))
    # f is concave with f(0) = 0: scan down from the real root
    start = min(max(math.floor(n_min2) + 1, 0), N)
    last = start
    while last > 0 and f(last) < 0:
        last -= 1
    return TwoModeStationary(n_max, 0, n_min2, bool(valid), n_max_int, last)


def rho_max(params: HylParams, v) -> RhoMax:
    """Depletion cap ``rho - v**2 / (2 a_tilde)``; flagged invalid when <= 0."""
    value = params.rho - _speed_sq(v, params) / (2 * params.a_tilde)
    return RhoMax(value, bool(value > 0))


def depletion_tail(k: int, params: HylParams, v):
    """Two-mode energy at ``n = n_min2 + k``, from the exact quadratic:
    ``-k (a_tilde rho - v**2/2) - a_tilde k**2 / V``."""
    if int(k) != k or k < 0:
        raise ValueError("k must be a non-negative integer")
    v2 = _speed_sq(v, params)
    n2 = params.N - v2 * params.volume / (2 * params.a_tilde)
    if n2 + k > params.N:
        raise ValueError(f"n_min2 + k exceeds N = {params.N}")
    return _f(n2 + k, params, v2)


def printed_tail_value(k: int, params: HylParams, v):
    """``-k (a_tilde rho - v**2/2) - a_tilde / V``, the form missing the
    ``k**2`` factor; kept only to expose the discrepancy."""
    v2 = _speed_sq(v, params)
    a = params.a_tilde
    return -k * (a * params.rho - v2 / 2) - a / params.volume


def split_excess(config: OccupationConfig, params: HylParams, v) -> Exact:
    """Boosted energy of ``config`` minus that of the two-mode configuration
    with the same depletion."""
    ref = two_mode_config(config.depletion, params, v)
    return boosted_hyl_energy(config, params, v) - boosted_hyl_energy(ref, params, v)


# -- enumeration ----------------------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Compositions of ``total`` into ``parts`` non-negative parts, colex order."""
    if parts == 1:
        yield (total,)
        return
    for last in range(total + 1):
        for head in _compositions(total - last, parts - 1):
            yield head + (last,)


def config_count(params: HylParams, index_window: int, fixed_depletion=None) -> int:
    M = (2 * index_window + 1) ** params.d
    if fixed_depletion is None:
        return math.comb(params.N + M - 1, M - 1)
    n = fixed_depletion
    return math.comb(n + M - 2, M - 2) if M > 1 else int(n == 0)


def _mode_list(params: HylParams, index_window: int) -> list[tuple[int, ...]]:
    return [k.coords for k in lattice_momenta(params.box, index_window)]


def _check_fixed(params: HylParams, fixed_depletion):
    if fixed_depletion is not None and not 0 <= fixed_depletion <= params.N:
        raise ValueError("fixed depletion must lie in [0, N]")


def _iter_counts(N, M, zero_pos, fixed_depletion, last=None):
    """Count vectors over M modes in colex order, optionally with the last
    part pinned (used to partition work)."""
    if fixed_depletion is None:
        if last is None:
            yield from _compositions(N, M)
        elif M == 1:
            if last == N:
                yield (N,)
        else:
            for head in _compositions(N - last, M - 1):
                yield head + (last,)
        return
    n = fixed_depletion
    others = M - 1
    if others == 0:
        if n == 0:
            yield (N,)
        return
    if last is None:
        gen = _compositions(n, others)
    elif others == 1:
        gen = [(n,)] if last == n else []
    else:
        gen = (h + (last,) for h in _compositions(n - last, others - 1))
    for rest in gen:
        yield rest[:zero_pos] + (N - n,) + rest[zero_pos:]


def enumerate_configs(
    params: HylParams,
    index_window: int,
    fixed_depletion: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[OccupationConfig]:
    """Every configuration on the modes ``|coord| <= index_window``,
    optionally with exactly ``fixed_depletion`` particles outside mode 0."""
    _check_fixed(params, fixed_depletion)
    count = config_count(params, index_window, fixed_depletion)
    if count > budget:
        raise BudgetExceeded(f"{count} configurations exceed the budget of {budget}")
    modes = _mode_list(params, index_window)
    zero_pos = modes.index((0,) * params.d)
    for counts in _iter_counts(params.N, len(modes), zero_pos, fixed_depletion):
        yield OccupationConfig(tuple(zip(modes, counts)), params.side)


def _minimize_chunk(args):
    params, index_window, fixed_depletion, cv, last = args
    modes = _mode_list(params, index_window)
    zero_pos = modes.index((0,) * params.d)
    N, V, a, hu = params.N, params.volume, params.a_tilde, params.half_unit
    shifted_sq = [sum((x - y) ** 2 for x, y in zip(k, cv)) for k in modes]
    v2 = sum(c * c for c in cv)
    best = None
    for counts in _iter_counts(N, len(modes), zero_pos, fixed_depletion, last):
        kin = sum(n * w for n, w in zip(counts, shifted_sq))
        s = sum(n * n for n in counts)
        e = hu * (kin - N * v2) + a * Fraction(N * N - s, 2) / V
        if best is None or e < best[1]:
            best = (counts, e)
    return best


def brute_force_minimum(
    params: HylParams,
    v,
    index_window: int,
    fixed_depletion: int | None = None,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
) -> tuple[OccupationConfig, Exact]:
    """Exhaustive minimizer of the boosted energy; ties keep the first
    configuration in colex order."""
    _check_fixed(params, fixed_depletion)
    cv = _lattice_v(v, params)
    if any(abs(c) > index_window for c in cv):
        raise ValueError("the mode window does not contain v")
    count = config_count(params, index_window, fixed_depletion)
    if count > budget:
        raise BudgetExceeded(f"{count} configurations exceed the budget of {budget}")
    modes = _mode_list(params, index_window)
    top = params.N if fixed_depletion is None else fixed_depletion
    if len(modes) == 1 or (fixed_depletion is not None and len(modes) == 2):
        tasks = [(params, index_window, fixed_depletion, cv, None)]
    else:
        tasks = [(params, index_window, fixed_depletion, cv, last) for last in range(top + 1)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_minimize_chunk, tasks))
    else:
        results = [_minimize_chunk(t) for t in tasks]
    best = None
    for r in results:
        if r is not None and (best is None or r[1] < best[1]):
            best = r
    counts, energy = best
    return OccupationConfig(tuple(zip(modes, counts)), params.side), energy


# -- mean field ------------------------------------------------------------

def mean_field_ground_energy(params: HylParams) -> Exact:
    """``a_tilde N**2 / V``."""
    return params.a_tilde * Fraction(params.N ** 2) / params.volume


def mean_field_energy(config: OccupationConfig, params: HylParams) -> Exact:
    """Eigenvalue of the mean-field Hamiltonian ``H0 + a_tilde N**2 / V``."""
    _check_config(config, params)
    return params.half_unit * config.kinetic_index + mean_field_ground_energy(params)


def mean_field_shifted_energy(config: OccupationConfig, params: HylParams) -> Exact:
    """Mean-field eigenvalue relative to its ground state: the free kinetic sum."""
    return mean_field_energy(config, params) - mean_field_ground_energy(params)


# -- condensate fragmentation and dilute gas -------------------------------

def fragmentation_cost(N1: int, N2: int, U, V):
    """Interaction cost ``U N1 N2 / V`` of splitting a condensate in two."""
    if N1 < 0 or N2 < 0:
        raise ValueError("occupations must be non-negative")
    if V <= 0:
        raise ValueError("volume must be positive")
    num = (N1 + N2) ** 2 - N1 ** 2 - N2 ** 2
    if isinstance(U, float) or isinstance(V, float):
        return float(U) * num / (2 * float(V))
    return as_exact(U) * num / (2 * as_exact(V))


def dilute_expansion(rho: float, a: float, order: int = 2) -> DiluteCoefficients:
    """First two coefficients of the dilute-gas energy density."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if rho <= 0 or a < 0:
        raise ValueError("need rho > 0 and a >= 0")
    rho, a = float(rho), float(a)
    gas = rho * a ** 3
    e1 = 4 * math.pi * a * rho ** 2
    e2 = e1 * 128 * math.sqrt(gas) / (15 * math.sqrt(math.pi))
    return DiluteCoefficients(a, rho, e1, e2, gas, order)


def coupling_from_scattering(a) -> Exact:
    """``a_tilde = 8 pi a``."""
    a = as_exact(a)
    if a.sign() <= 0:
        raise ValueError("scattering length must be positive")
    return a * Exact.pi_power(1, 8)


def effective_order_check(
    params: HylParams, samples: int = 50, seed: int = 0, index_window: int = 2
) -> OrderCheck:
    """Compare ``E0 / V`` with ``4 pi a rho**2`` and test Galilean covariance
    on random and two-mode configurations."""
    a = params.a_tilde / Exact.pi_power(1, 8)
    e0 = params.ground_energy / params.volume
    e1 = Exact.pi_power(1, 4) * a * params.rho ** 2
    rng = np.random.default_rng(seed)
    modes = _mode_list(params, index_window)
    shift = (1,) + (0,) * (params.d - 1)
    vmom = LatticeMomentum(shift, params.side)
    v2 = vmom.kinetic() * 2
    configs = []
    for _ in range(samples):
        counts = rng.multinomial(params.N, np.full(len(modes), 1 / len(modes)))
        configs.append(OccupationConfig(tuple(zip(modes, counts.tolist())), params.side))
    for n in range(params.N + 1):
        configs.append(two_mode_config(n, params, vmom))
    inv = cov = True
    for cfg in configs:
        moved = cfg.shifted(shift)
        inv &= moved.sum_sq == cfg.sum_sq
        lhs = hyl_energy(moved, params) - hyl_energy(cfg, params)
        rhs = vmom.dot(cfg.momentum) + v2 * Fraction(params.N, 2)
        cov &= lhs == rhs
    return OrderCheck(e0, e1, e0 == e1, bool(inv), bool(cov), len(configs))


# -- point families for sweeps ----------------------------------------------

def _partner_mode(v, params: HylParams) -> tuple[int, ...]:
    cv = _lattice_v(v, params)
    if any(cv):
        return cv
    return (1,) + (0,) * (params.d - 1)


def two_mode_points(params: HylParams, v, mean_field: bool = False) -> list[EigenPoint]:
    """Eigenpoints of the configurations ``(n_0, n_v) = (N - n, n)``.

    At ``v = 0`` the second mode is the smallest nonzero lattice vector so that
    the family still describes a moved population.
    """
    cv = _lattice_v(v, params)
    partner = _partner_mode(v, params)
    zero = (0,) * params.d
    pmom = LatticeMomentum(partner, params.side)
    out = []
    for n in range(params.N + 1):
        cfg = OccupationConfig(((zero, params.N - n), (partner, n)), params.side)
        if mean_field:
            rest = mean_field_shifted_energy(cfg, params)
            energy = rest - LatticeMomentum(cv, params.side).dot(cfg.momentum)
        else:
            energy = boosted_hyl_energy(cfg, params, LatticeMomentum(cv, params.side))
            rest = boosted_hyl_energy(cfg, params, None)
        out.append(EigenPoint(energy, pmom.scaled(n), ("two_mode", n), rest, True, n))
    return out


def tail_points(params: HylParams, v, ks: Sequence[int]) -> list[EigenPoint]:
    """Two-mode points ``n = n_min2 + k`` (real ``n`` allowed), labelled by k."""
    v2 = _speed_sq(v, params)
    n2 = params.N - v2 * params.volume / (2 * params.a_tilde)
    vel = v.value if isinstance(v, (LatticeVelocity, LatticeMomentum)) else (float(v),)
    out = []
    for k in ks:
        n = n2 + k
        if n > params.N:
            break
        e = depletion_tail(k, params, v)
        P = tuple(float(n) * x for x in vel)
        out.append(EigenPoint(e, P, ("tail", int(k)), e + n * v2, True, n))
    return out


def free_points(params: HylParams, v, index_window: int) -> list[EigenPoint]:
    """Single-particle excitations ``0 -> k`` of the mean-field (free) model."""
    cv = _lattice_v(v, params)
    vmom = LatticeMomentum(cv, params.side)
    zero = (0,) * params.d
    out = []
    for k in lattice_momenta(params.box, index_window):
        if k.coords == zero:
            continue
        cfg = OccupationConfig(((zero, params.N - 1), (k.coords, 1)), params.side)
        rest = mean_field_shifted_energy(cfg, params)
        out.append(EigenPoint(rest - vmom.dot(k), k, ("free", k.coords), rest, True, 1))
    return out
