"""Excitation spectrum of the Girardeau (hard-core) Bose gas in one dimension.

The Bose-Fermi mapping makes the spectrum that of N free fermions on the
lattice ``2*pi*n/L``.  This module provides the closed-form excitation
energies (particle-hole, umklapp, umklapp cascades) and an independent
enumeration oracle over fermion occupation sets.

Internally every momentum is an integer lattice index and every energy an
integer multiple of ``u/2`` with ``u = (2*pi/L)**2``; :class:`~nesslab.exact.Exact`
values are built only at the boundary.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .exact import Exact
from .lattice import BoxSpec, LatticeMomentum, LatticeVelocity, lattice_unit, to_fraction
from .points import EigenPoint

__all__ = [
    "GirardeauParams",
    "UmklappMove",
    "CascadeMinimum",
    "ground_state_energy",
    "eps1",
    "eps2",
    "composite_point",
    "umklapp_cascade",
    "cascade_energy_closed_form",
    "cascade_gap",
    "cascade_minimizer",
    "oracle_spectrum",
    "oracle_minimum",
    "configuration_point",
    "apply_moves",
    "cascade_configuration",
    "restricted_excitations",
    "closed_form_points",
]


@dataclass(frozen=True)
class GirardeauParams:
    """N (odd) hard-core bosons on a ring of length ``side``.

    ``kf_mode="finite"`` uses the Fermi momentum ``pi*(N-1)/L`` of the actual
    Fermi sea, ``"limit"`` its thermodynamic value ``pi*rho``.
    """

    N: int
    side: Fraction
    kf_mode: str = "finite"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1 or self.N % 2 == 0:
            raise ValueError(f"N must be an odd positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "side", to_fraction(self.side))
        if self.side <= 0:
            raise ValueError("side must be positive")
        if self.kf_mode not in ("finite", "limit"):
            raise ValueError(f"unknown kf_mode {self.kf_mode!r}")

    @property
    def rho(self) -> Fraction:
        return self.N / self.side

    @property
    def half(self) -> int:
        """Largest occupied index of the Fermi sea."""
        return (self.N - 1) // 2

    @property
    def kf2(self) -> int:
        """``2*k_F`` in lattice units."""
        return self.N - 1 if self.kf_mode == "finite" else self.N

    @property
    def kf(self) -> Exact:
        return Exact.pi_power(1, Fraction(self.kf2) / self.side)

    @property
    def unit(self) -> Exact:
        return lattice_unit(self.side)

    @property
    def half_unit(self) -> Exact:
        return self.unit / 2

    @property
    def box(self) -> BoxSpec:
        return BoxSpec.from_side(self.side, 1)

    def momentum(self, index: int) -> LatticeMomentum:
        return LatticeMomentum((index,), self.side)

    def ground_indices(self) -> range:
        return range(-self.half, self.half + 1)


@dataclass(frozen=True)
class UmklappMove:
    """A particle moved across the Fermi sea.

    ``type2`` takes the particle from ``k_F - q`` to ``-k_F - p``; ``type3`` is
    the mirror image.  ``p`` and ``q`` are lattice indices.
    """

    p: int
    q: int
    species: str = "type2"

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("umklapp needs p >= 2*pi/L (index p >= 1)")
        if self.q < 0:
            raise ValueError("umklapp needs q >= 0")
        if self.species not in ("type2", "type3"):
            raise ValueError(f"unknown umklapp species {self.species!r}")

    def momentum_index(self, params: GirardeauParams) -> int:
        k = params.kf2 + (self.p - self.q)
        return -k if self.species == "type2" else k

    def check(self, params: GirardeauParams):
        if self.q > params.N - 1:
            raise ValueError(
                f"umklapp q index {self.q} exceeds 2*k_F (index {params.N - 1})"
            )


class CascadeMinimum(NamedTuple):
    m: int
    energy: Exact
    in_window: bool


def _velocity_index(v, params: GirardeauParams) -> int:
    if v is None or (isinstance(v, (int, Fraction)) and v == 0):
        return 0
    if isinstance(v, LatticeVelocity):
        mom = v.snapped
    elif isinstance(v, LatticeMomentum):
        mom = v
    else:
        raise TypeError("velocity must be snapped to the box lattice first (snap_velocity)")
    if mom.side != params.side or mom.d != 1:
        raise ValueError("velocity is not a lattice point of this box")
    return mom.coords[0]


def _index(k, params: GirardeauParams) -> int:
    if isinstance(k, LatticeMomentum):
        if k.side != params.side or k.d != 1:
            raise ValueError("momentum is not a lattice point of this box")
        return k.coords[0]
    return int(k)


def ground_state_energy(params: GirardeauParams) -> Exact:
    """Fermi-sea energy ``(N - 1/N) * (pi*rho)**2 / 6``."""
    N = params.N
    return Exact.pi_power(2, (N - Fraction(1, N)) * params.rho ** 2 / 6)


def _eps1_half_units(n: int, params: GirardeauParams) -> int:
    return n * n + params.kf2 * abs(n)


def eps1(k, params: GirardeauParams) -> Exact:
    """Particle-hole energy ``k**2/2 + k_F*|k|``."""
    n = _index(k, params)
    if n == 0:
        raise ValueError("particle-hole excitation needs k != 0")
    return params.half_unit * _eps1_half_units(n, params)


def _eps2_half_units(move: UmklappMove, params: GirardeauParams) -> int:
    move.check(params)
    return (params.kf2 + move.p - move.q) * (move.p + move.q)


def eps2(move: UmklappMove, params: GirardeauParams) -> Exact:
    """Umklapp energy ``[2*k_F + (p - q)] * (p + q) / 2``."""
    return params.half_unit * _eps2_half_units(move, params)


# -- configurations ----------------------------------------------------------

def _move_endpoints(params: GirardeauParams, kind: str, data) -> tuple[int, int]:
    h = params.half
    if kind == "type1":
        n = data
        return (h, h + n) if n > 0 else (-h, -h + n)
    move: UmklappMove = data
    if move.species == "type2":
        return h - move.q, -h - move.p
    return -h + move.q, h + move.p


def apply_moves(
    params: GirardeauParams,
    type1: Sequence[int] = (),
    umklapps: Sequence[UmklappMove] = (),
) -> frozenset[int] | None:
    """Occupied indices after applying the moves to the Fermi sea in order,
    or ``None`` if some move starts from an empty or lands on a full level."""
    occ = set(params.ground_indices())
    moves = [("type1", n) for n in type1] + [("umklapp", m) for m in umklapps]
    for kind, data in moves:
        src, dst = _move_endpoints(params, kind, data)
        if src not in occ or dst in occ:
            return None
        occ.remove(src)
        occ.add(dst)
    return frozenset(occ)


def cascade_configuration(m: int, params: GirardeauParams) -> frozenset[int] | None:
    moves = [UmklappMove(j, j - 1) for j in range(1, m + 1)]
    return apply_moves(params, (), moves)


def configuration_point(indices: Iterable[int], params: GirardeauParams, v=None) -> EigenPoint:
    """Oracle energy and momentum of an explicit fermion occupation set."""
    occ = tuple(sorted(indices))
    if len(set(occ)) != params.N:
        raise ValueError(f"need {params.N} distinct occupied indices")
    j = _velocity_index(v, params)
    g = sum(n * n for n in params.ground_indices())
    rest = sum(n * n for n in occ) - g
    boosted = sum((n + j) ** 2 for n in occ) - g - params.N * j * j
    P = sum(occ)
    hu = params.half_unit
    return EigenPoint(hu * boosted, params.momentum(P), ("oracle", occ), hu * rest, True)


# -- closed-form excitations ----------------------------------------------

def composite_point(
    type1_ks: Sequence = (),
    umklapps: Sequence[UmklappMove] = (),
    v=None,
    params: GirardeauParams | None = None,
) -> EigenPoint:
    """Sum of particle-hole and umklapp energies plus the boost ``v*P``.

    The point is flagged exact when its moves can be carried out one after
    another on the Fermi sea, in which case the energy is an eigenvalue of
    the finite system and not merely correct to O(1/N).
    """
    if params is None:
        raise TypeError("params are required")
    t1 = [_index(k, params) for k in type1_ks]
    if any(n == 0 for n in t1):
        raise ValueError("particle-hole excitation needs k != 0")
    if not t1 and not umklapps:
        raise ValueError("composite needs at least one excitation")
    if len(t1) + len(umklapps) > params.N:
        raise ValueError("more excitations than particles")
    j = _velocity_index(v, params)
    rest = sum(_eps1_half_units(n, params) for n in t1)
    rest += sum(_eps2_half_units(m, params) for m in umklapps)
    P = sum(t1) + sum(m.momentum_index(params) for m in umklapps)
    exact = params.kf_mode == "finite" and apply_moves(params, t1, umklapps) is not None
    hu = params.half_unit
    content = ("composite", tuple(t1), tuple((m.p, m.q, m.species) for m in umklapps))
    return EigenPoint(hu * (rest + 2 * j * P), params.momentum(P), content, hu * rest, exact)


def umklapp_cascade(m: int, v, params: GirardeauParams) -> EigenPoint:
    """``m`` successive minimal umklapps ``p_j = j``, ``q_j = j - 1``."""
    if m < 0:
        raise ValueError("cascade length must be non-negative")
    if m > params.N:
        raise ValueError(f"cascade length {m} exceeds N = {params.N}")
    j = _velocity_index(v, params)
    rest = sum(_eps2_half_units(UmklappMove(i, i - 1), params) for i in range(1, m + 1))
    P = -m * (params.kf2 + 1)
    hu = params.half_unit
    return EigenPoint(
        hu * (rest + 2 * j * P),
        params.momentum(P),
        ("cascade", m),
        hu * rest,
        params.kf_mode == "finite",
    )


def cascade_energy_closed_form(m: int, v, params: GirardeauParams) -> Exact:
    """The printed closed form for the boosted cascade energy.

    It differs from the sum of the umklapp energies by ``2*pi**2*m/L**2``
    (its ``m(m-1)`` term should read ``m**2``); kept for comparison only.
    """
    j = _velocity_index(v, params)
    kf2, L2 = params.kf2, params.side ** 2
    coeff = (2 * kf2 * m * m + 2 * m * (m - 1) - 4 * kf2 * m * j - 4 * m * j) / L2
    return Exact.pi_power(2, coeff)


def cascade_gap(m: int, v, params: GirardeauParams) -> Exact:
    """``E(m+1) - E(m)`` along the cascade ladder."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m + 1 > params.N:
        raise ValueError("cascade of length m+1 exceeds N")
    return umklapp_cascade(m + 1, v, params).energy - umklapp_cascade(m, v, params).energy


def cascade_minimizer(v, params: GirardeauParams) -> CascadeMinimum:
    """Exact argmin of the boosted cascade energy over ``m = 0..N``.

    ``in_window`` is False outside ``0 < v < 2*pi*rho``, where the minimum
    may sit on the boundary of the range.
    """
    j = _velocity_index(v, params)
    best_m, best_e = 0, None
    for m in range(params.N + 1):
        e = umklapp_cascade(m, v, params).energy
        if best_e is None or e < best_e:
            best_m, best_e = m, e
    # 0 < 2*pi*j/L < 2*pi*N/L  <=>  0 < j < N
    return CascadeMinimum(best_m, best_e, 0 < j < params.N)


# -- enumeration oracle ---------------------------------------------------

def _min_suffix_table(weights: Sequence[int], N: int) -> list[list[float]]:
    M = len(weights)
    table = []
    for s in range(M + 1):
        tail = sorted(weights[s:])
        row = [0]
        acc = 0
        for r in range(1, N + 1):
            if r <= len(tail):
                acc += tail[r - 1]
                row.append(acc)
            else:
                row.append(math.inf)
        table.append(row)
    return table


def _subsets_leading(args) -> list[tuple[int, ...]]:
    indices, N, budget, lead = args
    w = [n * n for n in indices]
    M = len(indices)
    table = _min_suffix_table(w, N)
    out = []
    chosen = [indices[lead]]

    def rec(pos, r, acc):
        if r == 0:
            out.append(tuple(chosen))
            return
        for i in range(pos, M - r + 1):
            if acc + w[i] + table[i + 1][r - 1] > budget:
                continue
            chosen.append(indices[i])
            rec(i + 1, r - 1, acc + w[i])
            chosen.pop()

    if w[lead] + table[lead + 1][N - 1] <= budget:
        rec(lead + 1, N - 1, w[lead])
    return out


def _cap_budget(energy_cap, params: GirardeauParams, g: int):
    if energy_cap is None or energy_cap == math.inf:
        return math.inf
    ratio = energy_cap / params.half_unit
    return g + math.floor(ratio)


def oracle_spectrum(
    params: GirardeauParams,
    v=None,
    index_window: int = 10,
    energy_cap=math.inf,
    jobs: int = 1,
) -> list[EigenPoint]:
    """All fermion occupation sets inside ``[-index_window, index_window]``
    whose unboosted excitation energy is at most ``energy_cap``.

    Boosted energies are evaluated from the shifted single-particle energies
    ``(k + v)**2 / 2`` minus ``N*v**2/2``, independently of ``v*P``.  Points are
    ordered by unboosted energy, then lexicographically by occupation.
    """
    if index_window < params.half:
        raise ValueError(
            f"window +-{index_window} does not contain the Fermi sea +-{params.half}"
        )
    j = _velocity_index(v, params)
    indices = tuple(range(-index_window, index_window + 1))
    g = sum(n * n for n in params.ground_indices())
    budget = _cap_budget(energy_cap, params, g)
    tasks = [(indices, params.N, budget, lead) for lead in range(len(indices) - params.N + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_subsets_leading, tasks))
    else:
        chunks = [_subsets_leading(t) for t in tasks]
    rows = []
    N = params.N
    for chunk in chunks:
        for occ in chunk:
            rest = sum(n * n for n in occ) - g
            boosted = sum((n + j) ** 2 for n in occ) - g - N * j * j
            rows.append((rest, occ, boosted, sum(occ)))
    rows.sort()
    hu = params.half_unit
    return [
        EigenPoint(hu * b, params.momentum(P), ("oracle", occ), hu * r, True)
        for r, occ, b, P in rows
    ]


def oracle_minimum(params: GirardeauParams, v=None, index_window: int = 10) -> EigenPoint:
    """Lowest boosted eigenvalue over every occupation set in the window,
    found by branch and bound on the shifted single-particle energies."""
    if index_window < params.half:
        raise ValueError("window does not contain the Fermi sea")
    j = _velocity_index(v, params)
    indices = list(range(-index_window, index_window + 1))
    w = [(n + j) ** 2 for n in indices]
    N, M = params.N, len(indices)
    table = _min_suffix_table(w, N)
    best = [math.inf, None]
    chosen: list[int] = []

    def rec(pos, r, acc):
        if r == 0:
            if acc < best[0]:
                best[0], best[1] = acc, tuple(chosen)
            return
        for i in range(pos, M - r + 1):
            if acc + w[i] + table[i + 1][r - 1] >= best[0]:
                continue
            chosen.append(indices[i])
            rec(i + 1, r - 1, acc + w[i])
            chosen.pop()

    rec(0, N, 0)
    return configuration_point(best[1], params, v)


# -- restricted families ---------------------------------------------------

def _as_half_units(x, params: GirardeauParams):
    if isinstance(x, Exact):
        return x / params.half_unit
    return float(x) / float(params.half_unit)


def _as_index_units(x, params: GirardeauParams):
    spacing = Exact.pi_power(1, Fraction(2) / params.side)
    if isinstance(x, Exact):
        return x / spacing
    return float(x) / float(spacing)


def restricted_excitations(
    params: GirardeauParams, v, c, d, r: int
) -> list[EigenPoint]:
    """Composites of at most ``r`` particle-hole excitations with total
    unboosted energy ``<= c`` and total momentum ``|P| <= d``.

    Energies are ``sum_i (eps1(k_i) + v*k_i)``; no umklapp enters.
    """
    if r < 1:
        raise ValueError("r must be positive")
    j = _velocity_index(v, params)
    cap = _as_half_units(c, params)
    pcap = _as_index_units(d, params)
    cands = []
    n = 1
    while _eps1_half_units(n, params) <= cap:
        cands.extend([-n, n])
        n += 1
    cands.sort()
    e1 = {n: _eps1_half_units(n, params) for n in cands}
    out = []
    for size in range(1, r + 1):
        for combo in itertools.combinations_with_replacement(cands, size):
            rest = sum(e1[n] for n in combo)
            if rest > cap:
                continue
            P = sum(combo)
            if abs(P) > pcap:
                continue
            exact = params.kf_mode == "finite" and apply_moves(params, combo) is not None
            out.append((rest, combo, P, exact))
    out.sort(key=lambda t: (t[0], len(t[1]), t[1]))
    hu = params.half_unit
    return [
        EigenPoint(hu * (rest + 2 * j * P), params.momentum(P), ("type1", combo), hu * rest, exact)
        for rest, combo, P, exact in out
    ]


def closed_form_points(
    params: GirardeauParams,
    v=None,
    index_window: int = 10,
    energy_cap=math.inf,
    max_cascade: int = 3,
) -> list[EigenPoint]:
    """Single particle-hole points, single umklapps of both species and
    cascades up to ``max_cascade`` whose configurations fit the window and
    whose unboosted energy is within the cap."""
    h, W = params.half, index_window
    cap = _as_half_units(energy_cap, params) if energy_cap != math.inf else math.inf
    out = []
    for n in range(-(W + h), W + h + 1):
        if n == 0:
            continue
        target = h + n if n > 0 else -h + n
        if abs(target) > W or _eps1_half_units(n, params) > cap:
            continue
        out.append(composite_point([n], (), v, params))
    for species in ("type2", "type3"):
        for q in range(params.N):
            for p in range(1, W - h + 1):
                mv = UmklappMove(p, q, species)
                if _eps2_half_units(mv, params) > cap:
                    continue
                out.append(composite_point((), [mv], v, params))
    for m in range(1, max_cascade + 1):
        if m > params.N or h + m > W:
            break
        pt = umklapp_cascade(m, v, params)
        if energy_cap == math.inf or pt.rest_energy <= energy_cap:
            out.append(pt)
    return out

