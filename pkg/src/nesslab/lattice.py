"""Momentum lattices of periodic boxes, velocity snapping and box sequences.

Momenta live on ``(2*pi/side) * Z^d``.  They are stored as integer
coordinates plus the box side, so that every derived energy can be built
exactly (see :mod:`nesslab.exact`).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import Exact

__all__ = [
    "BoxSpec",
    "LatticeMomentum",
    "LatticeVelocity",
    "DensitySpec",
    "lattice_momenta",
    "snap_velocity",
    "thermo_sequence",
    "lattice_unit",
    "to_fraction",
    "as_velocity",
]


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, decimal string or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Exact):
        return x.as_fraction()
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    return Fraction(int(x))


def lattice_unit(side) -> Exact:
    """``(2*pi/side)**2``, the squared lattice spacing."""
    side = to_fraction(side)
    return Exact.pi_power(2, Fraction(4) / (side * side))


@dataclass(frozen=True)
class BoxSpec:
    """Periodic cube ``[-n*L_base, n*L_base]^d`` of side ``2*n*L_base``."""

    L_base: Fraction
    n_index: int = 1
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "L_base", to_fraction(self.L_base))
        if self.L_base <= 0:
            raise ValueError("L_base must be positive")
        if int(self.n_index) != self.n_index or self.n_index < 1:
            raise ValueError("n_index must be a positive integer")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("dimension must be a positive integer")
        object.__setattr__(self, "n_index", int(self.n_index))
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def from_side(cls, side, d: int = 1) -> "BoxSpec":
        return cls(to_fraction(side) / 2, 1, d)

    @property
    def side(self) -> Fraction:
        return 2 * self.n_index * self.L_base

    @property
    def volume(self) -> Fraction:
        return self.side ** self.d

    @property
    def spacing(self) -> float:
        return 2 * math.pi / float(self.side)


@dataclass(frozen=True, order=True)
class LatticeMomentum:
    """The lattice vector ``(2*pi/side) * coords``."""

    coords: tuple[int, ...]
    side: Fraction

    def __post_init__(self):
        coords = self.coords
        if isinstance(coords, int):
            coords = (coords,)
        coords = tuple(int(c) for c in coords)
        if not coords:
            raise ValueError("lattice momentum needs at least one coordinate")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "side", to_fraction(self.side))
        if self.side <= 0:
            raise ValueError("box side must be positive")

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def value(self) -> tuple[float, ...]:
        s = float(self.side)
        return tuple(2 * math.pi * c / s for c in self.coords)

    @property
    def scalar(self) -> float:
        if self.d != 1:
            raise ValueError("scalar value only defined in one dimension")
        return self.value[0]

    @property
    def norm_sq_index(self) -> int:
        return sum(c * c for c in self.coords)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq_index) * 2 * math.pi / float(self.side)

    def exact_norm(self) -> Exact | float:
        """``|k|`` exactly when it is a rational multiple of pi, else float."""
        n2 = self.norm_sq_index
        r = math.isqrt(n2)
        if r * r == n2:
            return Exact.pi_power(1, Fraction(2 * r) / self.side)
        return self.norm()

    def exact_component(self, axis: int = 0) -> Exact:
        return Exact.pi_power(1, Fraction(2 * self.coords[axis]) / self.side)

    def kinetic(self) -> Exact:
        """``k**2 / 2`` exactly."""
        return lattice_unit(self.side) * Fraction(self.norm_sq_index, 2)

    def dot(self, other: "LatticeMomentum") -> Exact:
        self._check_box(other)
        return lattice_unit(self.side) * sum(a * b for a, b in zip(self.coords, other.coords))

    def _check_box(self, other):
        if self.side != other.side or self.d != other.d:
            raise ValueError("lattice momenta belong to different boxes")

    def __add__(self, other):
        if not isinstance(other, LatticeMomentum):
            return NotImplemented
        self._check_box(other)
        return LatticeMomentum(tuple(a + b for a, b in zip(self.coords, other.coords)), self.side)

    def __sub__(self, other):
        if not isinstance(other, LatticeMomentum):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return LatticeMomentum(tuple(-c for c in self.coords), self.side)

    def scaled(self, m: int) -> "LatticeMomentum":
        return LatticeMomentum(tuple(m * c for c in self.coords), self.side)

    @classmethod
    def zero(cls, side, d: int = 1) -> "LatticeMomentum":
        return cls((0,) * d, side)


@dataclass(frozen=True)
class LatticeVelocity:
    """A target velocity together with its nearest lattice point."""

    target: tuple[float, ...]
    snapped: LatticeMomentum

    @property
    def coords(self) -> tuple[int, ...]:
        return self.snapped.coords

    @property
    def side(self) -> Fraction:
        return self.snapped.side

    @property
    def value(self) -> tuple[float, ...]:
        return self.snapped.value

    @property
    def speed_sq(self) -> Exact:
        return lattice_unit(self.side) * self.snapped.norm_sq_index

    def error(self) -> float:
        return math.dist(self.snapped.value, self.target)


@dataclass(frozen=True)
class DensitySpec:
    """Fixed density with an optional parity constraint on ``N``.

    ``N`` is the integer of the requested parity nearest to ``rho * V``;
    ties go to the smaller candidate.
    """

    rho: Fraction
    parity: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho", to_fraction(self.rho))
        if self.rho <= 0:
            raise ValueError("density must be positive")
        if self.parity not in (None, "odd", "even"):
            raise ValueError(f"unknown parity policy {self.parity!r}")

    def particle_number(self, box: BoxSpec) -> int:
        target = self.rho * box.volume
        if self.parity is None:
            n = math.floor(target + Fraction(1, 2))
            if target - (n - 1) == n - target:  # exact half: prefer downward
                n -= 1
        else:
            want = 1 if self.parity == "odd" else 0
            lo = math.floor(target)
            if lo % 2 != want:
                lo -= 1
            n = lo if target - lo <= lo + 2 - target else lo + 2
        if n < 1:
            raise ValueError(
                f"density {self.rho} gives no particles in a box of side {box.side}"
            )
        return n


def _as_vector(v, d: int) -> tuple[float, ...]:
    if isinstance(v, (int, float, Fraction)):
        vec = (float(v),)
    else:
        vec = tuple(float(x) for x in v)
    if len(vec) == 1 and d > 1:
        vec = vec + (0.0,) * (d - 1)
    if len(vec) != d:
        raise ValueError(f"velocity has {len(vec)} components, box has d={d}")
    if not all(math.isfinite(x) for x in vec):
        raise ValueError("velocity must be finite")
    return vec


def lattice_momenta(box: BoxSpec, max_index: int) -> list[LatticeMomentum]:
    """All lattice points with every ``|coord| <= max_index``, lexicographic."""
    if max_index < 0:
        raise ValueError("max_index must be non-negative")
    rng = range(-max_index, max_index + 1)
    return [LatticeMomentum(c, box.side) for c in itertools.product(rng, repeat=box.d)]


def snap_velocity(v_lim, box: BoxSpec) -> LatticeVelocity:
    """Nearest lattice point to ``v_lim``; ties pick the lexicographically
    smallest coordinates."""
    target = _as_vector(v_lim, box.d)
    side = float(box.side)
    coords = []
    for x in target:
        base = math.floor(x * side / (2 * math.pi))
        best = None
        for c in (base - 1, base, base + 1, base + 2):
            dist = abs(2 * math.pi * c / side - x)
            if best is None or dist < best[0]:
                best = (dist, c)
        coords.append(best[1])
    return LatticeVelocity(target, LatticeMomentum(tuple(coords), box.side))


def thermo_sequence(
    L_base, n_max: int, rho: DensitySpec | float, d: int = 1, parity: str | None = None
) -> list[tuple[int, Fraction]]:
    """``(N, side)`` along the boxes ``n = 1..n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not isinstance(rho, DensitySpec):
        rho = DensitySpec(rho, parity)
    first = BoxSpec(L_base, 1, d)
    if rho.rho * first.volume < 1:
        raise ValueError("rho * side**d < 1 in the smallest box")
    out = []
    for n in range(1, n_max + 1):
        box = BoxSpec(L_base, n, d)
        out.append((rho.particle_number(box), box.side))
    return out


def as_velocity(v, side, d: int = 1) -> LatticeVelocity:
    """Accept a LatticeVelocity/LatticeMomentum on the given box, or snap a
    real velocity."""
    side = to_fraction(side)
    if isinstance(v, LatticeVelocity):
        mom = v.snapped
    elif isinstance(v, LatticeMomentum):
        mom = v
        v = LatticeVelocity(mom.value, mom)
    else:
        return snap_velocity(v, BoxSpec.from_side(side, d))
    if mom.side != side or mom.d != d:
        raise ValueError("velocity is not a lattice point of this box")
    return v

