"""Exact real arithmetic over Laurent polynomials in pi.

Every spectral quantity in this package is a rational combination of powers
of pi once box sides, densities and couplings are rational: lattice momenta
are ``2*pi*n/L`` and kinetic energies carry ``pi**2``.  :class:`Exact` keeps
such numbers symbolic so that minimum finding and multiset comparisons never
depend on floating-point rounding.  Signs are decided with interval
arithmetic, which always terminates because pi is transcendental.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from mpmath import iv

__all__ = ["Exact", "as_exact", "PI"]

_RATIONAL = (int, Fraction)


class Exact:
    """A number ``sum_k c_k * pi**k`` with rational ``c_k`` and integer ``k``.

    Arithmetic with ``int`` and ``Fraction`` stays exact.  Mixing with a
    ``float`` degrades to ``float``.  Division is supported only by monomials
    (a single power of pi), which covers every use in the package.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        if terms is None:
            self._terms = ()
            return
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        acc: dict[int, Fraction] = {}
        for k, c in items:
            c = Fraction(c)
            if c:
                acc[int(k)] = acc.get(int(k), Fraction(0)) + c
        self._terms = tuple(sorted((k, c) for k, c in acc.items() if c))

    @classmethod
    def rational(cls, value) -> "Exact":
        return cls(((0, value),))

    @classmethod
    def pi_power(cls, k: int, coeff=1) -> "Exact":
        return cls(((k, coeff),))

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    def coefficient(self, k: int) -> Fraction:
        for p, c in self._terms:
            if p == k:
                return c
        return Fraction(0)

    @property
    def is_rational(self) -> bool:
        return all(k == 0 for k, _ in self._terms)

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coefficient(0)

    # -- arithmetic -------------------------------------------------------

    def _combine(self, other, sign):
        terms = list(self._terms)
        terms.extend((k, sign * c) for k, c in other._terms)
        return Exact(terms)

    def __add__(self, other):
        if isinstance(other, Exact):
            return self._combine(other, 1)
        if isinstance(other, _RATIONAL):
            return self._combine(Exact.rational(other), 1)
        if isinstance(other, float):
            return float(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Exact):
            return self._combine(other, -1)
        if isinstance(other, _RATIONAL):
            return self._combine(Exact.rational(other), -1)
        if isinstance(other, float):
            return float(self) - other
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Exact((k, -c) for k, c in self._terms)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __mul__(self, other):
        if isinstance(other, _RATIONAL):
            return Exact((k, c * other) for k, c in self._terms)
        if isinstance(other, Exact):
            return Exact(
                (k1 + k2, c1 * c2)
                for k1, c1 in self._terms
                for k2, c2 in other._terms
            )
        if isinstance(other, float):
            return float(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL):
            if other == 0:
                raise ZeroDivisionError("Exact division by zero")
            return Exact((k, c / other) for k, c in self._terms)
        if isinstance(other, Exact):
            if not other.is_monomial:
                raise TypeError("division by a non-monomial Exact is not supported")
            (k2, c2), = other._terms
            return Exact((k - k2, c / c2) for k, c in self._terms)
        if isinstance(other, float):
            return float(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RATIONAL):
            return Exact.rational(other) / self
        if isinstance(other, float):
            return other / float(self)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return Exact.rational(1) / self ** (-n)
        out = Exact.rational(1)
        for _ in range(n):
            out = out * self
        return out

    # -- evaluation and ordering -----------------------------------------

    def __float__(self) -> float:
        return math.fsum(float(c) * math.pi ** k for k, c in self._terms)

    def sign(self) -> int:
        if not self._terms:
            return 0
        signs = {1 if c > 0 else -1 for _, c in self._terms}
        if len(signs) == 1:
            return signs.pop()
        parts = [float(c) * math.pi ** k for k, c in self._terms]
        total = math.fsum(parts)
        scale = math.fsum(abs(p) for p in parts)
        if abs(total) > 1e-9 * scale:
            return 1 if total > 0 else -1
        return _interval_sign(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def _cmp(self, other):
        if isinstance(other, Exact):
            return (self - other).sign()
        if isinstance(other, _RATIONAL):
            return (self - other).sign()
        if isinstance(other, float):
            a = float(self)
            return (a > other) - (a < other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Exact):
            return self._terms == other._terms
        if isinstance(other, _RATIONAL):
            return self.is_rational and self.coefficient(0) == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational:
            return hash(self.coefficient(0))
        return hash(self._terms)

    def __lt__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r < 0

    def __le__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r <= 0

    def __gt__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r > 0

    def __ge__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r >= 0

    def __floor__(self) -> int:
        f = math.floor(float(self))
        while self < f:
            f -= 1
        while self >= f + 1:
            f += 1
        return f

    def __ceil__(self) -> int:
        return -math.floor(-self)

    # -- formatting -------------------------------------------------------

    def __repr__(self):
        return f"Exact({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, c in self._terms:
            coef = f"{c.numerator}" if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if k == 0:
                parts.append(coef)
            elif k == 1:
                parts.append(f"{coef}*pi")
            else:
                parts.append(f"{coef}*pi^{k}")
        return " + ".join(parts)


def _interval_sign(terms) -> int:
    saved = iv.prec
    prec = 64
    try:
        while prec <= 1 << 16:
            iv.prec = prec
            acc = iv.mpf(0)
            for k, c in terms:
                acc += iv.mpf(c.numerator) / iv.mpf(c.denominator) * iv.pi ** k
            if acc.a > 0:
                return 1
            if acc.b < 0:
                return -1
            prec *= 2
    finally:
        iv.prec = saved
    raise ArithmeticError("could not resolve sign of a nonzero pi-polynomial")


def as_exact(x) -> Exact:
    """Coerce ints, Fractions, floats (by their exact binary value) and Exact."""
    if isinstance(x, Exact):
        return x
    if isinstance(x, (Rational, float)):
        return Exact.rational(Fraction(x))
    raise TypeError(f"cannot represent {x!r} exactly")


PI = Exact.pi_power(1)
