"""Exact real numbers of the form ``c * pi**k * sqrt(t)``.

Every eigenvalue and constant this package produces fits that shape:
torus eigenvalues are ``2*pi*sqrt(q)`` with ``q`` rational, sphere and
space-form eigenvalues are integers, volumes and Weyl coefficients are
rational multiples of powers of pi.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

__all__ = ["ExactReal", "squarefree_decomposition", "REL_TOL", "close"]

# Relative tolerance for float comparisons when no exact value is available.
REL_TOL = 1e-9


def close(a: float, b: float, rel: float = REL_TOL) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return ``(s, t)`` with ``n == s*s*t`` and ``t`` squarefree."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, t = 1, 1
    rest = n
    p = 2
    # Past the cube root, the cofactor has at most two prime factors,
    # so it is either a perfect square or squarefree.
    while p * p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e:
            s *= p ** (e // 2)
            if e % 2:
                t *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(rest)
    if r * r == rest:
        s *= r
    else:
        t *= rest
    return s, t


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot treat {x!r} as an exact rational")


@total_ordering
class ExactReal:
    """``coeff * pi**pi_power * sqrt(radicand)``, normalized.

    ``radicand`` is squarefree and positive; zero is stored as
    ``ExactReal(0)``.  Normal forms are unique (pi is transcendental), so
    equality is structural.
    """

    __slots__ = ("coeff", "pi_power", "radicand")

    def __init__(self, coeff=0, pi_power: int = 0, radicand: int = 1):
        c = _as_fraction(coeff)
        if radicand <= 0:
            raise ValueError("radicand must be positive")
        s, t = squarefree_decomposition(int(radicand))
        c *= s
        if c == 0:
            pi_power, t = 0, 1
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "pi_power", int(pi_power))
        object.__setattr__(self, "radicand", t)

    def __setattr__(self, name, value):
        raise AttributeError("ExactReal is immutable")

    @classmethod
    def sqrt(cls, q) -> "ExactReal":
        """Exact square root of a nonnegative rational."""
        q = _as_fraction(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        if q == 0:
            return cls(0)
        # sqrt(a/b) = sa/(sb*tb) * sqrt(ta*tb); a, b coprime so ta*tb is squarefree
        sa, ta = squarefree_decomposition(q.numerator)
        sb, tb = squarefree_decomposition(q.denominator)
        return cls._raw(Fraction(sa, sb * tb), 0, ta * tb)

    @classmethod
    def _raw(cls, coeff: Fraction, pi_power: int, radicand: int) -> "ExactReal":
        # caller guarantees a squarefree radicand
        coeff = Fraction(coeff)
        if coeff == 0:
            pi_power, radicand = 0, 1
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeff", coeff)
        object.__setattr__(obj, "pi_power", pi_power)
        object.__setattr__(obj, "radicand", radicand)
        return obj

    @property
    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    @property
    def is_rational(self) -> bool:
        return self.pi_power == 0 and self.radicand == 1

    def _key(self):
        return (self.coeff, self.pi_power, self.radicand)

    def __float__(self) -> float:
        return float(self.coeff) * math.pi**self.pi_power * math.sqrt(self.radicand)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactReal):
            return self._key() == other._key()
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self.coeff == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self.coeff)
        return hash(self._key())

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactReal(other)
        if not isinstance(other, ExactReal):
            return float(self) < other
        if self.sign != other.sign or self.sign == 0:
            return self.sign < other.sign
        if self.pi_power == other.pi_power:
            # same sign, common pi power: compare sign * coeff^2 * radicand
            a = self.coeff**2 * self.radicand
            b = other.coeff**2 * other.radicand
            return a < b if self.sign > 0 else a > b
        return float(self) < float(other)

    def __neg__(self) -> "ExactReal":
        return ExactReal._raw(-self.coeff, self.pi_power, self.radicand)

    def __abs__(self) -> "ExactReal":
        return ExactReal._raw(abs(self.coeff), self.pi_power, self.radicand)

    def __mul__(self, other) -> "ExactReal":
        if isinstance(other, (int, Fraction)):
            return ExactReal._raw(self.coeff * other, self.pi_power, self.radicand)
        if not isinstance(other, ExactReal):
            return NotImplemented
        # both radicands squarefree: sqrt(t1 t2) = g sqrt(t1 t2 / g^2)
        g = math.gcd(self.radicand, other.radicand)
        t = (self.radicand // g) * (other.radicand // g)
        return ExactReal._raw(self.coeff * other.coeff * g, self.pi_power + other.pi_power, t)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactReal":
        if isinstance(other, (int, Fraction)):
            return ExactReal._raw(self.coeff / Fraction(other), self.pi_power, self.radicand)
        if not isinstance(other, ExactReal):
            return NotImplemented
        if other.coeff == 0:
            raise ZeroDivisionError("division by exact zero")
        # 1/sqrt(t) = sqrt(t)/t
        inv = ExactReal._raw(1 / (other.coeff * other.radicand), -other.pi_power, other.radicand)
        return self * inv

    def __rtruediv__(self, other) -> "ExactReal":
        return ExactReal(other) / self

    def __str__(self) -> str:
        if self.coeff == 0:
            return "0"
        parts = []
        mag = abs(self.coeff)
        if mag != 1 or self.is_rational:
            parts.append(str(mag))
        if self.pi_power == 1:
            parts.append("pi")
        elif self.pi_power:
            parts.append(f"pi^{self.pi_power}")
        if self.radicand != 1:
            parts.append(f"sqrt({self.radicand})")
        body = "*".join(parts)
        return ("-" if self.coeff < 0 else "") + body

    def __repr__(self) -> str:
        return f"ExactReal('{self}')"

    _TOKEN = re.compile(r"^(?:(?P<pi>pi)(?:\^(?P<k>-?\d+))?|sqrt\((?P<t>\d+)\)|(?P<c>\d+(?:/\d+)?))$")

    @classmethod
    def parse(cls, text: str) -> "ExactReal":
        """Inverse of ``str``: accepts e.g. ``-2*pi*sqrt(2)``, ``1/6*pi^-2``, ``3``."""
        s = text.strip().replace(" ", "")
        negative = s.startswith("-")
        if negative:
            s = s[1:]
        if not s:
            raise ValueError(f"empty exact value {text!r}")
        coeff, power, radicand = Fraction(1), 0, 1
        for tok in s.split("*"):
            m = cls._TOKEN.match(tok)
            if m is None:
                raise ValueError(f"cannot parse exact value {text!r}")
            if m.group("pi"):
                power += int(m.group("k") or 1)
            elif m.group("t"):
                radicand *= int(m.group("t"))
            else:
                coeff *= Fraction(m.group("c"))
        return cls(-coeff if negative else coeff, power, radicand)
