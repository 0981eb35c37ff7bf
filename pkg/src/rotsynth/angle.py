"""Exact rotation angles as rational multiples of pi.

An :class:`Angle` stores ``num/den`` meaning ``num*pi/den`` radians, always
reduced and normalized into the half-open interval ``(-pi, pi]``.
"""
from __future__ import annotations

import math
from fractions import Fraction


class AngleError(ValueError):
    """Raised for malformed angle text."""


class Angle:
    """Rational multiple of pi, normalized modulo 2*pi into (-pi, pi]."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        turns = Fraction(num, den) if not isinstance(num, Fraction) else num / den
        # (-1, 1] in units of pi
        turns = turns - 2 * math.floor((turns + 1) / 2)
        if turns == -1:
            turns = Fraction(1)
        object.__setattr__(self, "num", turns.numerator)
        object.__setattr__(self, "den", turns.denominator)

    def __setattr__(self, name, value):
        raise AttributeError("Angle is immutable")

    @classmethod
    def parse(cls, text: str) -> "Angle":
        """Parse ``p/q`` (meaning p*pi/q) or a bare integer ``p``."""
        s = text.strip()
        try:
            if "/" in s:
                p, q = s.split("/")
                p, q = int(p), int(q)
            else:
                p, q = int(s), 1
        except ValueError:
            raise AngleError(f"bad angle {text!r}") from None
        if q <= 0:
            raise AngleError(f"bad angle denominator in {text!r}")
        return cls(p, q)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def radians(self) -> float:
        return math.pi * self.num / self.den

    def is_zero(self) -> bool:
        return self.num == 0

    def __add__(self, other: "Angle") -> "Angle":
        if not isinstance(other, Angle):
            return NotImplemented
        return Angle(self.fraction + other.fraction)

    def __sub__(self, other: "Angle") -> "Angle":
        if not isinstance(other, Angle):
            return NotImplemented
        return Angle(self.fraction - other.fraction)

    def __neg__(self) -> "Angle":
        return Angle(-self.fraction)

    def __eq__(self, other):
        if not isinstance(other, Angle):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __lt__(self, other: "Angle") -> bool:
        return self.fraction < other.fraction

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return self.num != 0

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"Angle({self})"


ZERO = Angle(0)
PI = Angle(1)
HALF_PI = Angle(1, 2)


def add(a: Angle, b: Angle) -> Angle:
    return a + b


def negate(a: Angle) -> Angle:
    return -a


def half_difference(a2: Angle, a1: Angle) -> Angle:
    """Return (a2 - a1)/2, halving the exact difference before normalizing."""
    return Angle((a2.fraction - a1.fraction) / 2)
