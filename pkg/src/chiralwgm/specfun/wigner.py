"""Wigner 3-j and 6-j symbols from the Racah formulas in exact integer arithmetic.

Angular momenta may be integers or half-integers; they are converted to
doubled integers on entry so selection rules are checked exactly.  The Racah
sums are evaluated with :class:`fractions.Fraction` and only the final
square root is taken in floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..errors import InvalidAngularMomenta


def twice(value) -> int:
    """Return ``2*value`` as an int, rejecting anything that is not a half-integer."""
    doubled = Fraction(value) * 2
    if doubled.denominator != 1:
        raise InvalidAngularMomenta(f"{value!r} is not an integer or half-integer")
    return int(doubled)


def _fact(n2: int) -> int:
    # n2 is a doubled, even, non-negative argument
    return math.factorial(n2 // 2)


def _triangle(a2: int, b2: int, c2: int) -> bool:
    if min(a2, b2, c2) < 0:
        return False
    if (a2 + b2 + c2) % 2:
        return False
    return abs(a2 - b2) <= c2 <= a2 + b2


def _delta_sq(a2: int, b2: int, c2: int) -> Fraction:
    return Fraction(
        _fact(a2 + b2 - c2) * _fact(a2 - b2 + c2) * _fact(-a2 + b2 + c2),
        _fact(a2 + b2 + c2 + 2),
    )


def _signed_sqrt(total: Fraction, radicand: Fraction) -> float:
    if total == 0:
        return 0.0
    return math.copysign(math.sqrt(total * total * radicand), total)


@lru_cache(maxsize=65536)
def wigner_3j_doubled(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """3-j symbol with every argument given as twice its value."""
    if m1 + m2 + m3 != 0:
        return 0.0
    if not _triangle(j1, j2, j3):
        return 0.0
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if abs(m) > j or (j + m) % 2:
            return 0.0
    radicand = _delta_sq(j1, j2, j3) * (
        _fact(j1 + m1) * _fact(j1 - m1) * _fact(j2 + m2) * _fact(j2 - m2)
        * _fact(j3 + m3) * _fact(j3 - m3)
    )
    # summation index k (not doubled) over the range where all factorial arguments are >= 0
    k_min = max(0, (j2 - j3 - m1) // 2, (j1 - j3 + m2) // 2)
    k_max = min((j1 + j2 - j3) // 2, (j1 - m1) // 2, (j2 + m2) // 2)
    total = Fraction(0)
    for k in range(k_min, k_max + 1):
        k2 = 2 * k
        den = (
            _fact(k2) * _fact(j1 + j2 - j3 - k2) * _fact(j1 - m1 - k2)
            * _fact(j2 + m2 - k2) * _fact(j3 - j2 + m1 + k2) * _fact(j3 - j1 - m2 + k2)
        )
        total += Fraction(-1 if k % 2 else 1, den)
    phase_exp = (j1 - j2 - m3) // 2
    if phase_exp % 2:
        total = -total
    return _signed_sqrt(total, radicand)


@lru_cache(maxsize=65536)
def wigner_6j_doubled(j1: int, j2: int, j3: int, j4: int, j5: int, j6: int) -> float:
    """6-j symbol {j1 j2 j3; j4 j5 j6} with arguments given as twice their value."""
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(_triangle(*t) for t in triads):
        return 0.0
    radicand = Fraction(1)
    for t in triads:
        radicand *= _delta_sq(*t)
    sums = [sum(t) for t in triads]
    pairs = (j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4)
    t_min = max(sums) // 2
    t_max = min(pairs) // 2
    total = Fraction(0)
    for t in range(t_min, t_max + 1):
        t2 = 2 * t
        den = 1
        for s in sums:
            den *= _fact(t2 - s)
        for p in pairs:
            den *= _fact(p - t2)
        total += Fraction((-1 if t % 2 else 1) * math.factorial(t + 1), den)
    return _signed_sqrt(total, radicand)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3); zero for forbidden arguments."""
    return wigner_3j_doubled(
        twice(j1), twice(j2), twice(j3), twice(m1), twice(m2), twice(m3)
    )


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; zero unless all four triads are valid."""
    return wigner_6j_doubled(
        twice(j1), twice(j2), twice(j3), twice(j4), twice(j5), twice(j6)
    )
