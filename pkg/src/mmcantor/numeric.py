"""Numeric tower: exact rationals, floats and formal power sums.

Inverse scale factors and model diameters are kept as ``Fraction`` whenever
they are entered as integers or ``{"num": p, "den": q}`` pairs.  Raising a
rational to an irrational exponent is not rational, so the "exact" path keeps
the exponent symbolic instead: a :class:`PowerSum` is the formal expression
``sum_k c_k * b_k**d`` with rational bases ``b_k``.  Since
``(x*y)**d == x**d * y**d`` for every ``d``, sums and products of power sums
are again power sums, and two power sums that are equal as formal objects are
equal for every exponent.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, float]


def parse_number(value) -> Number:
    """Read a JSON scalar: ints and ``{"num", "den"}`` become exact Fractions."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        if set(value) != {"num", "den"}:
            raise ValueError(f"rational must have exactly 'num' and 'den' keys, got {sorted(value)}")
        num, den = value["num"], value["den"]
        if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool):
            raise TypeError("'num' and 'den' must be integers")
        if den == 0:
            raise ZeroDivisionError("rational with zero denominator")
        return Fraction(num, den)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot read a number from {value!r}")


def number_to_json(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return {"num": value.numerator, "den": value.denominator}
    return float(value)


def is_exact(value) -> bool:
    return isinstance(value, Rational)


def integral_exponent(d) -> int | None:
    """Return ``d`` as an int when it is an exact integer, else None."""
    if isinstance(d, bool):
        return None
    if isinstance(d, int):
        return d
    if isinstance(d, Fraction) and d.denominator == 1:
        return d.numerator
    return None


def power(base: Number, d):
    """``base ** d`` on the tower.

    ``d is None`` means symbolic and returns a :class:`PowerSum`.  A rational
    base with an integral exponent stays exact; everything else is float.
    """
    if d is None:
        return PowerSum.power(base)
    k = integral_exponent(d)
    if k is not None and is_exact(base):
        return Fraction(base) ** k
    return float(base) ** float(d)


class PowerSum:
    """Formal sum ``sum c * b**d`` with rational bases ``b > 0``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for base, coeff in (terms or {}).items():
            if not is_exact(base):
                raise TypeError("PowerSum bases must be exact rationals")
            if coeff != 0:
                clean[Fraction(base)] = clean.get(Fraction(base), 0) + coeff
        self.terms = {b: c for b, c in clean.items() if c != 0}

    @classmethod
    def power(cls, base, coeff=1) -> "PowerSum":
        return cls({base: coeff})

    @classmethod
    def zero(cls) -> "PowerSum":
        return cls()

    def _coerce(self, other):
        if isinstance(other, PowerSum):
            return other
        if isinstance(other, Rational):
            # a constant c is c * 1**d
            return PowerSum({Fraction(1): Fraction(other)}) if other != 0 else PowerSum()
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for b, c in other.terms.items():
            out[b] = out.get(b, 0) + c
        return PowerSum(out)

    __radd__ = __add__

    def __neg__(self):
        return PowerSum({b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Rational) and not isinstance(other, PowerSum):
            return PowerSum({b: c * other for b, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for b1, c1 in self.terms.items():
            for b2, c2 in other.terms.items():
                key = b1 * b2
                out[key] = out.get(key, 0) + c1 * c2
        return PowerSum(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def at(self, d):
        """Evaluate at exponent ``d``; exact when ``d`` is an integer."""
        k = integral_exponent(d)
        if k is not None:
            return sum((c * b ** k for b, c in self.terms.items()), Fraction(0))
        d = float(d)
        return math.fsum(float(c) * float(b) ** d for b, c in self.terms.items())

    def __float__(self):
        raise TypeError("a PowerSum has no value until an exponent is chosen; use .at(d)")

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for b in sorted(self.terms, reverse=True):
            c = self.terms[b]
            term = f"({b})^d" if b != 1 else "1"
            parts.append(term if c == 1 else f"{c}*{term}")
        return " + ".join(parts)


def evaluate(value, d):
    """Evaluate a tower element at ``d`` (no-op for plain numbers)."""
    if isinstance(value, PowerSum):
        return value.at(d)
    return value
