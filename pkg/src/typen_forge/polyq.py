"""Dense polynomials with exact rational coefficients.

Coefficients are `fractions.Fraction` stored in ascending degree order with
trailing zeros stripped, so equality is structural and division is exact.
The zero polynomial has an empty coefficient list and degree -1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def _trim(coeffs: list[Fraction]) -> list[Fraction]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class PolyQ:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _trim([Fraction(c) for c in coeffs])

    @classmethod
    def const(cls, c) -> "PolyQ":
        return cls([Fraction(c)])

    @classmethod
    def x(cls) -> "PolyQ":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyQ):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __add__(self, other: "PolyQ") -> "PolyQ":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyQ([self[k] + other[k] for k in range(n)])

    def __sub__(self, other: "PolyQ") -> "PolyQ":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyQ([self[k] - other[k] for k in range(n)])

    def __neg__(self) -> "PolyQ":
        return PolyQ([-c for c in self.coeffs])

    def __mul__(self, other) -> "PolyQ":
        if isinstance(other, (int, Fraction)):
            return PolyQ([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyQ(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "PolyQ":
        """Multiply by x**k."""
        if not self.coeffs:
            return PolyQ()
        return PolyQ([Fraction(0)] * k + self.coeffs)

    def divmod(self, other: "PolyQ") -> tuple["PolyQ", "PolyQ"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return PolyQ(), PolyQ(rem)
        quo = [Fraction(0)] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return PolyQ(quo), PolyQ(rem)

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "PolyQ":
        if not self:
            return PolyQ()
        lead = self.coeffs[-1]
        return PolyQ([c / lead for c in self.coeffs])

    def gcd(self, other: "PolyQ") -> "PolyQ":
        a, b = self, other
        while b:
            a, b = b, a.divmod(b)[1]
        return a.monic() if a else PolyQ()

    def rational_roots(self) -> list[Fraction]:
        """All rational roots, by the rational root theorem on the
        integer-cleared form."""
        if not self:
            raise ValueError("zero polynomial has every root")
        # strip powers of x
        coeffs = list(self.coeffs)
        roots = []
        if coeffs[0] == 0:
            roots.append(Fraction(0))
            while coeffs and coeffs[0] == 0:
                coeffs.pop(0)
        if len(coeffs) <= 1:
            return roots
        from math import lcm

        mult = lcm(*[c.denominator for c in coeffs])
        ints = [int(c * mult) for c in coeffs]
        a0, an = abs(ints[0]), abs(ints[-1])
        for p in _divisors(a0):
            for q in _divisors(an):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if cand not in roots and self(cand) == 0:
                        roots.append(cand)
        return sorted(roots)

    def __repr__(self):
        return f"PolyQ({[str(c) for c in self.coeffs]})"


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)
