"""Exact rationals extended by quadratic surds a + b*sqrt(d).

Just enough field arithmetic for resonance computations: d is kept
squarefree (negative d gives a complex surd), and results collapse back to
Fraction whenever the surd part cancels. Rationality classification is
exact; no floating-point comparisons are involved.
"""

from __future__ import annotations

from fractions import Fraction


def squarefree_split(n: int) -> tuple[int, int]:
    """n = s*s*d with d squarefree; returns (s, d). Sign stays on d."""
    if n == 0:
        return (1, 0)
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    d *= n
    return (s, sign * d)


class QuadSurd:
    """a + b*sqrt(d) with a, b rational, d squarefree nonsquare."""

    __slots__ = ("a", "b", "d")

    def __new__(cls, a, b, d: int):
        a, b = Fraction(a), Fraction(b)
        if b == 0 or d == 0:
            return a
        if d == 1:
            return a + b
        self = object.__new__(cls)
        self.a, self.b, self.d = a, b, d
        return self

    @classmethod
    def sqrt_of(cls, q: Fraction):
        """Exact square root of a rational (possibly negative)."""
        q = Fraction(q)
        if q == 0:
            return Fraction(0)
        # sqrt(p/q) = sqrt(p*q)/q
        s, d = squarefree_split(q.numerator * q.denominator)
        return cls(0, Fraction(s, q.denominator), d)

    # -- arithmetic ------------------------------------------------------

    def _match(self, other):
        if isinstance(other, QuadSurd):
            if other.d != self.d:
                raise ArithmeticError("mixed surd fields are not supported")
            return other.a, other.b
        return Fraction(other), Fraction(0)

    def __add__(self, other):
        oa, ob = self._match(other)
        return QuadSurd(self.a + oa, self.b + ob, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QuadSurd) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        oa, ob = self._match(other)
        return QuadSurd(self.a * oa + self.b * ob * self.d, self.a * ob + self.b * oa, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QuadSurd):
            oa, ob = other.a, other.b
            norm = oa * oa - ob * ob * other.d
            return self * QuadSurd(oa / norm, -ob / norm, other.d)
        return QuadSurd(self.a / Fraction(other), self.b / Fraction(other), self.d)

    def __rtruediv__(self, other):
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadSurd(self.a / norm, -self.b / norm, self.d) * other

    def __pow__(self, n: int):
        out = Fraction(1)
        for _ in range(n):
            out = self * out
        return out

    def __eq__(self, other):
        if isinstance(other, QuadSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return False  # a genuine surd never equals a rational

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def conjugate_surd(self):
        return QuadSurd(self.a, -self.b, self.d)

    def __complex__(self):
        root = complex(self.d) ** 0.5
        return complex(self.a) + complex(self.b) * root

    def __float__(self):
        if self.d < 0:
            raise ValueError("complex surd has no float value")
        return float(self.a) + float(self.b) * float(self.d) ** 0.5

    def __str__(self):
        num_a = self.a
        rad = f"sqrt({self.d})" if self.d > 0 else f"i*sqrt({abs(self.d)})"
        # render over a common denominator when it reads cleanly
        if self.a == 0:
            coeff = self.b
            if coeff == 1:
                return rad
            if coeff == -1:
                return f"-{rad}"
            return f"({coeff})*{rad}"
        den = self.a.denominator
        if self.b.denominator == den and den != 1:
            bn = self.b.numerator
            s = f"{'+' if bn >= 0 else '-'}{abs(bn) if abs(bn) != 1 else ''}{rad}"
            return f"({self.a.numerator}{s})/{den}"
        sign = "+" if self.b > 0 else "-"
        return f"{num_a}{sign}{abs(self.b)}*{rad}"

    __repr__ = __str__


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))
