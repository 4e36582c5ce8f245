"""Truncated Taylor series (jets) in one variable.

A ``Jet`` holds coefficients ``c[0..order]`` of ``sum c_k t**k`` about a base
point. The coefficient type is generic: exact ``Fraction`` values propagate
through +, *, / unchanged, while ``float``/``complex`` coefficients give
ordinary numeric jets. Division, composition, reversion and the elementary
functions follow the usual power-series recursions; everything truncates at
``order`` and never looks beyond it.

Jets are the workhorse for exact coefficient recursions (J-series), for
propagating an ODE to high derivative order at a point, and for the chart
arithmetic behind the Puiseux machinery.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Sequence


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence, order: int | None = None):
        c = list(coeffs)
        if order is not None:
            if len(c) > order + 1:
                c = c[: order + 1]
            else:
                c = c + [_zero_like(c)] * (order + 1 - len(c))
        if not c:
            raise ValueError("jet needs at least one coefficient")
        self.c = c

    @classmethod
    def variable(cls, order: int, zero=0, one=1) -> "Jet":
        return cls([zero, one], order)

    @classmethod
    def const(cls, value, order: int) -> "Jet":
        return cls([value], order)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def __len__(self):
        return len(self.c)

    def __getitem__(self, k: int):
        return self.c[k] if 0 <= k < len(self.c) else _zero_like(self.c)

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c, order)

    # -- ring operations -------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.const(other, self.order)

    def __add__(self, other):
        o = self._coerce(other)
        n = min(self.order, o.order)
        return Jet([self[k] + o[k] for k in range(n + 1)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        n = min(self.order, o.order)
        return Jet([self[k] - o[k] for k in range(n + 1)])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet([-a for a in self.c])

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([a * other for a in self.c])
        n = min(self.order, other.order)
        out = []
        for k in range(n + 1):
            s = self.c[0] * other[k]
            for j in range(1, k + 1):
                s = s + self.c[j] * other[k - j]
            out.append(s)
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([a / other for a in self.c])
        if other.c[0] == 0:
            raise ZeroDivisionError("jet division needs a nonzero constant term")
        n = min(self.order, other.order)
        inv0 = 1 / other.c[0] if not isinstance(other.c[0], Fraction) else Fraction(1) / other.c[0]
        out = [self[0] * inv0]
        for k in range(1, n + 1):
            s = self[k]
            for j in range(1, k + 1):
                s = s - other[j] * out[k - j]
            out.append(s * inv0)
        return Jet(out)

    def __rtruediv__(self, other):
        return Jet.const(other, self.order) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("integer power only; use fpow for fractional")
        out = Jet.const(_one_like(self.c), self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- calculus --------------------------------------------------------

    def deriv(self) -> "Jet":
        if self.order == 0:
            return Jet([_zero_like(self.c)])
        return Jet([(k + 1) * self.c[k + 1] for k in range(self.order)])

    def integ(self, const=0) -> "Jet":
        out = [const]
        for k, a in enumerate(self.c):
            out.append(a / (k + 1) if isinstance(a, Fraction) else a / (k + 1.0))
        return Jet(out)

    def __call__(self, t):
        acc = _zero_like(self.c)
        for a in reversed(self.c):
            acc = acc * t + a
        return acc

    def derivative_value(self, k: int):
        """k-th derivative at the base point (coefficient times k!)."""
        return self[k] * math.factorial(k)

    # -- composition -----------------------------------------------------

    def compose(self, inner: "Jet") -> "Jet":
        """self(inner(t)); inner must have zero constant term."""
        if inner.c[0] != 0:
            raise ValueError("composition needs inner jet with zero constant term")
        n = inner.order
        acc = Jet.const(_zero_like(self.c), n)
        for a in reversed(self.c[: n + 1]):
            acc = acc * inner + a
        return acc

    def revert(self) -> "Jet":
        """Compositional inverse; needs c0 == 0 and c1 != 0.

        Solves f(g(t)) = t order by order; the coefficient of t**k in the
        composition is linear in g_k with factor f_1.
        """
        if self.c[0] != 0 or self[1] == 0:
            raise ValueError("reversion needs c0 == 0 and c1 != 0")
        n = self.order
        out = [_zero_like(self.c), 1 / self.c[1]] + [_zero_like(self.c)] * (n - 1)
        for k in range(2, n + 1):
            comp = self.compose(Jet(out, n))
            out[k] = out[k] - comp[k] / self.c[1]
        return Jet(out, n)

    def __repr__(self):
        return f"Jet({self.c})"


def _zero_like(coeffs):
    c0 = coeffs[0] if coeffs else 0
    if isinstance(c0, Fraction):
        return Fraction(0)
    if isinstance(c0, complex):
        return 0j
    return 0 * c0 if not isinstance(c0, (int, float)) else 0.0 if isinstance(c0, float) else 0


def _one_like(coeffs):
    z = _zero_like(coeffs)
    if isinstance(z, Fraction):
        return Fraction(1)
    return z + 1


# -- elementary functions of numeric jets --------------------------------


def jet_exp(f: Jet) -> Jet:
    """exp(f) for float/complex jets, via (exp f)' = f' exp f."""
    n = f.order
    e0 = cmath.exp(f.c[0]) if isinstance(f.c[0], complex) else math.exp(f.c[0])
    out = [e0]
    for k in range(1, n + 1):
        s = 0.0 * e0
        for j in range(1, k + 1):
            s += j * f[j] * out[k - j]
        out.append(s / k)
    return Jet(out)


def jet_log(f: Jet) -> Jet:
    """log(f) for numeric jets with f(0) != 0 (principal branch)."""
    if f.c[0] == 0:
        raise ZeroDivisionError("log of jet with zero constant term")
    n = f.order
    l0 = cmath.log(f.c[0]) if isinstance(f.c[0], complex) or (isinstance(f.c[0], float) and f.c[0] < 0) else math.log(f.c[0])
    out = [l0]
    # log(f)' = f'/f
    d = f.deriv() / f
    for k in range(1, n + 1):
        out.append(d[k - 1] / k)
    return Jet(out)


def jet_fpow(f: Jet, a) -> Jet:
    """f**a for numeric jets, principal branch, f(0) != 0."""
    return jet_exp(jet_log(f) * a)


def jet_sqrt(f: Jet) -> Jet:
    return jet_fpow(f, 0.5)
