"""Puiseux-series solutions of the second-order equation

    P'' = -(P' + 2 Lam J)^2 / (2P) - 2 C1^2 / P - (10/3) Lam

about a movable point J0, on the exponent lattice (k+2)/3, together with the
regularizing (J, Z, U) chart that converts the fractional expansion into an
ordinary power-series initial value problem, and the closed-form special
case at J0 = +/- 2i C1 / Lam.

Series on the one-third exponent lattice are stored as dicts mapping the
integer index n to the coefficient of (J - J0)**(n/3). Coefficients are
determined by substitution into the cleared equation and a triangular solve:
the unknown u_k enters the residual linearly at lattice index k - 2 with a
nonzero factor proportional to k(k+1), so the orders peel off one at a time.
The chart route is computed independently and recomposed through a series
reversion; agreement of the two is the module's internal cross-check.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .series import Jet, jet_fpow

__all__ = [
    "PuiseuxSeries",
    "ChartSeries",
    "puiseux_expand",
    "puiseux_coefficients",
    "regular_chart",
    "chart_to_puiseux",
    "special_case_closed_form",
    "peq_residual",
]

_OMEGA = cmath.exp(2j * cmath.pi / 3)


def peq_residual(P, Pp, Ppp, J, lam, C1):
    """Residual of the second-order equation at a point (complex ok)."""
    return Ppp + (Pp + 2 * lam * J) ** 2 / (2 * P) + 2 * C1**2 / P + lam * 10.0 / 3.0


# -- lattice-series helpers (index n  <->  exponent n/3) -----------------


def _tmul(a: dict, b: dict, nmax: int) -> dict:
    out: dict = {}
    for i, ai in a.items():
        if ai == 0:
            continue
        for j, bj in b.items():
            n = i + j
            if n > nmax:
                continue
            out[n] = out.get(n, 0) + ai * bj
    return out


def _tadd(*terms: dict) -> dict:
    out: dict = {}
    for t in terms:
        for n, c in t.items():
            out[n] = out.get(n, 0) + c
    return out


def _tscale(a: dict, s) -> dict:
    return {n: s * c for n, c in a.items()}


def _tderiv(a: dict) -> dict:
    """d/d(chi) on the lattice: chi^(n/3) -> (n/3) chi^(n/3 - 1)."""
    out = {}
    for n, c in a.items():
        if n != 0:
            out[n - 3] = c * Fraction(n, 3) if isinstance(c, Fraction) else c * n / 3
    return out


def _cleared_residual(u: list, J0, lam, C1, nmax: int, third) -> dict:
    """Lattice series of 2PP'' + (P')^2 + 4 Lam J P' + 4 Lam^2 J^2
    + 4 C1^2 + (20/3) Lam P for P = sum u_k chi^((k+2)/3)."""
    P = {k + 2: u[k] for k in range(len(u))}
    Pp = _tderiv(P)
    Ppp = _tderiv(Pp)
    J = {0: J0, 3: 1}
    JJ = _tmul(J, J, nmax)
    res = _tadd(
        _tscale(_tmul(P, Ppp, nmax), 2),
        _tmul(Pp, Pp, nmax),
        _tscale(_tmul(J, Pp, nmax), 4 * lam),
        _tscale(JJ, 4 * lam * lam),
        {0: 4 * C1 * C1},
        _tscale(P, lam * third(20)),
    )
    return res


def puiseux_coefficients(u0, J0, lam, C1, n: int, simplify: Callable | None = None) -> list:
    """Coefficients u_0..u_n of the Puiseux solution, generic over the
    scalar type (complex, Fraction, or sympy expressions)."""
    if u0 == 0:
        raise ValueError("degenerate leading term: u0 must be nonzero")
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(u0, Fraction) or isinstance(J0, Fraction):
        third = lambda p: Fraction(p, 3)
    else:
        try:  # sympy scalars
            import sympy as _sp

            symbolic = any(isinstance(v, _sp.Basic) for v in (u0, J0, lam, C1))
        except ImportError:  # pragma: no cover
            symbolic = False
        if symbolic:
            import sympy as _sp

            third = lambda p: _sp.Rational(p, 3)
        else:
            third = lambda p: p / 3.0
    u = [u0]
    for k in range(1, n + 1):
        res0 = _cleared_residual(u + [0 * u0], J0, lam, C1, k - 2, third)
        b = res0.get(k - 2, 0)
        res1 = _cleared_residual(u + [1 + 0 * u0], J0, lam, C1, k - 2, third)
        a = res1.get(k - 2, 0) - b
        uk = -b / a
        if simplify is not None:
            uk = simplify(uk)
        u.append(uk)
    return u


@dataclass
class PuiseuxSeries:
    """Truncated expansion P = sum u_k (J - J0)^((k+2)/3)."""

    J0: complex
    coeffs: list
    order: int
    lam: float
    C1: float
    branch: int = 0  # cube-root branch: chi^(1/3) = omega**branch * principal
    base_exponent: Fraction = Fraction(2, 3)
    step: Fraction = Fraction(1, 3)

    def _root(self, J: complex) -> complex:
        chi = complex(J) - complex(self.J0)
        return _OMEGA**self.branch * chi ** (1.0 / 3.0)

    def eval_with_derivatives(self, J: complex) -> tuple[complex, complex, complex]:
        """(P, P', P'') at J, differentiating term by term."""
        t = self._root(J)
        chi = t**3
        P = Pp = Ppp = 0j
        for k, u in enumerate(self.coeffs):
            e = (k + 2) / 3.0
            base = u * t ** (k + 2)
            P += base
            Pp += base * e / chi
            Ppp += base * e * (e - 1.0) / chi**2
        return P, Pp, Ppp

    def __call__(self, J: complex) -> complex:
        return self.eval_with_derivatives(J)[0]

    def residual(self, J: complex) -> complex:
        P, Pp, Ppp = self.eval_with_derivatives(J)
        return peq_residual(P, Pp, Ppp, J, self.lam, self.C1)

    def to_jsonable(self) -> dict:
        from .serialize import complex_pair, exponent_str, float_str

        return {
            "J0": complex_pair(complex(self.J0)),
            "Lambda": float_str(self.lam),
            "C1": float_str(self.C1),
            "branch": self.branch,
            "base_exponent": exponent_str(2, 3),
            "step": exponent_str(1, 3),
            "order": self.order,
            "terms": [
                {"exponent": exponent_str(k + 2, 3), "coeff": complex_pair(complex(u))}
                for k, u in enumerate(self.coeffs)
            ],
        }


def puiseux_expand(u0: complex, J0: complex, lam: float, C1: float, n: int, branch: int = 0) -> PuiseuxSeries:
    """Puiseux solution with leading coefficient u0 about the movable point
    J0; the three cube-root branches give three solutions of equal residual
    order."""
    coeffs = puiseux_coefficients(complex(u0), complex(J0), lam, C1, n)
    return PuiseuxSeries(complex(J0), coeffs, n, lam, C1, branch % 3)


@dataclass
class ChartSeries:
    """Power series J(U), Z(U) of the regularizing first-order system."""

    J_of_U: Jet
    Z_of_U: Jet
    J0: complex
    Z0: complex
    lam: float
    C1: float


def regular_chart(J0: complex, Z0: complex, lam: float, C1: float, n: int) -> ChartSeries:
    """Unique power-series solution about U = 0 of

        dJ/dU = 2 U^2 / (Z - 4 Lam U J),
        dZ/dU = -4 (3 Lam^2 J^2 - Lam U^2 + 3 C1^2) U / (3 (Z - 4 Lam U J)),

    with J(0) = J0 and Z(0) = Z0 != 0."""
    Z0 = complex(Z0)
    J0 = complex(J0)
    if Z0 == 0:
        raise ValueError("chart breaks down: Z0 must be nonzero")
    jc = [J0] + [0j] * n
    zc = [Z0] + [0j] * n
    U = Jet.variable(n, zero=0j)
    for m in range(n):
        J = Jet(jc, n)
        Z = Jet(zc, n)
        W = Z - 4 * lam * U * J
        r1 = (W * J.deriv().truncate(n) - 2 * U * U)[m]
        jc[m + 1] = -r1 / (Z0 * (m + 1))
        J = Jet(jc, n)
        r2 = (3 * (W * Z.deriv().truncate(n)) + 4 * (3 * lam * lam * J * J - lam * U * U + 3 * C1 * C1) * U)[m]
        zc[m + 1] = -r2 / (3 * Z0 * (m + 1))
    return ChartSeries(Jet(jc, n), Jet(zc, n), J0, Z0, lam, C1)


def chart_to_puiseux(chart: ChartSeries) -> PuiseuxSeries:
    """Recompose P = U^2 as a Puiseux series in J - J0.

    J(U) - J0 = U^3 h(U) with h(0) = 2/(3 Z0), so s := (J - J0)^(1/3)
    = U h(U)^(1/3) is an ordinary invertible series; reverting it and
    squaring gives the coefficients on the (k+2)/3 lattice with leading
    coefficient u0 = (3 Z0 / 2)^(2/3)."""
    n = chart.J_of_U.order
    a = chart.J_of_U - chart.J0
    if abs(a[1]) > 1e-13 * abs(chart.Z0) or abs(a[2]) > 1e-13 * abs(chart.Z0):
        raise ValueError("chart series lacks the expected U^3 leading correction")
    h = Jet([a[m + 3] for m in range(n - 2)], n - 3)
    s = (Jet.variable(n - 3, zero=0j) * jet_fpow(h, 1.0 / 3.0)).truncate(n - 3)
    U_of_s = s.revert()
    P_of_s = U_of_s * U_of_s
    coeffs = [P_of_s[k + 2] for k in range(P_of_s.order - 1)]
    return PuiseuxSeries(chart.J0, coeffs, len(coeffs) - 1, chart.lam, chart.C1)


@dataclass
class ClosedFormSolution:
    """P(J) = u0 (J + sign*2i C1/Lam)^(2/3) - (3/2) Lam (J^2 + 4 C1^2/Lam^2)."""

    u0: complex
    C1: float
    lam: float
    sign: int
    shift: complex = field(init=False)

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("closed form undefined for Lambda = 0")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.shift = self.sign * 2j * self.C1 / self.lam

    def eval_with_derivatives(self, J: complex) -> tuple[complex, complex, complex]:
        y = complex(J) + self.shift
        lam, C1 = self.lam, self.C1
        P = self.u0 * y ** (2.0 / 3.0) - 1.5 * lam * (J * J + 4 * C1 * C1 / lam**2)
        Pp = (2.0 / 3.0) * self.u0 * y ** (-1.0 / 3.0) - 3 * lam * J
        Ppp = -(2.0 / 9.0) * self.u0 * y ** (-4.0 / 3.0) - 3 * lam
        return P, Pp, Ppp

    def __call__(self, J: complex) -> complex:
        return self.eval_with_derivatives(J)[0]

    def residual(self, J: complex) -> complex:
        P, Pp, Ppp = self.eval_with_derivatives(J)
        return peq_residual(P, Pp, Ppp, J, self.lam, self.C1)


def special_case_closed_form(u0: complex, C1: float, lam: float, sign: int = 1) -> ClosedFormSolution:
    """The terminating Puiseux case J0 = sign * 2i C1 / Lam."""
    return ClosedFormSolution(complex(u0), C1, lam, sign)
