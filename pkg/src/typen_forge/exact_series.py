"""Exact power-series solutions of the reduced second-order equation

    g'' = -(g' + 2w)^2/(2g) - 2C/g - 10/3,   C in {0, 1},

about w = 0 with g(0) = u0 != 0, g'(0) = 0, and of the third-order equation
for J(z) about z = 0. All coefficients are exact rationals; the symbolic
variant carries each even coefficient u_{2k} as a polynomial in u0 divided
by u0**(2k-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .polyq import PolyQ
from .series import Jet

__all__ = [
    "PowerSeriesSolution",
    "U0Poly",
    "BoundReport",
    "FactorReport",
    "g_coefficients",
    "g_coefficients_symbolic",
    "check_common_factor",
    "verify_theorem4",
    "j_taylor",
    "residual_g",
    "g_series_residual_jet",
    "g_low_order_from_ode",
    "tail_sign_report",
    "K_at_origin",
]

DEFAULT_ORDER_CEILING = 64

# the two values of u0 at which the series terminates as a quadratic
TERMINATING_U0 = (Fraction(-3, 4), Fraction(-6))

# common factor of every P_k, k >= 2: (u0 + 3/4)(u0 + 6)
COMMON_FACTOR = PolyQ([Fraction(9, 2), Fraction(27, 4), 1])


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class PowerSeriesSolution:
    """Truncated series with exact rational coefficients, indexed by power."""

    variable: str  # "w" or "z"
    u0: Fraction
    parameters: dict
    coeffs: list  # Fraction, coeffs[k] multiplies variable**k
    order: int

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self, n: int = 1) -> "PowerSeriesSolution":
        c = list(self.coeffs)
        for _ in range(n):
            c = [(k + 1) * c[k + 1] for k in range(len(c) - 1)] or [Fraction(0)]
        return PowerSeriesSolution(self.variable, self.u0, self.parameters, c, max(len(c) - 1, 0))

    def even_coefficient(self, k: int) -> Fraction:
        """u_{2k} of the g-series."""
        return self.coeffs[2 * k] if 2 * k < len(self.coeffs) else Fraction(0)

    def to_jsonable(self) -> dict:
        from .serialize import frac_str

        return {
            "variable": self.variable,
            "u0": frac_str(self.u0),
            "parameters": {k: frac_str(v) for k, v in self.parameters.items()},
            "order": self.order,
            "coeffs": [frac_str(c) for c in self.coeffs],
        }


@dataclass
class U0Poly:
    """u_{2k} = numerator(u0) / u0**denom_power with exact coefficients."""

    numerator: PolyQ
    denom_power: int

    @property
    def numerator_coeffs(self) -> list:
        return list(self.numerator.coeffs)

    def __call__(self, u0: Fraction) -> Fraction:
        u0 = _frac(u0)
        if u0 == 0:
            raise ZeroDivisionError("series requires g(0) != 0")
        return self.numerator(u0) / u0**self.denom_power

    def to_jsonable(self) -> dict:
        from .serialize import frac_str

        return {
            "numerator_coeffs": [frac_str(c) for c in self.numerator.coeffs],
            "denom_power": self.denom_power,
        }


@dataclass
class BoundReport:
    u0: Fraction
    C: Fraction
    M: Fraction
    j_max: int
    ineq1_holds: bool
    ineq2_holds: bool
    first_violation: Optional[int]
    margin_min: Optional[Fraction]

    @property
    def bound_holds(self) -> bool:
        return self.first_violation is None

    def to_jsonable(self) -> dict:
        from .serialize import frac_str

        return {
            "u0": frac_str(self.u0),
            "C": frac_str(self.C),
            "M": frac_str(self.M),
            "j_max": self.j_max,
            "ineq1_holds": self.ineq1_holds,
            "ineq2_holds": self.ineq2_holds,
            "first_violation": self.first_violation,
            "margin_min": frac_str(self.margin_min) if self.margin_min is not None else None,
        }


@dataclass
class FactorReport:
    k_max: int
    divides: dict  # k -> bool (zero remainder under division by the common factor)
    quotients: dict  # k -> PolyQ
    root_values: dict  # k -> (P_k(-3/4), P_k(-6)) by direct evaluation
    quotient_gcd: PolyQ = field(default_factory=PolyQ)

    @property
    def all_divide(self) -> bool:
        return all(self.divides.values())


def _check_u0(u0: Fraction) -> Fraction:
    u0 = _frac(u0)
    if u0 == 0:
        raise ValueError("series requires g(0) != 0")
    return u0


def g_even_coefficients(u0: Fraction, k_max: int) -> list:
    """[u_0, u_2, ..., u_{2 k_max}] by the exact recursion."""
    u0 = _check_u0(u0)
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    u = [u0]
    if k_max >= 1:
        u.append(Fraction(-5, 3) * (u0 + Fraction(3, 5)) / u0)
    if k_max >= 2:
        u.append(Fraction(-2, 27) * (u0 + Fraction(3, 4)) * (u0 + 6) / u0**3)
    for k in range(2, k_max):
        s = (2 * k + Fraction(5, 3)) * u[k]
        for l in range(k):
            s += (k + l + 1) * (l + 1) * u[l + 1] * u[k - l]
        u.append(-s / ((2 * k + 1) * (k + 1) * u0))
    return u


def g_coefficients(u0: Fraction, k_max: int, C: int = 1) -> PowerSeriesSolution:
    """Even power series g(w) = sum u_{2k} w^{2k} to order 2*k_max."""
    even = g_even_coefficients(u0, k_max)
    coeffs = []
    for uk in even:
        coeffs.extend([uk, Fraction(0)])
    coeffs.pop()
    return PowerSeriesSolution("w", _frac(u0), {"C": Fraction(C)}, coeffs, 2 * k_max)


def g_coefficients_symbolic(k_max: int) -> list[U0Poly]:
    """[P_0/u0^-1, P_1/u0, ..., P_{k_max}/u0^{2 k_max - 1}] with P_k exact."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2 for the symbolic recursion")
    P = [
        PolyQ([1]),
        PolyQ([-1, Fraction(-5, 3)]),
        Fraction(-2, 27) * COMMON_FACTOR,
    ]
    for k in range(2, k_max):
        N = (2 * k + Fraction(5, 3)) * P[k].shift(1)
        for l in range(k):
            N = N + (k + l + 1) * (l + 1) * (P[l + 1] * P[k - l])
        P.append(Fraction(-1, (2 * k + 1) * (k + 1)) * N)
    return [U0Poly(P[k], 2 * k - 1) for k in range(k_max + 1)]


def check_common_factor(k_max: int) -> FactorReport:
    """Divide each P_k (k >= 2) by (u0+3/4)(u0+6) exactly and cross-check by
    direct evaluation at the two roots. The gcd of the quotients exposes any
    further common rational root (degree 0 means none)."""
    polys = g_coefficients_symbolic(k_max)
    divides, quotients, root_values = {}, {}, {}
    g = None
    for k in range(2, k_max + 1):
        Pk = polys[k].numerator
        q, r = Pk.divmod(COMMON_FACTOR)
        divides[k] = not bool(r)
        quotients[k] = q
        root_values[k] = (Pk(Fraction(-3, 4)), Pk(Fraction(-6)))
        g = q if g is None else g.gcd(q)
    return FactorReport(k_max, divides, quotients, root_values, g if g is not None else PolyQ())


# rational brackets for pi, 20 decimal digits each side
_PI_LO = Fraction("3.14159265358979323846")
_PI_HI = Fraction("3.14159265358979323847")


def _leq_pi_squared_times(coeff: Fraction, bound: Fraction) -> bool:
    """Decide coeff * pi^2 <= bound exactly (coeff > 0)."""
    q = bound / coeff
    if q >= _PI_HI * _PI_HI:
        return True
    if q <= _PI_LO * _PI_LO:
        return False
    raise ArithmeticError("pi bracket too coarse for this comparison")


def verify_theorem4(u0: Fraction, C: Fraction, M: Fraction, j_max: int) -> BoundReport:
    """Check the two sufficient inequalities and the coefficient bound
    |u_{2j}| <= C M^{2j} / (2j)^2 for j = 2..j_max, all in exact arithmetic."""
    u0, C, M = _check_u0(u0), _frac(C), _frac(M)
    if C <= 0 or M <= 0:
        raise ValueError("need C > 0 and M > 0")
    lhs1 = abs(Fraction(2, 27) * (u0 + Fraction(3, 4)) * (u0 + 6) / u0**3)
    ineq1 = lhs1 <= C * M**4 / 16
    # (pi^2/12 - 1/4) C <= |u0| - (5/3 + 1/|u0|) * 9/(4 M^2)
    rhs2 = abs(u0) - (Fraction(5, 3) + 1 / abs(u0)) * Fraction(9, 4) / M**2 + C / 4
    ineq2 = rhs2 > 0 and _leq_pi_squared_times(C / 12, rhs2)
    even = g_even_coefficients(u0, j_max)
    first_violation = None
    margin_min = None
    for j in range(2, j_max + 1):
        margin = C * M ** (2 * j) / (2 * j) ** 2 - abs(even[j])
        if margin_min is None or margin < margin_min:
            margin_min = margin
        if margin < 0 and first_violation is None:
            first_violation = j
    return BoundReport(u0, C, M, j_max, ineq1, ineq2, first_violation, margin_min)


def _jeq_third_derivative_jet(J: Jet, lam: Fraction, C1: Fraction) -> Jet:
    """Jet of J''' from the third-order equation (exact if inputs exact)."""
    Jp = J.deriv()
    Jpp = Jp.deriv()
    return (
        Jpp * Jpp / (2 * Jp)
        - 2 * lam * J * Jpp
        - Fraction(10, 3) * lam * Jp * Jp
        - 2 * (lam * lam * J * J + C1 * C1) * Jp
    )


def j_taylor(u0: Fraction, lam: Fraction, order: int) -> PowerSeriesSolution:
    """Taylor series of J(z) at z = 0 with J(0)=0, J'(0)=u0 > 0, J''(0)=0
    and C1 = 0, by exact jet propagation of the third-order equation."""
    u0 = _frac(u0)
    lam = _frac(lam)
    if u0 <= 0:
        raise ValueError("series requires J'(0) = u0 > 0")
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > DEFAULT_ORDER_CEILING:
        raise ValueError(f"order ceiling is {DEFAULT_ORDER_CEILING}")
    c = [Fraction(0)] * (order + 1)
    c[1] = u0
    for m in range(3, order + 1):
        rhs = _jeq_third_derivative_jet(Jet(c[:m], m - 1), lam, Fraction(0))
        c[m] = rhs[m - 3] / (m * (m - 1) * (m - 2))
    return PowerSeriesSolution("z", u0, {"Lambda": lam, "C1": Fraction(0)}, c, order)


def K_at_origin(series: PowerSeriesSolution) -> Fraction:
    """Real part of the conformal-flatness indicator K at z = 0 for a
    J-series with C1 = 0:  K = Lam J J'' - (2/3) Lam (J')^2 + 2 Lam^2 J^2 J'."""
    lam = series.parameters["Lambda"]
    J0 = series.coeffs[0]
    Jp0 = series.coeffs[1]
    Jpp0 = 2 * series.coeffs[2]
    return lam * J0 * Jpp0 - Fraction(2, 3) * lam * Jp0**2 + 2 * (lam**2 * J0**2) * Jp0


def residual_g(g, gp, gpp, w, C: int = 1):
    """g'' + (g' + 2w)^2/(2g) + 2C/g + 10/3; exact on Fraction inputs."""
    if g == 0:
        raise ZeroDivisionError("singular point: g = 0")
    ten_thirds = Fraction(10, 3) if isinstance(g, (Fraction, int)) else 10.0 / 3.0
    return gpp + (gp + 2 * w) ** 2 / (2 * g) + 2 * C / g + ten_thirds


def g_series_residual_jet(series: PowerSeriesSolution, C: int = 1) -> Jet:
    """Jet in w of the residual of the truncated g-series; vanishes through
    order 2*k_max - 2 for a correct truncation."""
    n = series.order
    g = Jet(series.coeffs, n)
    w = Jet.variable(n, zero=Fraction(0), one=Fraction(1))
    gp = g.deriv().truncate(n)
    gpp = g.deriv().deriv().truncate(n)
    return gpp + (gp + 2 * w) ** 2 / (2 * g) + Fraction(2 * C, 1) / g + Fraction(10, 3)


def g_low_order_from_ode(u0: Fraction, k_max: int = 2, C: int = 1) -> list:
    """Independent derivation of u_2, u_4 (and beyond) by matching the Taylor
    expansion of the cleared equation 2 g g'' + (g'+2w)^2 + 4C + (20/3) g = 0
    order by order, without using the printed closed forms."""
    u0 = _check_u0(u0)
    n = 2 * k_max
    c = [Fraction(0)] * (n + 1)
    c[0] = u0
    for m in range(2, n + 1):
        g = Jet(c[:m], n)
        w = Jet.variable(n, zero=Fraction(0), one=Fraction(1))
        gp = g.deriv().truncate(n)
        gpp = g.deriv().deriv().truncate(n)
        E = 2 * g * gpp + (gp + 2 * w) ** 2 + 4 * C + Fraction(20, 3) * g
        # coefficient of w^(m-2) in E is linear in c[m] with factor 2 u0 m(m-1)
        c[m] = -E[m - 2] / (2 * u0 * m * (m - 1))
    return [c[2 * k] for k in range(k_max + 1)]


def tail_sign_report(u0: Fraction, k_max: int) -> dict:
    """Empirical tail behaviour of u_{2k}: signs and magnitude ratios."""
    even = g_even_coefficients(u0, k_max)
    signs = [0 if u == 0 else (1 if u > 0 else -1) for u in even]
    alternating_from = None
    for start in range(2, k_max):
        ok = all(
            signs[k] != 0 and signs[k] == -signs[k + 1] for k in range(start, k_max)
        )
        if ok:
            alternating_from = start
            break
    decreasing = all(
        abs(even[k + 1]) < abs(even[k])
        for k in range((alternating_from or k_max), k_max)
    )
    return {
        "u0": u0,
        "k_max": k_max,
        "signs": signs,
        "alternating_from": alternating_from,
        "magnitudes_decreasing_in_tail": decreasing,
    }
