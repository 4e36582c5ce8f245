"""Cartan CR invariants and Einstein-system residuals via jet arithmetic.

The chain runs: initial data (J, J', J'') at a point z0 is promoted to a
truncated Taylor jet of J by propagating the third-order equation

    J''' = (J'')^2/(2J') - 2 Lam J J'' - (10/3) Lam (J')^2
           - 2 (Lam^2 J^2 + C1^2) J',

then F1 = sqrt(J'), F2 = J''/(2J') - Lam J feed the ansatz

    p = F1(z)/sqrt(A Abar),  c = (dA/dzeta + i F2(z) + C1)/A,
    z = Im int (2/A) dzeta,

for A = 2 (z is the coordinate y) or A = zeta (z = 2 arg zeta). The
functions c, cbar, p become bivariate jets in (zeta, zetabar) through the
chain rule, and the invariants alpha_I, beta_I, gamma_I, theta_I are point
evaluations of rational expressions in those jets with fractional powers
taken on principal branches. The sign ambiguity of alpha_I is carried as an
explicit epsilon flag; assertions should use alpha_I^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .series import Jet, jet_fpow

__all__ = [
    "Jet2",
    "ZJetError",
    "z_jet_of_J",
    "CJet",
    "c_jet",
    "InvariantSet",
    "cartan_invariants",
    "HyperquadricError",
    "alpha_sq_flat_formula",
    "invariant_profile",
    "pde_residuals",
    "psi4_bracket",
    "SolutionSpec",
    "leroy_nurowski_solution",
    "flat_tag_solution",
    "series_solution",
]

R_FLOOR = 1e-10


class ZJetError(ValueError):
    pass


def jeq_third_derivative(J, Jp, Jpp, lam, C1):
    return (
        Jpp * Jpp / (2 * Jp)
        - 2 * lam * J * Jpp
        - (10.0 / 3.0) * lam * Jp * Jp
        - 2 * (lam * lam * J * J + C1 * C1) * Jp
    )


def z_jet_of_J(initial, lam: float, C1: float, order: int = 8, physical: bool = True) -> Jet:
    """Taylor jet of J about its base point from (J, J', J'') data,
    propagating the third-order equation; coefficients are complex.

    physical=False admits J' < 0: the invariants only involve c, which
    never takes a square root of J'."""
    J0, Jp0, Jpp0 = initial
    if order > 20:
        raise ValueError("order must be <= 20")
    if abs(complex(Jp0)) < 1e-12:
        raise ZJetError("J' must be nonzero at the base point")
    if physical and not (complex(Jp0).real > 0):
        raise ZJetError("J' must be positive (physicality)")
    c = [complex(J0), complex(Jp0), complex(Jpp0) / 2.0] + [0j] * (order - 2)
    for m in range(3, order + 1):
        J = Jet(c, order)
        Jp = J.deriv().truncate(order - 1)
        Jpp = Jp.deriv().truncate(order - 2)
        rhs = (
            Jpp * Jpp / Jp * 0.5
            - 2 * lam * (J.truncate(order - 2) * Jpp)
            - (10.0 / 3.0) * lam * (Jp.truncate(order - 2) * Jp.truncate(order - 2))
            - 2 * ((lam * J) * (lam * J) + C1 * C1).truncate(order - 2) * Jp.truncate(order - 2)
        )
        c[m] = rhs[m - 3] / (m * (m - 1) * (m - 2))
    return Jet(c, order)


# -- bivariate jets in (zeta, zetabar) ------------------------------------


class Jet2:
    """Truncated bivariate Taylor expansion around a base point; entry
    (a, b) is the mixed partial d^a_zeta d^b_zetabar / (a! b!). Entries
    with a + b > order are dropped."""

    __slots__ = ("c", "order")

    def __init__(self, c, order: int):
        self.order = order
        arr = np.zeros((order + 1, order + 1), dtype=complex)
        src = np.asarray(c, dtype=complex)
        n = min(order + 1, src.shape[0]), min(order + 1, src.shape[1])
        arr[: n[0], : n[1]] = src[: n[0], : n[1]]
        for a in range(order + 1):
            for b in range(order + 1):
                if a + b > order:
                    arr[a, b] = 0
        self.c = arr

    @classmethod
    def const(cls, v, order: int) -> "Jet2":
        out = cls(np.zeros((1, 1)), order)
        out.c[0, 0] = v
        return out

    @classmethod
    def delta(cls, which: int, order: int) -> "Jet2":
        """(zeta - zeta0) for which=1, (zetabar - zetabar0) for which=2."""
        out = cls(np.zeros((1, 1)), order)
        if which == 1:
            out.c[1, 0] = 1.0
        else:
            out.c[0, 1] = 1.0
        return out

    @property
    def value(self) -> complex:
        return complex(self.c[0, 0])

    def partial(self, a: int, b: int) -> complex:
        return complex(self.c[a, b]) * math.factorial(a) * math.factorial(b)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            other = Jet2.const(other, self.order)
        n = min(self.order, other.order)
        out = Jet2(np.zeros((1, 1)), n)
        out.c = self.c[: n + 1, : n + 1] + other.c[: n + 1, : n + 1]
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Jet2(np.zeros((1, 1)), self.order)
        out.c = -self.c
        return out

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            out = Jet2(np.zeros((1, 1)), self.order)
            out.c = self.c * complex(other)
            return out
        n = min(self.order, other.order)
        out = Jet2(np.zeros((1, 1)), n)
        for a in range(n + 1):
            for b in range(n + 1 - a):
                if self.c[a, b] == 0:
                    continue
                out.c[a:, b:][: n + 1 - a, : n + 1 - b] += self.c[a, b] * other.c[: n + 1 - a, : n + 1 - b]
        # re-drop entries beyond the total-degree cap
        for a in range(n + 1):
            for b in range(n + 1):
                if a + b > n:
                    out.c[a, b] = 0
        return out

    __rmul__ = __mul__

    def d1(self) -> "Jet2":
        """Partial derivative in zeta (order drops by one)."""
        n = self.order - 1
        out = Jet2(np.zeros((1, 1)), n)
        for a in range(n + 1):
            out.c[a, : n + 1] = self.c[a + 1, : n + 1] * (a + 1)
        return out

    def d2(self) -> "Jet2":
        n = self.order - 1
        out = Jet2(np.zeros((1, 1)), n)
        for b in range(n + 1):
            out.c[: n + 1, b] = self.c[: n + 1, b + 1] * (b + 1)
        return out

    def conj(self) -> "Jet2":
        """Jet of the complex conjugate function: swap indices, conjugate."""
        out = Jet2(np.zeros((1, 1)), self.order)
        out.c = np.conj(self.c.T)
        return out


def compose_univariate(coeffs, inner: Jet2) -> Jet2:
    """h(inner) for a univariate jet h given by Taylor coefficients
    (h^(k)/k!) and a bivariate inner jet with zero constant term."""
    if abs(inner.value) > 1e-13:
        raise ValueError("inner jet must have zero constant term")
    out = Jet2.const(coeffs[-1], inner.order)
    for k in range(len(coeffs) - 2, -1, -1):
        out = out * inner + coeffs[k]
    return out


def _geometric(inner: Jet2, order: int) -> Jet2:
    """1/(1 + inner) with inner vanishing at the base point."""
    return compose_univariate([(-1.0) ** k for k in range(order + 1)], inner)


def _log1p_jet(inner: Jet2, order: int) -> Jet2:
    coeffs = [0.0] + [(-1.0) ** (k + 1) / k for k in range(1, order + 1)]
    return compose_univariate(coeffs, inner)


def _binom_pow(inner: Jet2, alpha: float, order: int) -> Jet2:
    """(1 + inner)^alpha."""
    coeffs = [1.0]
    for k in range(1, order + 1):
        coeffs.append(coeffs[-1] * (alpha - (k - 1)) / k)
    return compose_univariate(coeffs, inner)


@dataclass
class CJet:
    """Jets of c, cbar, p at a base point, plus the frame data."""

    c: Jet2
    cbar: Jet2
    p: Jet2
    z0: float
    zeta0: complex
    A_choice: str
    lam: float
    C1: float
    order: int


def c_jet(J_jet: Jet, lam: float, C1: float, A_choice="2", zeta0=None, z0: float = None) -> CJet:
    """Bivariate jets of the ansatz functions at a point.

    A_choice "2": A = 2, z = Im zeta, base point zeta0 = x0 + i z0.
    A_choice "zeta": A = zeta, z = 2 arg zeta, base point on the unit
    circle by default. J_jet is the univariate jet of J at z0."""
    N = J_jet.order - 2
    if N < 3:
        raise ValueError("J jet order must be at least 5")
    Jp = J_jet.deriv().truncate(J_jet.order - 1)
    Jpp = Jp.deriv().truncate(J_jet.order - 2)
    if abs(Jp[0]) < 1e-12:
        raise ZJetError("J' must be nonzero at the base point")
    # J' < 0 yields a complex F1; c and the invariants are unaffected,
    # only the metric itself requires J' > 0
    F1 = jet_fpow(Jp, 0.5)
    F2 = Jpp / Jp * 0.5 - lam * J_jet.truncate(J_jet.order - 2)
    if z0 is None:
        z0 = 0.0

    if A_choice in ("2", 2):
        zeta0 = complex(0.0, z0) if zeta0 is None else complex(zeta0)
        # z - z0 = -i/2 (zeta - zeta0) + i/2 (zetabar - zetabar0)
        dz = Jet2.delta(1, N) * (-0.5j) + Jet2.delta(2, N) * (0.5j)
        F2b = compose_univariate(F2.c[: N + 1], dz)
        F1b = compose_univariate(F1.c[: N + 1], dz)
        c = (F2b * 1j + C1) * 0.5
        cbar = (F2b * (-1j) + C1) * 0.5
        p = F1b * 0.5
    elif A_choice in ("zeta", "z"):
        zeta0 = cmath.exp(0.5j * z0) if zeta0 is None else complex(zeta0)
        if zeta0 == 0:
            raise ValueError("A = zeta chart breaks down at zeta = 0")
        zb0 = zeta0.conjugate()
        if abs(2.0 * cmath.phase(zeta0) - z0) > 1e-12:
            raise ValueError("zeta0 inconsistent with z0 = 2 arg(zeta0)")
        u = Jet2.delta(1, N) * (1.0 / zeta0)  # (zeta - zeta0)/zeta0
        v = Jet2.delta(2, N) * (1.0 / zb0)
        # z - z0 = -i (log(1+u) - log(1+v))
        dz = (_log1p_jet(u, N) - _log1p_jet(v, N)) * (-1j)
        F2b = compose_univariate(F2.c[: N + 1], dz)
        F1b = compose_univariate(F1.c[: N + 1], dz)
        inv_zeta = _geometric(u, N) * (1.0 / zeta0)
        inv_zetab = _geometric(v, N) * (1.0 / zb0)
        c = (F2b * 1j + (1.0 + C1)) * inv_zeta
        cbar = (F2b * (-1j) + (1.0 + C1)) * inv_zetab
        # p = F1 / sqrt(zeta zetabar)
        amp = 1.0 / cmath.sqrt(zeta0 * zb0)
        p = F1b * amp * _binom_pow(u, -0.5, N) * _binom_pow(v, -0.5, N)
    else:
        raise ValueError(f"unknown A choice {A_choice!r}")
    return CJet(c, cbar, p, z0, zeta0, str(A_choice), lam, C1, N)


class HyperquadricError(ValueError):
    """r = 0: the CR structure is locally a hyperquadric and the
    invariants are undefined."""


@dataclass
class InvariantSet:
    alpha: complex
    alpha_sq: complex
    beta: complex
    gamma: complex
    theta: complex
    r: complex
    l: complex
    epsilon: int = 1
    z: float = 0.0

    def to_jsonable(self) -> dict:
        from .serialize import complex_pair, float_str

        return {
            "z": float_str(self.z),
            "alpha": complex_pair(self.alpha),
            "alpha_sq": complex_pair(self.alpha_sq),
            "beta": complex_pair(self.beta),
            "gamma": complex_pair(self.gamma),
            "theta": complex_pair(self.theta),
            "r": complex_pair(self.r),
            "epsilon": self.epsilon,
        }


def cartan_invariants(cj: CJet, epsilon: int = 1) -> InvariantSet:
    """alpha_I, beta_I, gamma_I, theta_I at the jet's base point.

    Fractional powers use principal branches; the leftover sign of the
    eighth root lands in the epsilon flag attached to alpha_I."""
    if cj.order < 5:
        raise ValueError(f"invariants need a jet of order >= 5, got {cj.order}")
    c, cbar = cj.c, cj.cbar
    l = -c.d1().d2() - c * c.d2()
    lbar = l.conj()
    r = (lbar.d2() + 2 * cbar * lbar) * (1.0 / 6.0)
    rbar = r.conj()
    r0, rb0 = r.value, rbar.value
    rr = r0 * rb0
    if abs(r0) <= R_FLOOR:
        raise HyperquadricError(
            f"|r| = {abs(r0):.3e} <= {R_FLOOR}: hyperquadric case, invariants undefined"
        )
    c0, cb0 = c.value, cbar.value
    r1, r2 = r.d1().value, r.d2().value
    rb1, rb2 = rbar.d1().value, rbar.d2().value

    num_a = 5 * rb0 * r1 + r0 * rb1 + 8 * c0 * rr
    alpha = -num_a / (8 * cmath.sqrt(rb0) * (rr**7) ** (1.0 / 8.0)) * epsilon

    # the relative signs inside the bracket are fixed by requiring beta to be
    # real and independent of the holomorphic frame choice on every solution
    rr94 = (rr**9) ** 0.25
    beta = (
        3 * rb0**2 * r2 * r1
        + 3 * r0**2 * rb1 * rb2
        - rr
        * (
            rb1 * r2
            - 7 * r1 * rb2
            - 16 * cb0 * rb0 * r1
            - 16 * c0 * r0 * rb2
            + 8 * rr * c.d2().value
            - 16 * c0 * cb0 * rr
        )
    ) / (32 * rr94)

    gamma = -(
        7 * rb0**2 * r2 * r1
        + 7 * r0**2 * rb2 * rb1
        - rr
        * (
            8 * r0 * rbar.d1().d2().value
            + 8 * rb0 * r.d1().d2().value
            + rb1 * r2
            + r1 * rb2
            + 4 * c0 * rb0 * r2
            + 4 * cb0 * r0 * rb1
            + 4 * c0 * r0 * rb2
            + 4 * cb0 * rb0 * r1
            + 24 * rr * c.d2().value
            + 16 * c0 * cb0 * rr
        )
    ) / (32 * rr94)

    rr74 = (rr**7) ** 0.25
    r22 = r.d2().d2().value
    rb22 = rbar.d2().d2().value
    theta = (
        -1j
        * (
            5 * rb0**2 * r2**2
            + 5 * r0**2 * rb2**2
            - rr
            * (
                4 * r0 * rb22
                + 4 * rb0 * r22
                - 2 * r2 * rb2
                - 4 * cb0 * rb0 * r2
                - 4 * cb0 * r0 * rb2
                + 16 * rr * cbar.d2().value
            )
        )
        / (16 * r0 * rr74)
    )
    return InvariantSet(alpha, alpha * alpha, beta, gamma, theta, r0, l.value, epsilon, cj.z0)


def alpha_sq_flat_formula(J: float, lam: float, C2: float) -> complex:
    """alpha_I^2 on the C1 = 0 conformally flat family,
    -16 sqrt(2/5) ((3 Lam J^(4/3) + 2 C2)/(3 Lam J^(4/3) - 2 C2))^2,
    with the real cube root for J^(4/3) = (J^(1/3))^4."""
    j43 = (math.copysign(abs(J) ** (1 / 3), J)) ** 4
    den = 3 * lam * j43 - 2 * C2
    if den == 0:
        raise ZeroDivisionError("alpha_I^2 pole: 3 Lam J^(4/3) = 2 C2")
    return -16 * math.sqrt(2.0 / 5.0) * ((3 * lam * j43 + 2 * C2) / den) ** 2


# -- solution specifications ----------------------------------------------


@dataclass
class SolutionSpec:
    """A concrete solution of the third-order J equation: initial data as
    a function of z plus the parameters."""

    name: str
    lam: float
    C1: float
    data: object  # callable z -> (J, J', J'')

    def jet(self, z: float, order: int = 10) -> Jet:
        return z_jet_of_J(self.data(z), self.lam, self.C1, order, physical=False)

    def cjet(self, z: float, order: int = 10, A_choice="2") -> CJet:
        return c_jet(self.jet(z, order), self.lam, self.C1, A_choice, z0=z)


def leroy_nurowski_solution(lam: float, C0: float = 0.0, C1: float = 1.0) -> SolutionSpec:
    """J = 3 C1/(2 Lam tan(C1 (z+C0)/2)), degenerating to 3/(Lam (z+C0))
    as C1 -> 0."""
    if C1 == 0:

        def data(z):
            u = z + C0
            return (3.0 / (lam * u), -3.0 / (lam * u * u), 6.0 / (lam * u**3))

    else:

        def data(z):
            u = C1 * (z + C0) / 2.0
            s, t = math.sin(u), math.tan(u)
            J = 3.0 * C1 / (2.0 * lam * t)
            Jp = -3.0 * C1**2 / (4.0 * lam * s * s)
            Jpp = 3.0 * C1**3 * math.cos(u) / (4.0 * lam * s**3)
            return (J, Jp, Jpp)

    return SolutionSpec("leroy-nurowski", lam, C1, data)


def flat_tag_solution(tag: str, lam: float, C0: float = 0.0, C1: float = 0.0) -> SolutionSpec:
    """Closed-form conformally flat solutions."""
    if tag == "JFlatS":
        if C1 == 0:
            raise ValueError("JFlatS needs C1 != 0; use JFlatSS")

        def data(z):
            u = 3.0 * C1 * (z + C0)
            s, t = math.sin(u), math.tan(u)
            J = 2.0 * C1 / (lam * t)
            Jp = -6.0 * C1**2 / (lam * s * s)
            Jpp = 36.0 * C1**3 * math.cos(u) / (lam * s**3)
            return (J, Jp, Jpp)

    elif tag == "JFlatSS":

        def data(z):
            u = z + C0
            a = 2.0 / (3.0 * lam)
            return (a / u, -a / u**2, 2.0 * a / u**3)

    else:
        raise ValueError(f"unknown flat tag {tag!r}")
    return SolutionSpec(tag, lam, C1, data)


def series_solution(u0: float, lam: float, C1: float = 0.0, order: int = 16) -> SolutionSpec:
    """The regular solution J(0)=0, J'(0)=u0, J''(0)=0, carried away from
    the origin by adaptive integration of the third-order equation.

    u0 < 0 is allowed: the invariants only need c, not sqrt(J'); the
    metric itself exists only where J' > 0."""
    if u0 == 0:
        raise ValueError("u0 must be nonzero")
    from . import rk

    def rhs(z, y):
        return (y[1], y[2], jeq_third_derivative(y[0], y[1], y[2], lam, C1).real)

    cache: dict = {}

    def data(z):
        if z == 0.0:
            return (0.0, u0, 0.0)
        key = round(z, 14)
        if key not in cache:
            res = rk.integrate(rhs, 0.0, [0.0, u0, 0.0], z, 1e-12)
            if res.termination != rk.REACHED_END:
                raise ZJetError(f"series solution left the physical window at z={res.termination_location}")
            cache[key] = tuple(res.ys[-1])
        return cache[key]

    return SolutionSpec(f"series(u0={u0})", lam, C1, data)


@dataclass
class InvariantProfile:
    sets: list
    z_values: list
    max_deviation: dict  # per invariant name
    r_vanishing: list  # z where the hyperquadric guard fired

    def to_jsonable(self) -> dict:
        from .serialize import float_str

        return {
            "samples": len(self.sets),
            "max_deviation": {k: float_str(v) for k, v in self.max_deviation.items()},
            "r_vanishing": [float_str(z) for z in self.r_vanishing],
            "profile": [s.to_jsonable() for s in self.sets],
        }


def invariant_profile(spec: SolutionSpec, z_lo: float, z_hi: float, samples: int = 20, order: int = 10) -> InvariantProfile:
    """Invariants along z with a constancy report (max deviation from the
    mean, per invariant)."""
    zs = np.linspace(z_lo, z_hi, samples)
    sets = []
    bad = []
    for z in zs:
        try:
            sets.append(cartan_invariants(spec.cjet(float(z), order)))
        except HyperquadricError:
            bad.append(float(z))
    dev = {}
    for name in ("alpha_sq", "beta", "gamma", "theta"):
        vals = np.array([getattr(s, name) for s in sets])
        dev[name] = float(np.max(np.abs(vals - np.mean(vals)))) if len(vals) else math.nan
    return InvariantProfile(sets, [float(z) for z in zs], dev, bad)


# -- Einstein-system residuals -------------------------------------------


@dataclass
class PdeResiduals:
    res_reality: float
    res_einstein: float
    res_psi3: float

    def max(self) -> float:
        return max(self.res_reality, self.res_einstein, self.res_psi3)

    def to_jsonable(self) -> dict:
        from .serialize import float_str

        return {
            "reality": float_str(self.res_reality),
            "einstein": float_str(self.res_einstein),
            "psi3": float_str(self.res_psi3),
        }


def pde_residuals_from_cjet(cj: CJet) -> PdeResiduals:
    c, cbar, p = cj.c, cj.cbar, cj.p
    lam = cj.lam
    p0 = p.value
    if p0 == 0:
        raise ValueError("degenerate metric: p = 0")
    p1, p2 = p.d1().value, p.d2().value
    p12 = p.d1().d2().value
    p22 = p.d2().d2().value
    p122 = p.d1().d2().d2().value
    c0, cb0 = c.value, cbar.value
    cb1 = cbar.d1().value
    c2 = c.d2().value
    cb12 = cbar.d1().d2().value

    res1 = cbar.d1().value - c.d2().value
    res2 = (
        2 * p12
        + cb0 * p1
        + c0 * p2
        + 0.5 * c0 * cb0 * p0
        + 0.75 * (cb1 + c2) * p0
        - (2.0 / 3.0) * lam * p0**3
    )
    res3 = (
        p0 * p122
        - p1 * p22
        + 2 * cb0 * p0 * p12
        - 2 * cb0 * p1 * p2
        + 2 * cb1 * p0 * p2
        + (cb12 + 2 * cb0 * cb1) * p0**2
        - 2 * lam * (2 * p2 + cb0 * p0) * p0**3
    )
    return PdeResiduals(abs(res1), abs(res2), abs(res3))


def pde_residuals(spec: SolutionSpec, z: float, order: int = 10, A_choice="2") -> PdeResiduals:
    return pde_residuals_from_cjet(spec.cjet(z, order, A_choice))


def psi4_bracket(cj: CJet) -> complex:
    """The bracketed factor of the Weyl scalar:
    2 p0 p22 + 6 p2^2 + 10 cbar0 p0 p2 + (cbar2 + 3 cbar0^2) p0^2."""
    p, cbar = cj.p, cj.cbar
    p0, p2, p22 = p.value, p.d2().value, p.d2().d2().value
    cb0, cb2 = cbar.value, cbar.d2().value
    return 2 * p0 * p22 + 6 * p2**2 + 10 * cb0 * p0 * p2 + (cb2 + 3 * cb0**2) * p0**2
