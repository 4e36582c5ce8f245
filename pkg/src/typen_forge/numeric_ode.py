"""Adaptive numeric integration of the reduced equations and the numeric
cross-transforms between their solution families.

Covers: the initial value problem g(0)=u0, g'(0)=0 for

    g'' = -(g' + 2w)^2 / (2g) - 2C/g - 10/3,

the parabola-sandwich diagnostic and the large-w remainder fit; the
reparametrization P(J) -> J(z) by quadrature of 1/P; the Abel change of
variables t = P/(Lam J^2), f = Lam J^2/(J P' - 2P); the three implicitly
defined conformally flat families and their closed-form degenerations; and
the renormalized curvature scalar K.

All trajectories carry per-sample residual estimates computed from the
dense (Hermite) interpolant at step midpoints, so accuracy claims are
checked against the equation itself rather than against the integrator's
own bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import rk
from .rk import REACHED_END, SINGULARITY, STEP_COLLAPSE

__all__ = [
    "Trajectory",
    "FlatFamilyParams",
    "integrate_g",
    "sandwich_report",
    "asymptotic_fit",
    "reparametrize_P_to_J",
    "abel_transform",
    "flat_family",
    "K_of_solution",
    "abel_rhs",
    "abel_special_solution",
    "PhysicalityError",
]

G_SINGULARITY_FLOOR = 1e-10


class PhysicalityError(ValueError):
    pass


@dataclass
class Trajectory:
    """Adaptively sampled solution with per-sample residual estimates."""

    variable: str
    ode_id: str
    params: dict
    tol: float
    x: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    ypp: np.ndarray | None
    steps: np.ndarray
    local_errors: np.ndarray
    residual: np.ndarray
    termination: str
    termination_location: float | None = None
    termination_detail: str = ""
    _rk: rk.RKResult | None = field(default=None, repr=False)

    def params_str(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))

    @property
    def reached_end(self) -> bool:
        return self.termination == REACHED_END

    def __len__(self):
        return len(self.x)

    def __call__(self, x: float):
        if self._rk is None:
            raise ValueError("trajectory has no dense output")
        return self._rk.hermite(x)

    def to_csv(self, path=None) -> str:
        from .serialize import trajectory_csv

        return trajectory_csv(self, path)

    def to_jsonable(self) -> dict:
        from .serialize import float_str

        return {
            "variable": self.variable,
            "ode": self.ode_id,
            "params": {k: float_str(v) for k, v in self.params.items()},
            "tol": float_str(self.tol),
            "samples": len(self.x),
            "range": [float_str(self.x[0]), float_str(self.x[-1])],
            "termination": self.termination,
            "termination_location": None
            if self.termination_location is None
            else float_str(self.termination_location),
            "max_residual": float_str(float(np.max(np.abs(self.residual))) if len(self.residual) else 0.0),
        }


def residual_g_float(w, g, gp, gpp, C) -> float:
    return gpp + (gp + 2 * w) ** 2 / (2 * g) + 2 * C / g + 10.0 / 3.0


def _g_rhs(C):
    def f(w, y):
        g, gp = y
        return (gp, -((gp + 2 * w) ** 2) / (2 * g) - 2 * C / g - 10.0 / 3.0)

    return f


def _midpoint_residuals(res: rk.RKResult, point_residual) -> np.ndarray:
    """Equation residual of the Hermite interpolant at each step midpoint,
    assigned to the right endpoint sample; the first sample gets 0."""
    out = np.zeros(len(res.xs))
    for i in range(len(res.xs) - 1):
        xm = 0.5 * (res.xs[i] + res.xs[i + 1])
        ym = res.hermite(xm)
        dm = res.hermite_derivative(xm)
        out[i + 1] = point_residual(xm, ym, dm)
    return out


def integrate_g(u0: float, C: int, w_max: float, tol: float) -> Trajectory:
    """Trajectory of g on [0, w_max]; g -> 0 singularities truncate the
    trajectory with a structured record instead of raising."""
    if u0 == 0:
        raise ValueError("u0 must be nonzero")
    if not (1e-14 <= tol <= 1e-4):
        raise ValueError("tol must lie in [1e-14, 1e-4]")
    rhs = _g_rhs(C)

    def singular(w, y):
        if abs(y[0]) < G_SINGULARITY_FLOOR:
            return f"g reached {y[0]:.3e}"
        return None

    res = rk.integrate(rhs, 0.0, [u0, 0.0], w_max, tol, singular=singular)
    # g'' from the equation at the samples; residual from the interpolant
    gpp = res.fs[:, 1]
    resid = _midpoint_residuals(
        res, lambda w, y, d: residual_g_float(w, y[0], y[1], d[1], C)
    )
    loc = res.termination_location
    if res.termination == STEP_COLLAPSE and abs(res.ys[-1, 0]) < 1e3 * G_SINGULARITY_FLOOR:
        # the step collapse is the integrator hitting the g=0 wall
        term = SINGULARITY
        detail = f"g -> 0 (|g|={abs(res.ys[-1, 0]):.3e}) at step collapse"
    else:
        term = res.termination
        detail = res.termination_detail
    return Trajectory(
        "w",
        "geqn",
        {"u0": u0, "C": C},
        tol,
        res.xs,
        res.ys[:, 0],
        res.ys[:, 1],
        gpp,
        res.steps,
        res.errors,
        resid,
        term,
        loc,
        detail,
        _rk=res,
    )


def parabola_upper(w):
    return -(w * w / 3.0 + 0.75)


def parabola_lower(w):
    return -(1.5 * w * w + 6.0)


@dataclass
class SandwichReport:
    u0: float
    w_max: float
    holds: bool
    min_margin_upper: float
    min_margin_lower: float
    termination: str
    termination_location: float | None = None

    def to_jsonable(self) -> dict:
        from .serialize import float_str

        return {
            "u0": float_str(self.u0),
            "w_max": float_str(self.w_max),
            "holds": self.holds,
            "min_margin_upper": float_str(self.min_margin_upper),
            "min_margin_lower": float_str(self.min_margin_lower),
            "termination": self.termination,
        }


def sandwich_report(u0: float, w_max: float, tol: float = 1e-10) -> SandwichReport:
    """Margins of -(3w^2/2+6) <= g <= -(w^2/3+3/4) along the trajectory.

    u0 outside the open interval (-6, -3/4) is rejected; run integrate_g
    directly for unconstrained experiments."""
    if not (-6.0 < u0 < -0.75):
        raise ValueError("sandwich requires -6 < u0 < -3/4")
    traj = integrate_g(u0, 1, w_max, tol)
    margin_u = parabola_upper(traj.x) - traj.y
    margin_l = traj.y - parabola_lower(traj.x)
    holds = traj.reached_end and bool(np.all(margin_u >= 0) and np.all(margin_l >= 0))
    return SandwichReport(
        u0,
        w_max,
        holds,
        float(np.min(margin_u)),
        float(np.min(margin_l)),
        traj.termination,
        traj.termination_location,
    )


@dataclass
class AsymptoticFit:
    exponent: float
    amplitude: float
    fit_residual: float
    degenerate: bool = False
    non_asymptotic: bool = False
    split_retry: bool = False
    window: tuple = (0.0, 0.0)


def asymptotic_fit(traj: Trajectory, w_lo: float, w_hi: float) -> AsymptoticFit:
    """Least-squares slope of log|g + (3/2)w^2 + 6| against log w; the
    remainder of interior solutions decays like w^(2/3)."""
    if w_lo < 10.0:
        raise ValueError("fit window must start at w >= 10")
    mask = (traj.x >= w_lo) & (traj.x <= w_hi)
    if np.count_nonzero(mask) < 8:
        raise ValueError("fit window contains too few samples")
    w = traj.x[mask]
    rem = traj.y[mask] + 1.5 * w * w + 6.0
    scale = float(np.max(np.abs(traj.y[mask])))
    if float(np.max(np.abs(rem))) < 1e-7 * scale:
        return AsymptoticFit(0.0, 0.0, 0.0, degenerate=True, window=(w_lo, w_hi))
    split = False
    signs = np.sign(rem)
    if signs.max() > 0 and signs.min() < 0:
        # remainder changes sign: retry on the longest single-sign stretch
        split = True
        best = (0, 0)
        start = 0
        for i in range(1, len(rem) + 1):
            if i == len(rem) or signs[i] != signs[start]:
                if i - start > best[1] - best[0]:
                    best = (start, i)
                start = i
        w, rem = w[best[0] : best[1]], rem[best[0] : best[1]]
        if len(w) < 8:
            raise ValueError("no usable single-sign window for the fit")
    lx, ly = np.log(w), np.log(np.abs(rem))
    slope, intercept = np.polyfit(lx, ly, 1)
    fit_res = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    amplitude = float(np.sign(rem[0]) * math.exp(intercept))
    return AsymptoticFit(
        float(slope),
        amplitude,
        fit_res,
        non_asymptotic=bool(slope > 1.5),
        split_retry=split,
        window=(float(w[0]), float(w[-1])),
    )


# -- P(J) -> J(z) reparametrization --------------------------------------


def reparametrize_P_to_J(P, J_lo: float, J_hi: float, C0: float = 0.0, n: int = 400, tol: float = 1e-12) -> Trajectory:
    """J(z) from z + C0 = integral of dJ/P(J), anchored so that z(J_lo)
    = -C0. P may be a callable P(J) or a Trajectory sampled in J.

    Quadrature route only; comparing against a direct integration of the
    third-order J equation is the caller's cross-check.
    """
    if isinstance(P, Trajectory):
        traj = P
        interp = PchipInterpolator(traj.x, traj.y)
        J_lo = max(J_lo, float(traj.x[0]))
        J_hi = min(J_hi, float(traj.x[-1]))
        Pfun = lambda J: float(interp(J))
    else:
        Pfun = P
    if J_hi <= J_lo:
        raise ValueError("empty J window")
    Js = np.linspace(J_lo, J_hi, n)
    Pv = np.array([Pfun(J) for J in Js])
    if np.any(Pv <= 0):
        bad = Js[Pv <= 0][0]
        raise PhysicalityError(f"P(J) <= 0 at J={bad}; J(z) must be increasing")
    zs = np.empty(n)
    zs[0] = -C0
    for i in range(1, n):
        piece, _ = quad(lambda J: 1.0 / Pfun(J), Js[i - 1], Js[i], epsabs=1e-12, limit=200)
        zs[i] = zs[i - 1] + piece
    resid = np.zeros(n)
    # residual: dJ/dz from a monotone interpolant vs P(J)
    JofZ = PchipInterpolator(zs, Js)
    dJ = JofZ.derivative()
    mid = 0.5 * (zs[1:] + zs[:-1])
    resid[1:] = np.abs(dJ(mid) - np.array([Pfun(float(JofZ(m))) for m in mid]))
    return Trajectory(
        "z",
        "PJz",
        {"C0": C0},
        tol,
        zs,
        Js,
        Pv,
        None,
        np.diff(zs),
        np.zeros(n - 1),
        resid,
        REACHED_END,
    )


# -- Abel transform ------------------------------------------------------


def abel_rhs(t: float, f: float) -> float:
    """Right-hand side of f' = (4/t)(t+3/2)(t+1/3) f^3 + (5/t)(t+2/5) f^2
    + f/(2t)."""
    return (
        (4.0 / t) * (t + 1.5) * (t + 1.0 / 3.0) * f**3
        + (5.0 / t) * (t + 0.4) * f**2
        + f / (2.0 * t)
    )


def abel_special_solution(t: float) -> float:
    return -3.0 / (4.0 * t + 6.0)


@dataclass
class AbelReport:
    t: np.ndarray
    f: np.ndarray
    max_residual: float
    max_fd_deviation: float
    singular_location: float | None = None

    def to_jsonable(self) -> dict:
        from .serialize import float_str

        return {
            "samples": len(self.t),
            "t_range": [float_str(self.t[0]), float_str(self.t[-1])],
            "max_residual": float_str(self.max_residual),
            "max_fd_deviation": float_str(self.max_fd_deviation),
            "singular_location": None
            if self.singular_location is None
            else float_str(self.singular_location),
        }


def abel_transform(samples, lam: float) -> AbelReport:
    """Map P(J) samples (J, P, P') on the C1 = 0 branch to the Abel
    variables and report the pointwise equation residual.

    f' is computed by the chain rule (using the second-order equation for
    P'') and cross-checked against finite differences of the mapped
    samples. JP' - 2P = 0 is a transform singularity; quadratic P drive t
    to a constant and are excluded by it."""
    if lam == 0:
        raise ValueError("Lambda must be nonzero")
    Js = np.asarray([s[0] for s in samples], dtype=float)
    Ps = np.asarray([s[1] for s in samples], dtype=float)
    Pps = np.asarray([s[2] for s in samples], dtype=float)
    D = Js * Pps - 2.0 * Ps
    small = np.abs(D) < 1e-12 * np.maximum(1.0, np.abs(Js * Pps))
    if np.any(small):
        return AbelReport(np.array([]), np.array([]), math.inf, math.inf, float(Js[small][0]))
    t = Ps / (lam * Js**2)
    f = lam * Js**2 / D
    # chain rule: df/dt = (df/dJ)/(dt/dJ) with P'' from the equation
    Ppp = -((Pps + 2 * lam * Js) ** 2) / (2 * Ps) - (10.0 / 3.0) * lam
    Dp = Js * Ppp - Pps
    df_dJ = lam * (2 * Js * D - Js**2 * Dp) / D**2
    dt_dJ = D / (lam * Js**3)
    fp = df_dJ / dt_dJ
    resid = np.abs(fp - np.array([abel_rhs(tv, fv) for tv, fv in zip(t, f)]))
    fd = np.abs((f[2:] - f[:-2]) / (t[2:] - t[:-2]) - fp[1:-1])
    order = np.argsort(t)
    return AbelReport(t[order], f[order], float(np.max(resid)), float(np.max(fd)) if len(fd) else 0.0)


# -- conformally flat families -------------------------------------------


@dataclass
class FlatFamilyParams:
    """Either an implicit case 1|2|3 or a closed-form tag.

    case 1: Lam < 0, C2 > 0; case 2: Lam < 0, C2 < 0; case 3: Lam > 0,
    C2 > 0. Tags: "JFlatS", "JFlatSS", "JTN", "JTNS"."""

    case: object  # 1 | 2 | 3 | str
    lam: float
    C0: float = 0.0
    C1: float = 0.0
    C2: float = 0.0

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("Lambda must be nonzero")
        if self.case == 1 and not (self.lam < 0 and self.C2 > 0):
            raise ValueError("case 1 requires Lambda < 0 and C2 > 0")
        if self.case == 2 and not (self.lam < 0 and self.C2 < 0):
            raise ValueError("case 2 requires Lambda < 0 and C2 < 0")
        if self.case == 3 and not (self.lam > 0 and self.C2 > 0):
            raise ValueError("case 3 requires Lambda > 0 and C2 > 0")
        if isinstance(self.case, str) and self.case not in ("JFlatS", "JFlatSS", "JTN", "JTNS"):
            raise ValueError(f"unknown closed-form tag {self.case!r}")

    @property
    def M(self) -> float:
        cbrt = math.copysign(abs(self.lam) ** (1 / 3), self.lam)
        if self.case == 1:
            return (-2.0 * self.C2 * cbrt / 3.0) ** 0.25
        return (2.0 * self.C2 * cbrt / 3.0) ** 0.25


class FlatDomainError(ValueError):
    pass


def _case1_lhs(G: float, M: float) -> float:
    # branch-corrected arctan keeps the left side continuous through |G| = M
    num = G * G + math.sqrt(2) * G * M + M * M
    den = G * G - math.sqrt(2) * G * M + M * M
    at = math.atan2(math.sqrt(2) * G * M, M * M - G * G)
    return math.log(num / den) + 2 * at


def _case23_lhs(G: float, M: float) -> float:
    return math.log(abs((M + G) / (M - G))) + 2 * math.atan(G / M)


def flat_family(params: FlatFamilyParams, z: float) -> tuple[float, float]:
    """(J, J') at z. Implicit cases are solved by bracketed root-finding
    in G = (Lam J)^(1/3) (monotone since J' = P > 0); closed-form tags are
    evaluated directly."""
    lam, C0, C1 = params.lam, params.C0, params.C1
    u = z + C0
    if params.case == "JTNS":
        if u == 0:
            raise FlatDomainError("singular at z + C0 = 0")
        J = 3.0 / (lam * u)
        return J, -3.0 / (lam * u * u)
    if params.case == "JFlatSS":
        if u == 0:
            raise FlatDomainError("singular at z + C0 = 0")
        J = 2.0 / (3.0 * lam * u)
        return J, -2.0 / (3.0 * lam * u * u)
    if params.case == "JTN":
        s = math.sin(C1 * u / 2.0)
        if s == 0:
            raise FlatDomainError("singular where sin(C1 (z+C0)/2) = 0")
        J = 3.0 * C1 / (2.0 * lam * math.tan(C1 * u / 2.0))
        return J, -3.0 * C1 * C1 / (4.0 * lam * s * s)
    if params.case == "JFlatS":
        s = math.sin(3.0 * C1 * u)
        if s == 0:
            raise FlatDomainError("singular where sin(3 C1 (z+C0)) = 0")
        J = 2.0 * C1 / (lam * math.tan(3.0 * C1 * u))
        return J, -6.0 * C1 * C1 / (lam * s * s)

    M = params.M
    Ma = abs(M)
    if params.case == 1:
        bound = math.pi / (math.sqrt(2) * Ma**3)
        if not (-bound < u < bound):
            raise FlatDomainError(
                f"z + C0 = {u} outside the case-1 window (-{bound}, {bound}); "
                "the solution diverges at z + C0 = +/- pi/(sqrt(2)|M|^3)"
            )
        rhs = -2.0 * math.sqrt(2) * M**3 * u
        lhs = lambda g: _case1_lhs(g, Ma)
        # lhs is increasing in G and sweeps (-2 pi, 2 pi)
        lo, hi = -Ma, Ma
        while (lhs(lo) - rhs) * (lhs(hi) - rhs) > 0:
            lo *= 2.0
            hi *= 2.0
            if hi > 1e12:
                raise FlatDomainError("bracket expansion failed near the case-1 boundary")
    elif params.case == 3:
        rhs = 2.0 * M**3 * u
        lhs = lambda g: _case23_lhs(g, Ma)
        if abs(rhs) > 30.0:
            # G is within a few ulp of +/-M: invert the log term analytically,
            # lhs ~ ln(2M/|M -+ G|) + pi/2 near the boundary
            delta = 2.0 * Ma * math.exp(math.pi / 2 - abs(rhs))
            G = math.copysign(Ma - delta, rhs)
            return _flat_point(G, params)
        # |G| < M: the log term sweeps the whole real line
        eps = Ma * 1e-14
        lo, hi = -Ma + eps, Ma - eps
        while (lhs(lo) - rhs) * (lhs(hi) - rhs) > 0:
            eps *= 0.5
            lo, hi = -Ma + eps, Ma - eps
            if eps < 1e-17 * Ma:
                raise FlatDomainError("bracket expansion failed in case 3")
    elif params.case == 2:
        rhs = 2.0 * M**3 * u
        boundary = math.pi / (2.0 * Ma**3)
        if abs(u) <= boundary:
            raise FlatDomainError(
                f"z + C0 = {u} inside the excluded band [-{boundary}, {boundary}]; "
                "the solution diverges at z + C0 = +/- pi/(2|M|^3)"
            )
        lhs = lambda g: _case23_lhs(g, Ma)
        if abs(rhs) > 30.0:
            # |G| -> M from outside; same asymptotic inversion as case 3
            delta = 2.0 * Ma * math.exp(math.pi / 2 - abs(rhs))
            G = math.copysign(Ma + delta, rhs)
            return _flat_point(G, params)
        if rhs > 0:
            # branch G > M: lhs decreases from +inf to pi
            lo, hi = Ma * (1 + 1e-13), 2 * Ma
            while lhs(hi) > rhs:
                hi *= 2.0
        else:
            # mirror branch G < -M
            lo, hi = -2 * Ma, -Ma * (1 + 1e-13)
            while lhs(lo) < rhs:
                lo *= 2.0
    else:
        raise ValueError(f"unknown case {params.case!r}")
    G = brentq(lambda g: lhs(g) - rhs, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return _flat_point(G, params)


def _flat_point(G: float, params: FlatFamilyParams) -> tuple[float, float]:
    J = G**3 / params.lam
    # J' = P(J) with the real cube root: J^(2/3) = G^2 / |Lam|^(2/3)
    Jp = -1.5 * params.lam * J * J + params.C2 * G * G / abs(params.lam) ** (2 / 3)
    return J, Jp


def K_of_solution(J: float, Jp: float, Jpp: float, lam: float, C1: float) -> complex:
    """K = Lam J J'' - (2/3) Lam J'^2 + 2 (Lam^2 J^2 - 2 C1^2) J'
    - 2i C1 (J'' + 3 Lam J J')."""
    re = lam * J * Jpp - (2.0 / 3.0) * lam * Jp * Jp + 2.0 * (lam * lam * J * J - 2.0 * C1 * C1) * Jp
    im = -2.0 * C1 * (Jpp + 3.0 * lam * J * Jp)
    return complex(re, im)
