"""The acceptance suite: one callable per shipped claim.

Each criterion raises AssertionError with a diagnostic on failure and
returns a short detail string on success. `run_acceptance` executes the
registry, timing each criterion, and produces a machine-readable report.
The same callables back tests/test_acceptance.py so the CLI `verify`
subcommand and pytest agree by construction.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import numeric_ode
from .algebraic import QuadSurd
from .cr_invariants import (
    SolutionSpec,
    alpha_sq_flat_formula,
    cartan_invariants,
    flat_tag_solution,
    invariant_profile,
    leroy_nurowski_solution,
    pde_residuals,
    series_solution,
)
from .exact_series import (
    K_at_origin,
    check_common_factor,
    g_coefficients_symbolic,
    j_taylor,
    residual_g,
    verify_theorem4,
)
from .metric import reconstruct_metric
from .numeric_ode import (
    FlatFamilyParams,
    abel_rhs,
    abel_special_solution,
    asymptotic_fit,
    flat_family,
    integrate_g,
    reparametrize_P_to_J,
)
from .odeform import ABEL_TEXT, JEQ_TEXT, PEQ_TEXT, parse_ode
from .painleve import weak_painleve_verdict
from .polyq import PolyQ
from .puiseux import chart_to_puiseux, puiseux_coefficients, puiseux_expand, regular_chart

F = Fraction

FLAT_BETA = 41.0 / (2.0 * math.sqrt(10.0))
FLAT_GAMMA = 29.0 / (2.0 * math.sqrt(10.0))
FLAT_THETA = 3j * math.sqrt(2.0 / 5.0)
FLAT_ALPHA_SQ = -16.0 * math.sqrt(2.0 / 5.0)
LN_BETA = -0.5 * math.sqrt(3.0 / 5.0)
LN_GAMMA = 0.5 * math.sqrt(3.0 / 5.0)
LN_THETA = 1j * math.sqrt(3.0 / 5.0)
LN_ALPHA_SQ = 0.5 * math.sqrt(3.0 / 5.0)


def _crit_1_series_identity() -> str:
    """u2, u4, u6 of the regular w-series as exact rational functions of u0."""
    polys = g_coefficients_symbolic(3)
    # expected: u2 = -5(u0+3/5)/(3 u0), u4 = -2(u0+3/4)(u0+6)/(27 u0^3),
    # u6 = -76(u0+3/4)(u0+6)(u0+33/38)/(1215 u0^5)
    lin = lambda r: PolyQ([r, F(1)])  # u0 + r
    expected = [
        (PolyQ([F(1)]), 0),
        (lin(F(3, 5)) * F(-5, 3), 1),
        (lin(F(3, 4)) * lin(F(6)) * F(-2, 27), 3),
        (lin(F(3, 4)) * lin(F(6)) * lin(F(33, 38)) * F(-76, 1215), 5),
    ]
    samples = [F(1), F(-2), F(3, 7), F(-11, 5), F(5), F(-301, 400), F(9, 2)]
    for k in (1, 2, 3):
        num, dp = expected[k]
        for u0 in samples:
            want = num(u0) / u0**dp
            got = polys[k](u0)
            assert got == want, f"u_{2*k}({u0}) = {got}, expected {want}"
    return "u2, u4, u6 reproduce the printed rational functions of u0 exactly"


def _crit_2_factor_theorem() -> str:
    """(u0+3/4)(u0+6) divides P_k exactly for 2 <= k <= 30."""
    report = check_common_factor(30)
    bad = [k for k, ok in report.divides.items() if not ok]
    assert not bad, f"common factor fails at k = {bad}"
    assert set(report.divides) >= set(range(2, 31))
    return "common factor divides P_k for all 2 <= k <= 30"


def _crit_3_closed_solutions() -> str:
    """The two terminating parabolas solve the w-equation exactly."""
    ws = [F(n, 7) for n in range(1, 21)]
    for a, b in ((F(1, 3), F(3, 4)), (F(3, 2), F(6))):
        for w in ws:
            g = -(a * w * w + b)
            res = residual_g(g, -2 * a * w, -2 * a, w, C=1)
            assert res == 0, f"residual {res} != 0 at w={w} for g=-({a}w^2+{b})"
    return "exact zero residual at 20 rational points for both closed solutions"


def _crit_4_theorem4_bound() -> str:
    """Coefficient bound |u_2j| <= C M^2j/(2j)^2 at u0=-2, C=1/10, M=5/3."""
    rep = verify_theorem4(F(-2), F(1, 10), F(5, 3), 50)
    assert rep.ineq1_holds, "inequality (ineq1) fails"
    assert rep.ineq2_holds, "inequality (ineq2) fails"
    assert rep.bound_holds, f"bound first violated at j = {rep.first_violation}"
    return "both hypothesis inequalities and the bound hold through j = 50"


def _crit_5_j_series() -> str:
    """Low-order z-series coefficients and K(0) of the regular solution."""
    for u0, lam in ((F(3), F(-1)), (F(2, 3), F(5, 7)), (F(5, 2), F(1))):
        series = j_taylor(u0, lam, 6)
        assert series.coeffs[1] == u0
        assert series.coeffs[2] == 0
        assert series.coeffs[3] == -F(5, 9) * lam * u0**2, f"z^3 coefficient wrong at {u0=}, {lam=}"
        assert series.coeffs[4] == 0
        assert series.coeffs[5] == F(16, 45) * lam**2 * u0**3, f"z^5 coefficient wrong at {u0=}, {lam=}"
        assert K_at_origin(series) == -F(2, 3) * lam * u0**2
    return "z^3, z^5 coefficients and K(0) exact for three (u0, Lambda) pairs"


def _crit_6_painleve() -> str:
    """Weak Painleve verdicts with exact index sets."""
    v_peq = weak_painleve_verdict(parse_ode(PEQ_TEXT))
    assert v_peq.passed, f"PEQ should pass: {v_peq.reasons}"
    assert len(v_peq.resonances) == 1
    rs = v_peq.resonances[0]
    assert rs.balance.m == F(2, 3), f"PEQ balance m = {rs.balance.m}"
    assert rs.balance.u0_is_free, "PEQ leading coefficient should be free"
    assert sorted(rs.indices) == [F(-1), F(0)], f"PEQ indices {rs.indices}"

    v_jeq = weak_painleve_verdict(parse_ode(JEQ_TEXT))
    assert not v_jeq.passed, "JEQ should fail"
    surd_lo = QuadSurd(F(-1, 2), F(-1, 2), 57)
    surd_hi = QuadSurd(F(-1, 2), F(1, 2), 57)
    sets = [sorted(rs.indices, key=lambda j: float(j)) for rs in v_jeq.resonances]
    want_rational = [F(-1), F(4, 3), F(7, 3)]
    want_surd = [surd_lo, F(-1), surd_hi]
    assert sorted(sets, key=lambda s: float(s[-1])) == sorted(
        [want_rational, want_surd], key=lambda s: float(s[-1])
    ), f"JEQ index sets {sets}"

    v_abel = weak_painleve_verdict(parse_ode(ABEL_TEXT))
    assert v_abel.passed and v_abel.first_order_automatic, f"Abel verdict {v_abel.reasons}"
    return "PEQ pass (m=2/3, {-1,0}); JEQ fail ({-1,4/3,7/3} and {-1,(-1±sqrt(57))/2}); Abel pass"


def _crit_7_puiseux() -> str:
    """Printed Puiseux coefficients symbolically; chart roundtrip."""
    import sympy as sp

    u0, J0, L, C1 = sp.symbols("u0 J0 Lambda C_1")
    coeffs = puiseux_coefficients(u0, J0, L, C1, 5, simplify=sp.cancel)
    q = L**2 * J0**2 + 4 * C1**2
    expected = [
        u0,
        -3 * L * J0,
        -sp.Rational(9, 20) * q / u0,
        -sp.Rational(3, 5) * L * J0 * q / u0**2,
        -(sp.Rational(3, 2) * L + sp.Rational(27, 2800) * (109 * L**2 * J0**2 + 36 * C1**2) * q / u0**3),
    ]
    for k, (got, want) in enumerate(zip(coeffs, expected)):
        assert sp.simplify(got - want) == 0, f"Puiseux coefficient k={k}: {sp.simplify(got - want)}"

    J0v, Z0v, lamv, C1v = 0.4, 1.3, -1.0, 0.5
    chart = regular_chart(J0v, Z0v, lamv, C1v, 14)
    via_chart = chart_to_puiseux(chart)
    u0v = (1.5 * Z0v) ** (2.0 / 3.0)
    direct = puiseux_expand(u0v, J0v, lamv, C1v, 14)
    n = min(len(via_chart.coeffs), len(direct.coeffs))
    for k in range(n):
        a, b = via_chart.coeffs[k], direct.coeffs[k]
        rel = abs(a - b) / max(1.0, abs(b))
        assert rel < 1e-10, f"chart roundtrip coefficient k={k}: |{a} - {b}| rel {rel:.2e}"
    return f"five symbolic coefficients match; chart roundtrip agrees on {n} orders"


def _crit_8_cartan_ln() -> str:
    """The Leroy-Nurowski invariant constants, for C1 in {0, 1}."""
    for C1 in (0.0, 1.0):
        spec = leroy_nurowski_solution(-1.0, 0.0, C1)
        prof = invariant_profile(spec, 0.5, 2.4, samples=20, order=10)
        assert not prof.r_vanishing, f"hyperquadric points at C1={C1}"
        assert len(prof.sets) == 20
        for iv in prof.sets:
            assert abs(iv.beta - LN_BETA) < 1e-8, f"beta {iv.beta} at z={iv.z}, C1={C1}"
            assert abs(iv.gamma - LN_GAMMA) < 1e-8
            assert abs(iv.theta - LN_THETA) < 1e-8
            assert abs(iv.alpha_sq - LN_ALPHA_SQ) < 1e-8
        for name, dev in prof.max_deviation.items():
            assert dev < 1e-8, f"{name} deviates by {dev} at C1={C1}"
    return "all four constants to 1e-8 over 20 z-samples, C1 = 0 and 1"


def _crit_9_cartan_flat() -> str:
    """Flat-family constants, and the J-dependent alpha^2 formula on case 3."""
    for spec in (
        flat_tag_solution("JFlatS", -1.0, C0=0.2, C1=0.7),
        flat_tag_solution("JFlatSS", -1.0, C0=0.0),
    ):
        for z in np.linspace(0.25, 0.8, 6):
            iv = cartan_invariants(spec.cjet(float(z), 10))
            assert abs(iv.beta - FLAT_BETA) < 1e-8, f"{spec.name} beta {iv.beta} at z={z}"
            assert abs(iv.gamma - FLAT_GAMMA) < 1e-8
            assert abs(iv.theta - FLAT_THETA) < 1e-8
            assert abs(iv.alpha_sq - FLAT_ALPHA_SQ) < 1e-8

    lam, C2 = 1.0, 1.0
    params = FlatFamilyParams(3, lam, C0=0.0, C2=C2)

    def data(z):
        J, Jp = flat_family(params, z)
        Pp = -3.0 * lam * J + (2.0 / 3.0) * C2 / math.copysign(abs(J) ** (1 / 3), J)
        return (J, Jp, Pp * Jp)

    case3 = SolutionSpec("flat-case3", lam, 0.0, data)
    for z in np.linspace(0.2, 2.0, 10):
        iv = cartan_invariants(case3.cjet(float(z), 10))
        want = alpha_sq_flat_formula(data(float(z))[0], lam, C2)
        assert abs(iv.alpha_sq - want) < 1e-8, f"alpha^2 {iv.alpha_sq} vs formula {want} at z={z}"
    return "table constants on both closed forms; alpha^2 formula on 10 case-3 points"


def _crit_10_novelty_witness() -> str:
    """alpha(0) = 0 on the regular solution; the interior u0=-2 profile is
    far from both constant tables."""
    iv0 = cartan_invariants(series_solution(2.0, -1.0).cjet(0.0, 10))
    assert abs(iv0.alpha) < 1e-8, f"alpha(0) = {iv0.alpha}"

    interior = series_solution(-2.0, 1.0, C1=1.0)
    betas = [cartan_invariants(interior.cjet(float(z), 10)).beta.real for z in np.linspace(-0.5, 0.5, 11)]
    spread = max(betas) - min(betas)
    assert spread > 1e-3, f"beta profile spread {spread}"
    d_ln = min(abs(b - LN_BETA) for b in betas)
    d_flat = min(abs(b - FLAT_BETA) for b in betas)
    assert d_ln > 1e-3 and d_flat > 1e-3, f"profile too close to a table: {d_ln}, {d_flat}"
    return f"alpha(0)=0; beta spread {spread:.3f}, distance to tables > 1e-3"


def _crit_11_sandwich_asymptotics() -> str:
    """Interior solutions to w=50: no singularity, sandwiched, 2/3 tail on
    the [20, 50] window.

    Known limitation: the log-log slope on [20, 50] is pre-asymptotic for
    u0 = -301/400 (0.758) and u0 = -5 (0.604); all three converge to 2/3
    on [100, 200]. The stated window-and-tolerance pair holds only for
    u0 = -2, so this criterion fails honestly for the other two."""
    slopes = {}
    for u0 in (-2.0, -301.0 / 400.0, -5.0):
        rep = numeric_ode.sandwich_report(u0, 50.0, tol=1e-10)
        assert rep.termination == "reached-end", f"u0={u0} terminated: {rep.termination}"
        assert rep.holds, f"u0={u0} escapes the parabolas"
        traj = integrate_g(u0, 1, 50.0, 1e-10)
        slopes[u0] = asymptotic_fit(traj, 20.0, 50.0).exponent
    off = {u0: s for u0, s in slopes.items() if abs(s - 2.0 / 3.0) >= 0.05}
    assert not off, (
        f"fitted exponent outside 2/3 +/- 0.05 on [20, 50] for {off} "
        f"(all slopes: { {k: round(v, 4) for k, v in slopes.items()} }; "
        "the [20, 50] window is pre-asymptotic near the interval ends -- "
        "slopes converge to 2/3 on [100, 200])"
    )
    return "; ".join(f"u0={u0}: exponent {s:.4f}" for u0, s in slopes.items())


def _crit_12_transforms() -> str:
    """Quadrature reparametrization vs the closed form; Abel special solution."""
    lam, C1 = -1.0, 1.0

    def P(J):
        return -lam * J * J / 3.0 - 3.0 * C1 * C1 / (4.0 * lam)

    def J_closed(z):
        return 3.0 * C1 / (2.0 * lam * math.tan(C1 * z / 2.0))

    z_lo = 2.0 * math.atan(0.5)  # closed-form z at J = -3
    traj = reparametrize_P_to_J(P, -3.0, 3.0, C0=-z_lo)
    worst = max(abs(traj.y[i] - J_closed(traj.x[i])) for i in range(len(traj.x)))
    assert worst < 1e-8, f"reparametrized J deviates by {worst}"

    res = 0.0
    for t in np.linspace(0.1, 5.0, 200):
        f = abel_special_solution(t)
        fp = 12.0 / (4.0 * t + 6.0) ** 2
        res = max(res, abs(fp - abel_rhs(t, f)))
    assert res < 1e-10, f"Abel special-solution residual {res}"
    return f"J(z) matches closed form to {worst:.1e}; Abel residual {res:.1e}"


def _crit_13_einstein_residuals() -> str:
    """End-to-end PDE residuals, plus a deliberate-fault detector check."""
    specs = [
        leroy_nurowski_solution(-1.0, 0.0, 1.0),
        series_solution(1.0, -1.0),
        series_solution(2.0, -1.0),
    ]
    zs = [1.2, 0.1, 0.5]
    for spec, z in zip(specs, zs):
        res = pde_residuals(spec, z)
        for name in ("res_reality", "res_einstein", "res_psi3"):
            v = getattr(res, name)
            assert v <= 1e-8, f"{spec.name}: {name} = {v} at z={z}"

    # fault injection after the jet is built: offsetting the J'' entry of a
    # completed jet leaves the higher coefficients inconsistent, a genuine
    # non-solution (re-propagating a perturbed initial triple would just
    # land on a neighbouring exact solution and show nothing)
    from .cr_invariants import c_jet, pde_residuals_from_cjet

    good = leroy_nurowski_solution(-1.0, 0.0, 1.0)
    jet = good.jet(1.2, 10)
    jet.c[2] += 0.5e-3  # J''/2 entry
    res = pde_residuals_from_cjet(c_jet(jet, good.lam, good.C1, z0=1.2))
    assert res.res_einstein > 1e-4, f"fault detector too weak: {res.res_einstein}"
    return "residuals <= 1e-8 on three solutions; 1e-3 fault raises res_einstein above 1e-4"


def _crit_14_metric_export() -> str:
    """Nurowski point value of |Psi4|; identically zero Psi4 on flat grids."""
    nurowski = leroy_nurowski_solution(-1.0, 0.0, 0.0)  # Lambda = -s^2, s = 1
    sample = reconstruct_metric(nurowski, [(0.0, 1.0, 0.0, 0.0)])[0]
    dev = abs(abs(sample.psi4_factor) - 14.0 / 3.0)
    assert dev < 1e-8, f"|Psi4| = {abs(sample.psi4_factor)} at the Nurowski point"

    flat = flat_tag_solution("JFlatSS", -1.0, C0=0.0)
    grid = [(x, z, u, r) for x in (0.0, 0.4) for z in (0.5, 1.0, 1.5) for u in (0.0,) for r in (0.0, 1.2)]
    worst = max(abs(s.psi4_factor) for s in reconstruct_metric(flat, grid))
    assert worst < 1e-8, f"flat grid Psi4 reaches {worst}"
    return f"|Psi4| at the Nurowski point off by {dev:.1e}; flat grid max |Psi4| {worst:.1e}"


CRITERIA = [
    (1, "series identity u2, u4, u6", _crit_1_series_identity, 1.0),
    (2, "factor theorem through k=30", _crit_2_factor_theorem, 10.0),
    (3, "closed solutions solve exactly", _crit_3_closed_solutions, None),
    (4, "coefficient bound at u0=-2", _crit_4_theorem4_bound, None),
    (5, "J-series coefficients and K(0)", _crit_5_j_series, None),
    (6, "weak Painleve verdicts", _crit_6_painleve, 1.0),
    (7, "Puiseux coefficients and chart roundtrip", _crit_7_puiseux, None),
    (8, "Cartan constants: Leroy-Nurowski", _crit_8_cartan_ln, None),
    (9, "Cartan constants: conformally flat", _crit_9_cartan_flat, None),
    (10, "novelty witness", _crit_10_novelty_witness, None),
    (11, "sandwich and asymptotics", _crit_11_sandwich_asymptotics, 30.0),
    (12, "transform consistency", _crit_12_transforms, None),
    (13, "Einstein-system residuals", _crit_13_einstein_residuals, None),
    (14, "metric export point checks", _crit_14_metric_export, None),
]


def run_acceptance(ids=None) -> dict:
    """Execute the acceptance registry; report per-criterion status, detail
    and wall time. Time limits are recorded but only enforced by the test
    suite (a loaded machine should not flip a correctness verdict)."""
    rows = []
    for cid, title, fn, limit in CRITERIA:
        if ids is not None and cid not in ids:
            continue
        t0 = time.perf_counter()
        try:
            detail = fn()
            status = "pass"
        except AssertionError as exc:
            detail, status = str(exc), "fail"
        except Exception as exc:  # noqa: BLE001 - report, do not crash the runner
            detail, status = f"{type(exc).__name__}: {exc}", "error"
        dt = time.perf_counter() - t0
        rows.append(
            {
                "id": cid,
                "title": title,
                "status": status,
                "seconds": round(dt, 3),
                "time_limit": limit,
                "detail": detail,
            }
        )
    passed = sum(1 for r in rows if r["status"] == "pass")
    return {
        "criteria": rows,
        "total": len(rows),
        "passed": passed,
        "failed": len(rows) - passed,
        "ok": passed == len(rows),
    }
