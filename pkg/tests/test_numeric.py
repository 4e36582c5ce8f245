"""Adaptive integration, reparametrization, Abel transform, flat families."""

import math

import numpy as np
import pytest

from typen_forge import rk
from typen_forge.numeric_ode import (
    FlatDomainError,
    FlatFamilyParams,
    K_of_solution,
    PhysicalityError,
    abel_rhs,
    abel_special_solution,
    abel_transform,
    asymptotic_fit,
    flat_family,
    integrate_g,
    parabola_lower,
    parabola_upper,
    reparametrize_P_to_J,
    sandwich_report,
)


class TestRK:
    def test_exponential(self):
        res = rk.integrate(lambda x, y: y, 0.0, [1.0], 2.0, 1e-10)
        assert res.termination == rk.REACHED_END
        assert abs(res.ys[-1, 0] - math.exp(2.0)) < 1e-8

    def test_oscillator_energy(self):
        res = rk.integrate(lambda x, y: (y[1], -y[0]), 0.0, [1.0, 0.0], 20.0, 1e-11)
        E = res.ys[:, 0] ** 2 + res.ys[:, 1] ** 2
        assert np.max(np.abs(E - 1.0)) < 1e-7

    def test_dense_output(self):
        res = rk.integrate(lambda x, y: y, 0.0, [1.0], 1.0, 1e-10)
        for x in (0.25, 0.6, 0.9):
            assert abs(res.hermite(x)[0] - math.exp(x)) < 1e-6

    def test_singularity_predicate(self):
        # y' = y^2 blows up at x = 1
        res = rk.integrate(
            lambda x, y: y * y,
            0.0,
            [1.0],
            2.0,
            1e-10,
            singular=lambda x, y: "blow-up" if y[0] > 1e6 else None,
        )
        assert res.termination == rk.SINGULARITY
        assert abs(res.termination_location - 1.0) < 1e-3

    def test_backward_integration(self):
        res = rk.integrate(lambda x, y: y, 1.0, [math.e], 0.0, 1e-10)
        assert abs(res.ys[-1, 0] - 1.0) < 1e-8

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            rk.integrate(lambda x, y: y, 0.0, [1.0], 0.0, 1e-8)


class TestIntegrateG:
    def test_matches_terminating_quadratic(self):
        # u0 = -6: g = -(3/2) w^2 - 6 exactly
        traj = integrate_g(-6.0, 1, 10.0, 1e-10)
        assert traj.reached_end
        dev = np.max(np.abs(traj.y - parabola_lower(traj.x)))
        assert dev < 1e-8

    def test_residual_tracks_tolerance(self):
        traj = integrate_g(-2.0, 1, 20.0, 1e-10)
        assert traj.reached_end
        assert np.max(np.abs(traj.residual)) < 1e-5

    def test_singularity_is_structured(self):
        # positive u0 runs into g = 0 in finite w
        traj = integrate_g(2.0, 1, 50.0, 1e-10)
        assert traj.termination in (rk.SINGULARITY, rk.STEP_COLLAPSE)
        assert traj.termination_location is not None

    def test_tolerance_window_enforced(self):
        with pytest.raises(ValueError):
            integrate_g(-2.0, 1, 10.0, 1e-2)

    def test_csv_header(self):
        text = integrate_g(-2.0, 1, 1.0, 1e-8).to_csv()
        head = text.splitlines()[0]
        assert head.startswith("# ode=geqn")
        assert "tol=" in head and "params=" in head
        assert text.splitlines()[1] == "x,y,yp,residual"


class TestSandwich:
    def test_interior_solution_is_sandwiched(self):
        rep = sandwich_report(-2.0, 30.0, 1e-10)
        assert rep.holds
        assert rep.min_margin_upper >= 0 and rep.min_margin_lower >= 0

    def test_bounds_order(self):
        for w in np.linspace(0, 10, 11):
            assert parabola_lower(w) <= parabola_upper(w)

    def test_rejects_exterior_u0(self):
        with pytest.raises(ValueError):
            sandwich_report(-0.5, 10.0)


class TestAsymptoticFit:
    def test_window_guard(self):
        traj = integrate_g(-2.0, 1, 30.0, 1e-10)
        with pytest.raises(ValueError):
            asymptotic_fit(traj, 5.0, 20.0)

    def test_interior_exponent_near_two_thirds(self):
        traj = integrate_g(-2.0, 1, 50.0, 1e-10)
        fit = asymptotic_fit(traj, 20.0, 50.0)
        assert not fit.degenerate and not fit.non_asymptotic
        assert abs(fit.exponent - 2.0 / 3.0) < 0.05

    def test_terminating_solution_is_degenerate(self):
        traj = integrate_g(-6.0, 1, 30.0, 1e-10)
        fit = asymptotic_fit(traj, 12.0, 30.0)
        assert fit.degenerate


class TestReparametrization:
    def test_exponential_oracle(self):
        # P(J) = J gives z = log J, i.e. J(z) = e^z
        traj = reparametrize_P_to_J(lambda J: J, 1.0, math.e**2, C0=0.0)
        assert np.max(np.abs(traj.y - np.exp(traj.x))) < 1e-9

    def test_anchor_convention(self):
        traj = reparametrize_P_to_J(lambda J: J, 2.0, 4.0, C0=-1.5)
        assert abs(traj.x[0] - 1.5) < 1e-14
        assert abs(traj.y[0] - 2.0) < 1e-14

    def test_residual_reported(self):
        traj = reparametrize_P_to_J(lambda J: 1.0 + J * J, 0.0, 1.0)
        assert np.max(traj.residual) < 1e-6

    def test_nonpositive_P_rejected(self):
        with pytest.raises(PhysicalityError):
            reparametrize_P_to_J(lambda J: J - 2.0, 1.0, 3.0)


class TestAbel:
    def test_special_solution_satisfies_equation(self):
        for t in np.linspace(0.2, 5.0, 12):
            f = abel_special_solution(t)
            fp = 12.0 / (4.0 * t + 6.0) ** 2
            assert abs(fp - abel_rhs(t, f)) < 1e-12

    def test_transform_dual_route(self):
        # samples from the closed non-quadratic solution P of the C1 = 0 branch
        lam = -1.0
        u0 = 1.3
        Js = np.linspace(1.0, 2.0, 400)
        P = u0 * Js ** (2.0 / 3.0) - 1.5 * lam * Js**2
        Pp = (2.0 / 3.0) * u0 * Js ** (-1.0 / 3.0) - 3.0 * lam * Js
        rep = abel_transform(list(zip(Js, P, Pp)), lam)
        assert rep.max_residual < 1e-9
        # chain-rule derivative vs finite differences of the mapped samples
        assert rep.max_fd_deviation < 1e-2

    def test_quadratic_P_is_flagged_singular(self):
        lam = -1.0
        Js = np.linspace(1.0, 2.0, 50)
        P = -1.5 * lam * Js**2
        Pp = -3.0 * lam * Js
        rep = abel_transform(list(zip(Js, P, Pp)), lam)
        assert rep.singular_location is not None


class TestFlatFamily:
    @pytest.mark.parametrize(
        "params,z",
        [
            (FlatFamilyParams(1, -1.0, C2=1.0), 0.3),
            (FlatFamilyParams(2, -1.0, C2=-1.0), 2.5),
            (FlatFamilyParams(3, 1.0, C2=1.0), 0.7),
        ],
    )
    def test_implicit_cases_solve_flatness(self, params, z):
        J, Jp = flat_family(params, z)
        # J' = P(J) = -(3/2) Lam J^2 + C2 J^(2/3) with the real cube root
        j23 = (math.copysign(abs(J) ** (1 / 3), J)) ** 2
        assert abs(Jp - (-1.5 * params.lam * J * J + params.C2 * j23)) < 1e-8 * max(1.0, abs(Jp))
        # K = 0 defines the family; J'' = P'(J) J'
        Pp = -3.0 * params.lam * J + (2.0 / 3.0) * params.C2 / math.copysign(abs(J) ** (1 / 3), J)
        K = K_of_solution(J, Jp, Pp * Jp, params.lam, 0.0)
        assert abs(K) < 1e-6 * max(1.0, abs(J) ** 3)

    def test_closed_form_tags(self):
        J, Jp = flat_family(FlatFamilyParams("JFlatSS", -1.0), 0.5)
        assert abs(J - 2.0 / (3.0 * -1.0 * 0.5)) < 1e-14
        assert abs(Jp + 2.0 * J) < 1e-12  # d/dz (a/u) = -a/u^2 = -J/u

    def test_domain_guards(self):
        with pytest.raises(FlatDomainError):
            flat_family(FlatFamilyParams("JFlatSS", -1.0), 0.0)
        with pytest.raises(FlatDomainError):
            flat_family(FlatFamilyParams(2, -1.0, C2=-1.0), 0.0)

    def test_case_parameter_validation(self):
        with pytest.raises(ValueError):
            FlatFamilyParams(1, 1.0, C2=1.0)
        with pytest.raises(ValueError):
            FlatFamilyParams("nope", -1.0)
