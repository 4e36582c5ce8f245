"""Exact rational series of the second-order w-equation and the
third-order z-equation."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typen_forge.exact_series import (
    COMMON_FACTOR,
    check_common_factor,
    g_coefficients,
    g_coefficients_symbolic,
    g_low_order_from_ode,
    g_series_residual_jet,
    j_taylor,
    K_at_origin,
    residual_g,
    verify_theorem4,
)

u0s = st.fractions(max_numerator=40, max_denominator=8).filter(lambda q: q != 0)


class TestGSeries:
    def test_low_order_closed_forms(self):
        # u2 = -(5/3)(u0 + 3/5)/u0, u4 = -(2/27)(u0 + 3/4)(u0 + 6)/u0^3
        for u0 in (F(-2), F(7, 3), F(-301, 400)):
            s = g_coefficients(u0, 4)
            assert s.even_coefficient(1) == F(-5, 3) * (u0 + F(3, 5)) / u0
            assert s.even_coefficient(2) == F(-2, 27) * (u0 + F(3, 4)) * (u0 + 6) / u0**3

    @given(u0s)
    @settings(max_examples=25, deadline=None)
    def test_dual_route_matches_recursion(self, u0):
        # independent derivation from the cleared equation, order by order
        direct = g_low_order_from_ode(u0, k_max=3)
        s = g_coefficients(u0, 3)
        assert direct == [s.even_coefficient(k) for k in range(4)]

    @given(u0s)
    @settings(max_examples=15, deadline=None)
    def test_residual_jet_vanishes_through_truncation_order(self, u0):
        s = g_coefficients(u0, 5)
        res = g_series_residual_jet(s)
        for k in range(s.order - 1):
            assert res[k] == 0

    def test_terminating_solutions(self):
        # u0 = -3/4 and u0 = -6 terminate as exact quadratics
        for u0, u2 in ((F(-3, 4), F(-1, 3)), (F(-6), F(-3, 2))):
            s = g_coefficients(u0, 8)
            assert s.even_coefficient(1) == u2
            assert all(s.even_coefficient(k) == 0 for k in range(2, 9))

    def test_closed_quadratics_solve_exactly(self):
        for a, b in ((F(-1, 3), F(-3, 4)), (F(-3, 2), F(-6))):
            for w in [F(n, 7) for n in range(-10, 11)]:
                g = a * w * w + b
                assert residual_g(g, 2 * a * w, 2 * a, w) == 0

    def test_symbolic_matches_numeric(self):
        polys = g_coefficients_symbolic(6)
        for u0 in (F(-2), F(5, 2)):
            s = g_coefficients(u0, 6)
            for k in range(7):
                assert polys[k](u0) == s.even_coefficient(k)

    def test_residual_rejects_zero_g(self):
        with pytest.raises(ZeroDivisionError):
            residual_g(F(0), F(0), F(0), F(1))


class TestFactorTheorem:
    def test_common_factor_divides_all(self):
        rep = check_common_factor(12)
        assert rep.all_divide
        # root evaluation is the independent cross-check
        assert all(v == (0, 0) for v in rep.root_values.values())

    def test_no_further_common_root(self):
        rep = check_common_factor(12)
        assert rep.quotient_gcd.degree == 0

    def test_factor_is_the_terminating_pair(self):
        assert COMMON_FACTOR.rational_roots() == [F(-6), F(-3, 4)]


class TestTheorem4Bound:
    def test_bound_holds_at_interior_point(self):
        rep = verify_theorem4(F(-2), F(1, 10), F(5, 3), 40)
        assert rep.ineq1_holds and rep.ineq2_holds
        assert rep.bound_holds
        assert rep.margin_min > 0

    def test_bound_reports_violation(self):
        # tiny M starves the geometric envelope
        rep = verify_theorem4(F(-2), F(1, 10), F(1, 100), 10)
        assert not rep.bound_holds
        assert rep.first_violation is not None

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            verify_theorem4(F(-2), F(0), F(1), 5)


class TestJSeries:
    def test_leading_structure(self):
        s = j_taylor(F(3), F(-1), 7)
        # J = u0 z + c3 z^3 + c5 z^5 + ... (even coefficients vanish)
        assert s.coeffs[0] == 0 and s.coeffs[2] == 0 and s.coeffs[4] == 0
        assert s.coeffs[1] == F(3)

    @pytest.mark.parametrize("u0,lam", [(F(3), F(-1)), (F(2, 3), F(5, 7))])
    def test_coefficient_closed_forms(self, u0, lam):
        s = j_taylor(u0, lam, 6)
        assert s.coeffs[3] == -F(5, 9) * lam * u0**2
        assert s.coeffs[5] == F(16, 45) * lam**2 * u0**3

    def test_K_at_origin(self):
        s = j_taylor(F(3), F(-1), 4)
        assert K_at_origin(s) == -F(2, 3) * F(-1) * F(9)

    def test_rejects_nonpositive_slope(self):
        with pytest.raises(ValueError):
            j_taylor(F(-1), F(1), 5)
