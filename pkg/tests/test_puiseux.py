"""Puiseux expansions about a movable point and the regularizing chart."""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from typen_forge.puiseux import (
    chart_to_puiseux,
    peq_residual,
    puiseux_coefficients,
    puiseux_expand,
    regular_chart,
    special_case_closed_form,
)


class TestPuiseuxExpansion:
    def test_rational_inputs_stay_exact(self):
        u = puiseux_coefficients(F(2), F(1), F(-1), F(0), 4)
        assert all(isinstance(c, F) for c in u)

    def test_residual_decay_order(self):
        # truncation at order n leaves a residual O(chi^((n-1)/3 - 1))
        ser = puiseux_expand(1.3, 0.7, -1.0, 0.5, 12)
        hs = [1e-2, 1e-3, 1e-4]
        rs = [abs(ser.residual(0.7 + h)) for h in hs]
        slope = (math.log(rs[0]) - math.log(rs[2])) / (math.log(hs[0]) - math.log(hs[2]))
        assert slope > 2.5  # lattice gap: at least (12 - 4)/3 - ... keeps it well above 2

    def test_three_branches_same_residual_order(self):
        for branch in (0, 1, 2):
            ser = puiseux_expand(1.3, 0.7, -1.0, 0.5, 10, branch=branch)
            assert abs(ser.residual(0.7 + 1e-4)) < 1e-8

    def test_degenerate_leading_term_rejected(self):
        with pytest.raises(ValueError):
            puiseux_expand(0.0, 1.0, -1.0, 0.0, 5)

    def test_json_export_shape(self):
        d = puiseux_expand(1.0, 0.5, -1.0, 0.0, 3).to_jsonable()
        assert d["base_exponent"] == "2/3"
        assert d["step"] == "1/3"
        assert d["terms"][0]["exponent"] == "2/3"
        assert len(d["terms"]) == 4


class TestRegularChart:
    def test_roundtrip_matches_direct_expansion(self):
        # independent route: chart series -> reversion -> Puiseux lattice
        J0, Z0, lam, C1 = 0.4, 1.3, -1.0, 0.5
        chart = regular_chart(J0, Z0, lam, C1, 14)
        via_chart = chart_to_puiseux(chart)
        u0 = (1.5 * Z0) ** (2.0 / 3.0)
        direct = puiseux_expand(u0, J0, lam, C1, via_chart.order)
        for a, b in zip(via_chart.coeffs, direct.coeffs):
            assert abs(a - b) <= 1e-10 * max(1.0, abs(b))

    def test_chart_rejects_zero_Z0(self):
        with pytest.raises(ValueError):
            regular_chart(1.0, 0.0, -1.0, 0.0, 5)


class TestSpecialCase:
    def test_closed_form_residual_vanishes(self):
        sol = special_case_closed_form(1.7, 1.0, -1.0, sign=1)
        for J in np.linspace(0.5, 3.0, 7):
            assert abs(sol.residual(complex(J))) < 1e-10

    def test_terminating_structure(self):
        # at the special point the fractional part is a single term:
        # expanding about J0 = 2i C1/lam reproduces -(3/2) lam (J^2 + ...)
        sol = special_case_closed_form(2.0, 1.0, -1.0)
        J = 1.0 + 0.3j
        P, Pp, Ppp = sol.eval_with_derivatives(J)
        assert abs(peq_residual(P, Pp, Ppp, J, -1.0, 1.0)) < 1e-12

    def test_rejects_zero_lambda(self):
        with pytest.raises(ValueError):
            special_case_closed_form(1.0, 1.0, 0.0)
