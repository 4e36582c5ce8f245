"""Term-language parser and the weak Painleve machinery."""

from fractions import Fraction as F

import pytest

from typen_forge.algebraic import QuadSurd
from typen_forge.odeform import (
    ABEL_TEXT,
    JEQ_TEXT,
    NAMED_ODES,
    OdeSyntaxError,
    PEQ_TEXT,
    parse_ode,
)
from typen_forge.painleve import (
    dominant_balances,
    fuchs_indices,
    weak_painleve_verdict,
)


class TestParser:
    def test_roundtrip_canonical(self):
        ode = parse_ode(PEQ_TEXT)
        again = parse_ode(ode.unparse())
        assert ode.terms == again.terms

    def test_like_terms_merge(self):
        ode = parse_ode("y'' + 2*y - 3*y + y")
        assert len(ode) == 1  # only y'' survives
        assert ode.order == 2

    def test_cancellation_rejected(self):
        with pytest.raises(OdeSyntaxError):
            parse_ode("y - y")

    def test_rational_coefficients(self):
        ode = parse_ode("(20/3)*L*y + y''")
        coeffs = {m.y: c for c, m in ode.terms}
        assert coeffs[(1, 0, 0, 0)] == F(20, 3)

    def test_syntax_errors_carry_position(self):
        with pytest.raises(OdeSyntaxError) as e:
            parse_ode("y'''' + y")
        assert e.value.position >= 0
        with pytest.raises(OdeSyntaxError):
            parse_ode("")
        with pytest.raises(OdeSyntaxError):
            parse_ode("y + $")

    def test_evaluate(self):
        ode = parse_ode("2*y*y'' + y'^2")
        assert ode.evaluate(0.0, 3.0, 2.0, 5.0) == 34.0


class TestVerdicts:
    def test_second_order_passes(self):
        v = weak_painleve_verdict(parse_ode(PEQ_TEXT))
        assert v.passed
        assert not v.first_order_automatic
        # the movable branch point carries a free coefficient: indices -1, 0
        free = [rs for rs in v.resonances if rs.balance.u0_is_free]
        assert free and sorted(free[0].indices) == [F(-1), F(0)]

    def test_third_order_fails_with_surd_indices(self):
        v = weak_painleve_verdict(parse_ode(JEQ_TEXT))
        assert not v.passed
        index_sets = [set(rs.indices) for rs in v.resonances]
        assert {F(-1), F(4, 3), F(7, 3)} in index_sets
        surds = {
            F(-1),
            QuadSurd(F(-1, 2), F(1, 2), 57),
            QuadSurd(F(-1, 2), F(-1, 2), 57),
        }
        assert surds in index_sets
        assert any("irrational" in r for r in v.reasons)

    def test_first_order_automatic(self):
        v = weak_painleve_verdict(parse_ode(ABEL_TEXT))
        assert v.passed
        assert v.first_order_automatic

    def test_balances_exclude_positive_integer_powers(self):
        balances, excluded = dominant_balances(parse_ode(PEQ_TEXT), F(1), F(1), F(1))
        assert balances
        for b in balances:
            assert not (b.m.denominator == 1 and b.m > 0)

    def test_indices_contain_minus_one(self):
        ode = parse_ode(JEQ_TEXT)
        balances, _ = dominant_balances(ode, F(1), F(1), F(1))
        for b in balances:
            rs = fuchs_indices(ode, b, F(1), F(1), F(1))
            assert F(-1) in rs.indices

    def test_verdict_is_parameter_independent(self):
        for L, C in ((F(1), F(1)), (F(-3, 2), F(2, 5))):
            v = weak_painleve_verdict(parse_ode(JEQ_TEXT), L, C)
            assert not v.passed

    def test_json_export(self):
        d = weak_painleve_verdict(parse_ode(JEQ_TEXT)).to_jsonable()
        assert d["passed"] is False
        rendered = {frozenset(b["indices"]) for b in d["balances"]}
        assert frozenset({"-1", "(-1-sqrt(57))/2", "(-1+sqrt(57))/2"}) in rendered
