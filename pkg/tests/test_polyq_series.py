"""Exact polynomial, jet, and surd arithmetic."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typen_forge.algebraic import QuadSurd, is_rational, squarefree_split
from typen_forge.polyq import PolyQ
from typen_forge.series import Jet, jet_exp, jet_fpow, jet_log, jet_sqrt

fracs = st.fractions(max_numerator=30, max_denominator=12)
polys = st.lists(fracs, max_size=6).map(PolyQ)


class TestPolyQ:
    def test_zero_and_degree(self):
        assert not PolyQ()
        assert PolyQ().degree == -1
        assert PolyQ([0, 0]).degree == -1
        assert PolyQ([1, 0, 3]).degree == 2

    def test_eval_horner(self):
        p = PolyQ([F(1, 2), 0, 1])  # 1/2 + x^2
        assert p(F(3)) == F(19, 2)
        assert p(2.0) == 4.5

    @given(polys, polys, polys)
    @settings(max_examples=60, deadline=None)
    def test_ring_laws(self, a, b, c):
        assert (a + b) * c == a * c + b * c
        assert a * b == b * a
        assert a + (b + c) == (a + b) + c

    @given(polys, polys)
    @settings(max_examples=60, deadline=None)
    def test_divmod_roundtrip(self, a, b):
        if not b:
            return
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.degree < b.degree

    def test_rational_roots(self):
        p = PolyQ([F(9, 2), F(27, 4), 1])  # (x + 3/4)(x + 6)
        assert p.rational_roots() == [F(-6), F(-3, 4)]
        assert PolyQ([0, 0, 1]).rational_roots() == [F(0)]

    def test_gcd_monic(self):
        a = PolyQ([-1, 0, 1])  # (x-1)(x+1)
        b = PolyQ([1, 1])
        assert a.gcd(b) == PolyQ([1, 1])


class TestJet:
    def test_mul_div_inverse(self):
        f = Jet([F(2), F(1), F(-3), F(5)])
        g = Jet([F(1), F(4), F(2), F(-1)])
        assert ((f * g) / g).c == f.c

    def test_deriv_integ(self):
        f = Jet([F(1), F(2), F(3)])
        assert f.deriv().c == [F(2), F(6)]
        assert f.deriv().integ(F(1)).c == [F(1), F(2), F(3)]

    def test_compose_revert_identity(self):
        s = Jet([0.0, 2.0, -0.3, 0.05, 0.7], 8)
        t = s.revert()
        ident = s.compose(t)
        assert abs(ident[1] - 1.0) < 1e-12
        for k in (0, 2, 3, 4):
            assert abs(ident[k]) < 1e-10

    def test_exp_log_roundtrip(self):
        f = Jet([0.3, -1.2, 0.8, 0.1], 6)
        g = jet_log(jet_exp(f))
        for k in range(4):
            assert abs(g[k] - f[k]) < 1e-12

    def test_sqrt_squares(self):
        f = Jet([4.0, 1.0, -0.5, 0.2], 5)
        r = jet_sqrt(f)
        sq = r * r
        for k in range(4):
            assert abs(sq[k] - f[k]) < 1e-12

    def test_fpow_rational_exponent(self):
        f = Jet([8.0, 3.0, 1.0], 4)
        cube = jet_fpow(f, 1.0 / 3.0)
        back = cube * cube * cube
        for k in range(3):
            assert abs(back[k] - f[k]) < 1e-11

    def test_division_by_zero_constant(self):
        with pytest.raises(ZeroDivisionError):
            Jet([F(1), F(1)]) / Jet([F(0), F(1)])


class TestQuadSurd:
    def test_collapse_to_fraction(self):
        assert QuadSurd(F(1, 2), 0, 57) == F(1, 2)
        assert QuadSurd(F(1), F(2), 1) == F(3)
        assert isinstance(QuadSurd(F(1), F(1), 57), QuadSurd)

    def test_squarefree_split(self):
        assert squarefree_split(12) == (2, 3)
        assert squarefree_split(-18) == (3, -2)
        assert squarefree_split(49) == (7, 1)

    def test_sqrt_of(self):
        r = QuadSurd.sqrt_of(F(57, 4))
        assert r * r == F(57, 4)
        assert QuadSurd.sqrt_of(F(9, 4)) == F(3, 2)

    def test_field_arithmetic(self):
        x = QuadSurd(F(-1, 2), F(1, 2), 57)  # a root of t^2 + t - 14
        assert x * x + x - 14 == 0
        y = 1 / x
        assert x * y == 1

    def test_complex_surd(self):
        x = QuadSurd(0, 1, -3)
        assert not x.is_real
        assert abs(complex(x) - 1.7320508075688772j) < 1e-15
        with pytest.raises(ValueError):
            float(x)

    def test_rationality_classifier(self):
        assert is_rational(F(2, 3))
        assert not is_rational(QuadSurd(0, 1, 2))

    def test_str_rendering(self):
        assert str(QuadSurd(F(-1, 2), F(1, 2), 57)) == "(-1+sqrt(57))/2"
