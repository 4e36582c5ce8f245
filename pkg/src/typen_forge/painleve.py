"""Dominant balances, Fuchs indices, and the weak Painleve test.

The engine works on the cleared polynomial form of an ODE (an `OdeForm`).
Leading behaviours y ~ u0 * chi^m about a movable point are found by a
brute-force scan over rational exponents; the coefficient condition at the
minimal order is an exact polynomial in u0, whose nonzero roots (rational or
quadratic surd) fix the admissible leading amplitudes. Fuchs indices come
from the exact indicial polynomial of the linearized dominant part, and a
pass verdict is always backed by an explicit truncated Puiseux witness that
is substituted back into the equation.

Parameters L and C are generic: they are evaluated at nonzero rational
reference values (default 1), and degenerate parameter choices are outside
the test's scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .algebraic import QuadSurd, is_rational
from .odeform import Monomial, OdeForm
from .polyq import PolyQ

__all__ = [
    "Balance",
    "ExcludedBalance",
    "ResonanceSet",
    "PainleveVerdict",
    "dominant_balances",
    "fuchs_indices",
    "weak_painleve_verdict",
    "verify_cleared_form",
]

FREE = "free"


def _fall_value(m: Fraction, i: int) -> Fraction:
    v = Fraction(1)
    for t in range(i):
        v *= m - t
    return v


def _fall_poly(m: Fraction, i: int) -> PolyQ:
    p = PolyQ([1])
    for t in range(i):
        p = p * PolyQ([m - t, 1])
    return p


def _term_order(m: Fraction, mono: Monomial) -> Fraction:
    a, b, d, e = mono.y
    return m * a + (m - 1) * b + (m - 2) * d + (m - 3) * e


def _term_weight(coeff: Fraction, mono: Monomial, m: Fraction, L: Fraction, C: Fraction, x0: Fraction) -> Fraction:
    w = coeff * L**mono.L * C**mono.C * x0**mono.x
    for i, p in enumerate(mono.y):
        if p and i:
            w *= _fall_value(m, i) ** p
    return w


@dataclass
class Balance:
    m: Fraction
    u0: object  # Fraction | QuadSurd | "free"
    dominant: list  # [(coeff, Monomial)]
    leading_coeff_constraint: str = ""

    @property
    def u0_is_free(self) -> bool:
        return self.u0 == FREE

    def describe(self) -> str:
        head = f"y ~ u0*chi^({self.m})"
        return head + (" with u0 arbitrary" if self.u0_is_free else f" with u0 = {self.u0}")


@dataclass
class ExcludedBalance:
    m: Fraction
    blocking: list  # [(coeff, Monomial)]
    reason: str


@dataclass
class ResonanceSet:
    balance: Balance
    indices: list  # Fraction | QuadSurd, sorted by real part
    indicial_poly: PolyQ = field(default_factory=PolyQ)

    @property
    def all_rational(self) -> bool:
        return all(is_rational(j) for j in self.indices)

    def index_strings(self) -> list[str]:
        return [str(j) for j in self.indices]


class DegenerateBalanceError(ValueError):
    pass


_DEFAULT_MS = sorted(
    {
        Fraction(p, q)
        for p in range(-6, 7)
        for q in range(1, 7)
        if p != 0 and not (Fraction(p, q).denominator == 1 and p > 0)
    }
)


def dominant_balances(
    ode: OdeForm,
    L: Fraction = Fraction(1),
    C: Fraction = Fraction(1),
    x0: Fraction = Fraction(1),
    exponents=None,
) -> tuple[list[Balance], list[ExcludedBalance]]:
    """Scan candidate rational exponents m (not positive integers) for
    leading behaviours; returns the admissible balances and the candidates
    excluded by a non-cancellable lowest-order term."""
    ms = _DEFAULT_MS if exponents is None else exponents
    balances: list[Balance] = []
    excluded: dict = {}
    seen = set()
    for m in ms:
        orders = [_term_order(m, mono) for _, mono in ode.terms]
        o_min = min(orders)
        dom = [t for t, o in zip(ode.terms, orders) if o == o_min]
        if len(dom) < 2:
            key = dom[0][1]
            if key not in excluded:
                excluded[key] = ExcludedBalance(
                    m, dom, "single lowest-order term cannot vanish"
                )
            continue
        # coefficient condition: polynomial in u0
        maxdeg = max(mono.y_total for _, mono in dom)
        coeffs = [Fraction(0)] * (maxdeg + 1)
        for c, mono in dom:
            coeffs[mono.y_total] += _term_weight(c, mono, m, L, C, x0)
        Q = PolyQ(coeffs)
        if not Q:
            if (m, FREE) not in seen:
                seen.add((m, FREE))
                balances.append(Balance(m, FREE, dom, "u0 arbitrary (coefficients cancel identically)"))
            continue
        # strip the power of u0
        shift = 0
        while Q.coeffs and Q.coeffs[0] == 0:
            Q = PolyQ(Q.coeffs[1:])
            shift += 1
        if Q.degree < 1:
            key = tuple(mono for _, mono in dom)
            if key not in excluded:
                excluded[key] = ExcludedBalance(m, dom, "no nonzero leading amplitude")
            continue
        for root in _exact_nonzero_roots(Q):
            ident = (m, str(root))
            if ident not in seen:
                seen.add(ident)
                balances.append(Balance(m, root, dom, f"u0 = {root}"))
    return balances, list(excluded.values())


def _exact_nonzero_roots(Q: PolyQ) -> list:
    roots: list = [r for r in Q.rational_roots() if r != 0]
    rem = Q
    for r in roots:
        while True:
            quo, rr = rem.divmod(PolyQ([-r, 1]))
            if rr:
                break
            rem = quo
            if rem(r) != 0:
                break
    # strip remaining zero roots
    while rem.coeffs and rem.coeffs[0] == 0:
        rem = PolyQ(rem.coeffs[1:])
    if rem.degree == 2:
        a, b, c = rem.coeffs[2], rem.coeffs[1], rem.coeffs[0]
        disc = b * b - 4 * a * c
        root = QuadSurd.sqrt_of(disc)
        if not is_rational(root):
            r1 = (-b + root) / (2 * a)
            r2 = (-b - root) / (2 * a)
            roots.extend([r1, r2])
    elif rem.degree > 2:
        raise NotImplementedError("irreducible factor of degree > 2 in balance condition")
    return roots


def fuchs_indices(
    ode: OdeForm,
    balance: Balance,
    L: Fraction = Fraction(1),
    C: Fraction = Fraction(1),
    x0: Fraction = Fraction(1),
) -> ResonanceSet:
    """Exact roots of the indicial polynomial of the linearized dominant
    part; -1 always appears for a movable singular point."""
    m = balance.m
    if balance.u0_is_free:
        totals = {mono.y_total for _, mono in balance.dominant}
        if len(totals) != 1:
            raise NotImplementedError("free balance with mixed term degrees")
        u0_pow = lambda n: Fraction(1)
    else:
        u0 = balance.u0
        u0_pow = lambda n: u0**n if not isinstance(u0, QuadSurd) else u0**n
    poly_coeffs = [Fraction(0)] * 4
    for c, mono in balance.dominant:
        a = mono.y[0]
        w = c * L**mono.L * C**mono.C * x0**mono.x * u0_pow(mono.y_total - 1)
        F = Fraction(1)
        for i, p in enumerate(mono.y):
            if p and i:
                F *= _fall_value(m, i) ** p
        # variation: replace one factor at derivative level i
        contrib = PolyQ()
        if a:
            contrib = contrib + PolyQ([a * F])
        for i in (1, 2, 3):
            p = mono.y[i]
            if p:
                fv = _fall_value(m, i)
                if fv == 0:
                    raise DegenerateBalanceError("vanishing falling factorial in dominant term")
                contrib = contrib + (p * (F / fv)) * _fall_poly(m, i)
        if not is_rational(w):
            # only even powers of a surd u0 occur in the equations at hand
            raise NotImplementedError("surd-valued indicial coefficients")
        for k, cf in enumerate((w * contrib).coeffs):
            poly_coeffs[k] += cf
    Q = PolyQ(poly_coeffs)
    if not Q:
        raise DegenerateBalanceError("indicial polynomial vanishes identically")
    indices = _indicial_roots(Q)
    indices.sort(key=lambda j: (float(j.a) if isinstance(j, QuadSurd) else float(j)))
    return ResonanceSet(balance, indices, Q)


def _indicial_roots(Q: PolyQ) -> list:
    roots: list = []
    rem = Q
    for r in Q.rational_roots():
        while True:
            quo, rr = rem.divmod(PolyQ([-r, 1]))
            if rr:
                break
            roots.append(r)
            rem = quo
    if rem.degree == 2:
        a, b, c = rem.coeffs[2], rem.coeffs[1], rem.coeffs[0]
        disc = b * b - 4 * a * c
        root = QuadSurd.sqrt_of(disc)
        roots.append((-b + root) / (2 * a))
        roots.append((-b - root) / (2 * a))
    elif rem.degree == 1:
        roots.append(-rem.coeffs[0] / rem.coeffs[1])
    elif rem.degree > 2:
        raise NotImplementedError("indicial factor of degree > 2 without rational roots")
    return roots


# -- compatibility by series substitution --------------------------------


@dataclass
class SeriesWitness:
    balance: Balance
    step_denominator: int
    coeffs: list
    compatible: bool
    failed_index: Fraction | None = None
    arbitrary_indices: list = field(default_factory=list)


def _series_substitution(
    ode: OdeForm,
    balance: Balance,
    indices: list,
    L: Fraction,
    C: Fraction,
    x0: Fraction,
    depth_terms: int | None = None,
    u0_value=None,
) -> SeriesWitness:
    """Build y = sum v_k chi^(m + k/q) term by term and check that every
    rational resonance order is consistent (zero right-hand side where the
    linear factor vanishes)."""
    m = balance.m
    rational_idx = [j for j in indices if is_rational(j)]
    q = lcm(m.denominator, *(j.denominator for j in rational_idx), 1)
    max_idx = max([j for j in rational_idx] + [Fraction(0)])
    depth = depth_terms if depth_terms is not None else int(q * (max_idx + 3))
    if u0_value is None:
        u0_value = Fraction(1) if balance.u0_is_free else balance.u0
    base = int(q * m)  # y leading lattice index; exponent = idx / q
    v = {0: u0_value}

    x_series = {0: x0, q: 1}
    o_min = min(_term_order(m, mono) for _, mono in ode.terms)
    cap = int(q * o_min) + depth + 1

    def lattice_y(vdict):
        return {base + k: c for k, c in vdict.items()}

    def dseries(s):
        out = {}
        for n, c in s.items():
            if n != 0:
                out[n - q] = c * Fraction(n, q)
        return out

    def smul(a, b):
        out = {}
        for i, ai in a.items():
            if ai == 0:
                continue
            for j, bj in b.items():
                n = i + j
                if n > cap:
                    continue
                out[n] = out.get(n, 0) + ai * bj
        return out

    def residual(vdict):
        y0 = lattice_y(vdict)
        ys = [y0]
        for _ in range(3):
            ys.append(dseries(ys[-1]))
        total = {}
        for c, mono in ode.terms:
            w = c * L**mono.L * C**mono.C
            term = {0: w}
            if mono.x:
                for _ in range(mono.x):
                    term = smul(term, x_series)
            for i, p in enumerate(mono.y):
                for _ in range(p):
                    term = smul(term, ys[i])
            for n, cc in term.items():
                total[n] = total.get(n, 0) + cc
        return total

    arbitrary = []
    for k in range(1, depth + 1):
        target = int(q * o_min) + k
        trial0 = dict(v)
        trial0[k] = 0 * u0_value
        b0 = residual(trial0).get(target, 0)
        trial1 = dict(v)
        trial1[k] = 1
        a_lin = residual(trial1).get(target, 0) - b0
        if a_lin == 0:
            if b0 != 0:
                return SeriesWitness(balance, q, [v.get(i, 0) for i in range(k)], False, Fraction(k, q), arbitrary)
            arbitrary.append(Fraction(k, q))
            v[k] = 0 * u0_value
        else:
            v[k] = -b0 / a_lin
    coeffs = [v.get(i, 0) for i in range(depth + 1)]
    return SeriesWitness(balance, q, coeffs, True, None, arbitrary)


@dataclass
class PainleveVerdict:
    passed: bool
    reasons: list
    resonances: list  # ResonanceSet per balance
    witnesses: list  # SeriesWitness per compatible balance
    excluded: list
    first_order_automatic: bool = False

    def to_jsonable(self) -> dict:
        from .serialize import frac_str

        return {
            "passed": self.passed,
            "reasons": self.reasons,
            "first_order_automatic": self.first_order_automatic,
            "balances": [
                {
                    "m": frac_str(rs.balance.m),
                    "u0": str(rs.balance.u0),
                    "indices": rs.index_strings(),
                    "all_rational": rs.all_rational,
                }
                for rs in self.resonances
            ],
            "excluded": [
                {"m": frac_str(e.m), "reason": e.reason} for e in self.excluded
            ],
        }


def weak_painleve_verdict(
    ode: OdeForm,
    L: Fraction = Fraction(1),
    C: Fraction = Fraction(1),
    x0: Fraction = Fraction(1),
) -> PainleveVerdict:
    """Fail iff some balance has an irrational or complex index other than
    -1, or a rational resonance is incompatible under substitution."""
    balances, excluded = dominant_balances(ode, L, C, x0)
    resonances = [fuchs_indices(ode, b, L, C, x0) for b in balances]
    if ode.order <= 1:
        return PainleveVerdict(
            True,
            ["first-order rational ODE: movable singularities are poles or algebraic branch points"],
            resonances,
            [],
            excluded,
            first_order_automatic=True,
        )
    reasons = []
    passed = True
    witnesses = []
    for rs in resonances:
        bad = [j for j in rs.indices if not is_rational(j) and j != Fraction(-1)]
        if any(isinstance(j, QuadSurd) and not j.is_real for j in bad):
            passed = False
            reasons.append(f"complex resonances at balance {rs.balance.describe()}: {rs.index_strings()}")
            continue
        if bad:
            passed = False
            reasons.append(f"irrational resonances at balance {rs.balance.describe()}: {rs.index_strings()}")
            continue
        u0_samples = [None]
        if rs.balance.u0_is_free:
            u0_samples = [Fraction(5, 7), Fraction(-13, 11)]
        for u0v in u0_samples:
            w = _series_substitution(ode, rs.balance, rs.indices, L, C, x0, u0_value=u0v)
            witnesses.append(w)
            if not w.compatible:
                passed = False
                reasons.append(
                    f"incompatible resonance at index {w.failed_index} for balance {rs.balance.describe()}"
                )
    if passed:
        reasons.append("all resonances rational and compatible; substitution witnesses attached")
    return PainleveVerdict(passed, reasons, resonances, witnesses, excluded)


def verify_cleared_form(ode: OdeForm, residual_callback, clearing_factor, points) -> float:
    """Max deviation |ode(pt) - clearing_factor(pt) * residual(pt)| over the
    sample points; used to audit a hand-cleared polynomial form."""
    worst = 0.0
    for pt in points:
        lhs = ode.evaluate(**pt)
        rhs = clearing_factor(**pt) * residual_callback(**pt)
        worst = max(worst, abs(lhs - rhs))
    return worst
