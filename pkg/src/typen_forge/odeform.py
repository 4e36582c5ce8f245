"""Parser and canonical form for the little ODE term language.

Grammar (whitespace insensitive)::

    ode     := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := rational | '(' rational ')' | symbol
    rational:= INT ['/' INT]
    symbol  := ('L' | 'C' | 'x' | 'y' primes) ['^' INT]
    primes  := "'"{0..3}

`y` is the dependent variable with up to three primes; `x` the independent
variable; `L` and `C` stand for the two real parameters (cosmological
constant and the Killing-reduction constant). A parsed equation is a sum of
monomial terms, each an exact rational coefficient times a monomial in
(L, C, y, y', y'', y''', x); like monomials are merged, so the canonical
text round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class OdeSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Monomial:
    """Exponents (L, C, y, y', y'', y''', x)."""

    L: int = 0
    C: int = 0
    y: tuple[int, int, int, int] = (0, 0, 0, 0)
    x: int = 0

    @property
    def derivative_count(self) -> int:
        return max((i for i, p in enumerate(self.y) if p), default=0)

    @property
    def y_total(self) -> int:
        return sum(self.y)


@dataclass
class OdeForm:
    terms: list  # [(Fraction coeff, Monomial)]
    source: str = ""

    @property
    def order(self) -> int:
        return max(m.derivative_count for _, m in self.terms)

    def evaluate(self, x, y, yp, ypp=0.0, yppp=0.0, L=1.0, C=1.0):
        yv = (y, yp, ypp, yppp)
        total = 0
        for c, m in self.terms:
            v = c * (L**m.L) * (C**m.C) * (x**m.x)
            for i, p in enumerate(m.y):
                if p:
                    v = v * yv[i] ** p
            total = total + v
        return total

    def unparse(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for idx, (c, m) in enumerate(self.terms):
            factors = []
            ac = abs(c)
            if ac != 1 or (m.L == m.C == m.x == 0 and m.y_total == 0):
                factors.append(str(ac) if ac.denominator == 1 else f"({ac})")
            for sym, p in (("L", m.L), ("C", m.C)):
                if p:
                    factors.append(sym if p == 1 else f"{sym}^{p}")
            for i, p in enumerate(m.y):
                if p:
                    base = "y" + "'" * i
                    factors.append(base if p == 1 else f"{base}^{p}")
            if m.x:
                factors.append("x" if m.x == 1 else f"x^{m.x}")
            body = "*".join(factors)
            if idx == 0:
                chunks.append(("-" if c < 0 else "") + body)
            else:
                chunks.append(("- " if c < 0 else "+ ") + body)
        return " ".join(chunks)

    def __len__(self):
        return len(self.terms)


_SORT = lambda item: (
    -item[1].derivative_count,
    tuple(-p for p in item[1].y[::-1]),
    -item[1].y_total,
    -item[1].x,
    -item[1].L,
    -item[1].C,
)


def _canonicalize(raw: list) -> list:
    merged: dict[Monomial, Fraction] = {}
    for c, m in raw:
        merged[m] = merged.get(m, Fraction(0)) + c
    terms = [(c, m) for m, c in merged.items() if c != 0]
    terms.sort(key=_SORT)
    return terms


def parse_ode(text: str) -> OdeForm:
    """Parse the term language into canonical form."""
    i = 0
    n = len(text)

    def skip_ws():
        nonlocal i
        while i < n and text[i].isspace():
            i += 1

    def parse_int() -> int:
        nonlocal i
        start = i
        while i < n and text[i].isdigit():
            i += 1
        if i == start:
            raise OdeSyntaxError("expected integer", start)
        return int(text[start:i])

    def parse_rational() -> Fraction:
        nonlocal i
        num = parse_int()
        skip_ws()
        if i < n and text[i] == "/":
            i += 1
            skip_ws()
            den = parse_int()
            if den == 0:
                raise OdeSyntaxError("zero denominator", i)
            return Fraction(num, den)
        return Fraction(num)

    def parse_exponent() -> int:
        nonlocal i
        skip_ws()
        if i < n and text[i] == "^":
            i += 1
            skip_ws()
            return parse_int()
        return 1

    def parse_factor():
        nonlocal i
        skip_ws()
        if i >= n:
            raise OdeSyntaxError("unexpected end of input", i)
        ch = text[i]
        if ch == "(":
            i += 1
            skip_ws()
            val = parse_rational()
            skip_ws()
            if i >= n or text[i] != ")":
                raise OdeSyntaxError("expected ')'", i)
            i += 1
            return ("num", val)
        if ch.isdigit():
            return ("num", parse_rational())
        if ch in "LC":
            i += 1
            return (ch, parse_exponent())
        if ch == "x":
            i += 1
            return ("x", parse_exponent())
        if ch == "y":
            i += 1
            primes = 0
            while i < n and text[i] == "'":
                primes += 1
                i += 1
            if primes > 3:
                raise OdeSyntaxError("derivative order above 3 is not supported", i - 1)
            return (("y", primes), parse_exponent())
        raise OdeSyntaxError(f"unexpected character {ch!r}", i)

    def parse_term(sign: int):
        nonlocal i
        coeff = Fraction(sign)
        L = C = x = 0
        y = [0, 0, 0, 0]
        while True:
            kind, val = parse_factor()
            if kind == "num":
                coeff *= val
            elif kind == "L":
                L += val
            elif kind == "C":
                C += val
            elif kind == "x":
                x += val
            else:
                y[kind[1]] += val
            skip_ws()
            if i < n and text[i] == "*":
                i += 1
                continue
            break
        return coeff, Monomial(L, C, tuple(y), x)

    raw = []
    skip_ws()
    sign = 1
    if i < n and text[i] in "+-":
        sign = -1 if text[i] == "-" else 1
        i += 1
    if i >= n:
        raise OdeSyntaxError("empty input", i)
    raw.append(parse_term(sign))
    skip_ws()
    while i < n:
        if text[i] not in "+-":
            raise OdeSyntaxError("expected '+' or '-'", i)
        sign = -1 if text[i] == "-" else 1
        i += 1
        raw.append(parse_term(sign))
        skip_ws()
    terms = _canonicalize(raw)
    if not terms:
        raise OdeSyntaxError("all terms cancel", 0)
    form = OdeForm(terms)
    form.source = text
    return form


# canonical cleared forms of the three equations under study, in the term
# language (x stands for the independent variable of each):
#   PEQ:  2 P P'' + (P' + 2 L J)^2 + 4 C^2 + (20/3) L P = 0
#   JEQ:  (times 2 J')  2 J' J''' - J''^2 + 4 L J J' J'' + (20/3) L J'^3
#         + 4 (L^2 J^2 + C^2) J'^2 = 0
#   ABEL: (times t)  t f' - 4 x^2 f^3 - (22/3) x f^3 - 2 f^3 - 5 x f^2
#         - 2 f^2 - (1/2) f = 0
PEQ_TEXT = "2*y*y'' + y'^2 + 4*L*x*y' + 4*L^2*x^2 + 4*C^2 + (20/3)*L*y"
JEQ_TEXT = (
    "2*y'*y''' - y''^2 + 4*L*y*y'*y'' + (20/3)*L*y'^3 + 4*L^2*y^2*y'^2 + 4*C^2*y'^2"
)
ABEL_TEXT = (
    "x*y' - 4*x^2*y^3 - (22/3)*x*y^3 - 2*y^3 - 5*x*y^2 - 2*y^2 - (1/2)*y"
)

NAMED_ODES = {"PEQ": PEQ_TEXT, "JEQ": JEQ_TEXT, "ABEL": ABEL_TEXT}
