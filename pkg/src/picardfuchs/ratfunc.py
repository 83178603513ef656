"""Rational functions in the parameters, the coefficient field of the engine.

A RatFunc is a reduced fraction of MultiPoly values over Fraction
coefficients, denominator normalized monic under the canonical order.
Equality of canonical forms is therefore plain structural equality.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import MultiPoly, divexact, poly_gcd


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly, _reduced=False):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # -- constructors ---------------------------------------------------

    @classmethod
    def const(cls, params, value) -> "RatFunc":
        params = tuple(params)
        return cls(MultiPoly.const(params, Fraction(value)),
                   MultiPoly.const(params, Fraction(1)), _reduced=True)

    @classmethod
    def var(cls, params, name) -> "RatFunc":
        params = tuple(params)
        return cls(MultiPoly.var(params, name),
                   MultiPoly.const(params, Fraction(1)), _reduced=True)

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFunc":
        return cls(p, MultiPoly.const(p.variables, Fraction(1)), _reduced=True)

    @property
    def params(self):
        return self.num.variables

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.params != self.params:
                raise ValueError(
                    f"parameter mismatch: {self.params} vs {other.params}")
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(self.params, other)
        return None

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.num, self.den
        c, d = other.num, other.den
        if b == d:
            num = a + c
            if num.is_zero():
                return RatFunc.const(self.params, 0)
            return RatFunc(num, b)
        if b.is_constant() and d.is_constant():
            num = a + c  # both denominators normalized to 1
            if num.is_zero():
                return RatFunc.const(self.params, 0)
            return RatFunc(num, b, _reduced=True)
        g = poly_gcd(b, d)
        if g.is_constant():
            # coprime reduced denominators: the sum is already reduced
            num = a * d + c * b
            if num.is_zero():
                return RatFunc.const(self.params, 0)
            return RatFunc(num, b * d, _reduced=True)
        return RatFunc(a * d + c * b, b * d)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.num, self.den
        c, d = other.num, other.den
        if a.is_zero() or c.is_zero():
            return RatFunc.const(self.params, 0)
        # cross-cancel so the product of reduced fractions stays reduced
        if not a.is_constant() and not d.is_constant():
            g = poly_gcd(a, d)
            if not g.is_constant():
                a = divexact(a, g)
                d = divexact(d, g)
        if not c.is_constant() and not b.is_constant():
            g = poly_gcd(c, b)
            if not g.is_constant():
                c = divexact(c, g)
                b = divexact(b, g)
        return _monic_checked(a * c, b * d, self.params)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self * other._reciprocal()

    def _reciprocal(self) -> "RatFunc":
        return _monic_checked(self.den, self.num, self.params)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc.const(self.params, 1) / self ** (-n)
        out = RatFunc.const(self.params, 1)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------

    def derivative(self, param: str) -> "RatFunc":
        """d/d(param) by the quotient rule."""
        dn = self.num.partial(param)
        dd = self.den.partial(param)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values: dict):
        """Evaluate at numbers (Fraction or float)."""
        n = self.num.evaluate(values)
        d = self.den.evaluate(values)
        return n / d

    def substitute(self, assignment: dict) -> "RatFunc":
        """Substitute RatFunc values for the parameters."""
        n = self.num.evaluate(assignment)
        d = self.den.evaluate(assignment)
        if isinstance(n, Fraction):
            target = next(iter(assignment.values()))
            n = RatFunc.const(target.params, n)
        if isinstance(d, Fraction):
            d = RatFunc.const(n.params, d)
        return n / d

    # -- printing --------------------------------------------------------------

    def __str__(self):
        if self.den.is_constant():
            c = self.den.constant_value()
            num = self.num if c == 1 else self.num.scale(1 / c)
            return str(num)
        num = str(self.num)
        if len(self.num.terms) > 1 or "/" in num or " " in num:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"


def _reduce(num: MultiPoly, den: MultiPoly):
    if num.is_zero():
        return num, MultiPoly.const(den.variables, Fraction(1))
    if not den.is_constant() and not num.is_constant():
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = divexact(num, g)
            den = divexact(den, g)
    lc = den.leading_coefficient()
    if lc != 1:
        num = num.map_coefficients(lambda c: c / lc)
        den = den.map_coefficients(lambda c: c / lc)
    return num, den


def _monic_checked(num: MultiPoly, den: MultiPoly, params) -> RatFunc:
    """Build a RatFunc from an already-coprime pair, normalizing the
    denominator monic."""
    if num.is_zero():
        return RatFunc.const(params, 0)
    lc = den.leading_coefficient()
    if lc != 1:
        num = num.map_coefficients(lambda c: c / lc)
        den = den.map_coefficients(lambda c: c / lc)
    return RatFunc(num, den, _reduced=True)
