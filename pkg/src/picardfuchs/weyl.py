"""Normally ordered differential operators over a commutative coefficient ring.

A WeylOp is a finite sum  sum_g  c_g * D^g  where D^g is a monomial in
the partial derivatives of the declared base variables and each c_g is
a MultiPoly standing to the left of all derivatives.  Base variables
may themselves appear in the coefficients (x, y, mu) or act purely on
scalar coefficients (parameter derivations like d/dlam); the
commutation rule [D_v, c] = dc/dv picks the right derivative either
way.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .poly import MultiPoly, grlex_key
from .ratfunc import RatFunc


class WeylOp:
    __slots__ = ("base_vars", "terms")

    def __init__(self, base_vars, terms):
        self.base_vars = tuple(base_vars)
        self.terms = terms  # {d-exponent tuple: MultiPoly}

    # -- constructors ------------------------------------------------------

    @classmethod
    def make(cls, base_vars, terms) -> "WeylOp":
        base_vars = tuple(base_vars)
        out = {}
        for exps, c in terms.items() if isinstance(terms, dict) else terms:
            exps = tuple(exps)
            if len(exps) != len(base_vars):
                raise ValueError("derivative exponent length mismatch")
            if c.is_zero():
                continue
            prev = out.get(exps)
            c = c if prev is None else prev + c
            if c.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = c
        return cls(base_vars, out)

    @classmethod
    def zero(cls, base_vars, coeff_vars) -> "WeylOp":
        return cls(tuple(base_vars), {})

    @classmethod
    def from_poly(cls, base_vars, poly: MultiPoly) -> "WeylOp":
        n = len(tuple(base_vars))
        if poly.is_zero():
            return cls(tuple(base_vars), {})
        return cls(tuple(base_vars), {(0,) * n: poly})

    @classmethod
    def partial(cls, base_vars, name, coeff_vars, one=Fraction(1)) -> "WeylOp":
        base_vars = tuple(base_vars)
        if name not in base_vars:
            raise ValueError(f"{name!r} is not a base variable")
        exps = tuple(1 if v == name else 0 for v in base_vars)
        return cls(base_vars, {exps: MultiPoly.const(coeff_vars, one)})

    # -- views ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        """Max total derivative degree; -1 for the zero operator."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coefficient(self, exps) -> MultiPoly:
        exps = tuple(exps)
        if exps in self.terms:
            return self.terms[exps]
        some = next(iter(self.terms.values()), None)
        if some is None:
            raise ValueError("zero operator has no coefficient variables")
        return MultiPoly.zero(some.variables)

    def __eq__(self, other):
        if not isinstance(other, WeylOp):
            return NotImplemented
        return self.base_vars == other.base_vars and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if self.base_vars != other.base_vars:
            raise ValueError(
                f"base variable mismatch: {self.base_vars} vs {other.base_vars}")

    # -- linear structure -------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            prev = out.get(exps)
            c = c if prev is None else prev + c
            if c.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = c
        return WeylOp(self.base_vars, out)

    def __neg__(self):
        return WeylOp(self.base_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        out = {}
        for exps, p in self.terms.items():
            q = p.scale(c)
            if not q.is_zero():
                out[exps] = q
        return WeylOp(self.base_vars, out)

    # -- multiplication -----------------------------------------------------------

    def _derive_coeff(self, c: MultiPoly, var: str) -> MultiPoly:
        if var in c.variables:
            return c.partial(var)
        return c.coeff_derivative(var)

    def _iter_derive(self, c: MultiPoly, alpha) -> MultiPoly:
        for var, k in zip(self.base_vars, alpha):
            for _ in range(k):
                c = self._derive_coeff(c, var)
                if c.is_zero():
                    return c
        return c

    def __mul__(self, other):
        """Normally ordered product, via the Leibniz commutation rule."""
        if isinstance(other, MultiPoly):
            other = WeylOp.from_poly(self.base_vars, other)
        self._check(other)
        out = {}
        for g1, c1 in self.terms.items():
            for g2, c2 in other.terms.items():
                # D^g1 c2 = sum_{a <= g1} binom(g1, a) (d^a c2) D^(g1 - a)
                for alpha in _sub_multi_indices(g1):
                    d = self._iter_derive(c2, alpha)
                    if d.is_zero():
                        continue
                    binom = 1
                    for gi, ai in zip(g1, alpha):
                        binom *= math.comb(gi, ai)
                    coeff = c1 * d
                    if binom != 1:
                        coeff = coeff.scale(binom)
                    exps = tuple(g - a + h for g, a, h in zip(g1, alpha, g2))
                    prev = out.get(exps)
                    coeff = coeff if prev is None else prev + coeff
                    if coeff.is_zero():
                        out.pop(exps, None)
                    else:
                        out[exps] = coeff
        return WeylOp(self.base_vars, out)

    def apply(self, g: MultiPoly) -> MultiPoly:
        """Act on a polynomial (partials on declared variables, parameter
        derivations on coefficients)."""
        result = None
        for exps, c in self.terms.items():
            h = g
            for var, k in zip(self.base_vars, exps):
                for _ in range(k):
                    if var in h.variables:
                        h = h.partial(var)
                    else:
                        h = h.coeff_derivative(var)
                    if h.is_zero():
                        break
            if h.is_zero():
                continue
            if c.variables != h.variables:
                c = c.with_variables(h.variables)
            term = c * h
            result = term if result is None else result + term
        if result is None:
            return MultiPoly.zero(g.variables)
        return result

    def commutator(self, other) -> "WeylOp":
        return self * other - other * self

    # -- printing / serialization ----------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]),
                      reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            dmono = "*".join(
                f"d_{v}" if e == 1 else f"d_{v}^{e}"
                for v, e in zip(self.base_vars, exps) if e)
            cs = str(c)
            if not dmono:
                body = f"({cs})" if " " in cs else cs
            elif cs == "1":
                body = dmono
            else:
                body = (f"({cs})*{dmono}" if " " in cs or cs.startswith("-")
                        else f"{cs}*{dmono}")
            parts.append(body)
        return " + ".join(parts)

    def __repr__(self):
        return f"WeylOp({self.base_vars}, {str(self)!r})"

    def serialize(self):
        """Term list of (coefficient string, derivative exponent vector)."""
        return [[str(c), list(exps)] for exps, c in self.sorted_terms()]


def weyl_from_terms(base_vars, coeff_vars, params, term_list) -> WeylOp:
    """Rebuild an operator from its serialized term list."""
    from .parse import parse_poly
    terms = {}
    for cs, exps in term_list:
        terms[tuple(exps)] = parse_poly(cs, coeff_vars, params)
    return WeylOp.make(base_vars, terms)


def _sub_multi_indices(gamma):
    """All alpha with 0 <= alpha <= gamma componentwise."""
    if not gamma:
        yield ()
        return
    head, tail = gamma[0], gamma[1:]
    for a in range(head + 1):
        for rest in _sub_multi_indices(tail):
            yield (a,) + rest


# ---------------------------------------------------------------------------
# twisted operators
# ---------------------------------------------------------------------------

class TwistData:
    """The defining equations and their combined twist polynomial.

    f_j are polynomials in the x variables (coefficients may involve the
    parameters); F = sum_j y_j f_j lives in the x+y ring.
    """

    def __init__(self, x_vars, y_vars, f, params=(), invertibles=()):
        self.x_vars = tuple(x_vars)
        self.y_vars = tuple(y_vars)
        self.params = tuple(params)
        if len(y_vars) != len(f):
            raise ValueError("need exactly one y variable per equation")
        if not f:
            raise ValueError("need at least one equation")
        for fj in f:
            if fj.is_zero():
                raise ValueError("zero polynomial among the equations")
            if fj.variables != self.x_vars:
                raise ValueError("equations must be polynomials in the x variables")
        self.f = tuple(f)
        self.invertibles = tuple(invertibles)
        allv = self.x_vars + self.y_vars
        F = MultiPoly.zero(allv)
        for yj, fj in zip(self.y_vars, f):
            F = F + MultiPoly.var(allv, yj, one=self._one()) * fj.with_variables(allv)
        self.F = F

    def _one(self):
        return RatFunc.const(self.params, 1) if self.params else Fraction(1)

    @property
    def n_x(self):
        return len(self.x_vars)

    @property
    def n_eq(self):
        return len(self.y_vars)

    def all_vars(self):
        return self.x_vars + self.y_vars


def twist_x(td: TwistData, i: int) -> WeylOp:
    """d/dx_i plus multiplication by sum_j y_j df_j/dx_i."""
    if not 1 <= i <= td.n_x:
        raise ValueError(f"x index {i} out of range")
    allv = td.all_vars()
    name = td.x_vars[i - 1]
    mult = MultiPoly.zero(allv)
    for yj, fj in zip(td.y_vars, td.f):
        dfj = fj.partial(name)
        if not dfj.is_zero():
            mult = mult + MultiPoly.var(allv, yj, one=td._one()) * dfj.with_variables(allv)
    op = WeylOp.partial(allv, name, allv, one=td._one())
    return op + WeylOp.from_poly(allv, mult)


def twist_y(td: TwistData, j: int) -> WeylOp:
    """d/dy_j plus multiplication by f_j."""
    if not 1 <= j <= td.n_eq:
        raise ValueError(f"y index {j} out of range")
    allv = td.all_vars()
    name = td.y_vars[j - 1]
    op = WeylOp.partial(allv, name, allv, one=td._one())
    return op + WeylOp.from_poly(allv, td.f[j - 1].with_variables(allv))


def gauss_manin_lift(td: TwistData, param: str) -> WeylOp:
    """The parameter derivation acting on the twisted quotient:
    d/d(param) on coefficients plus multiplication by sum_j y_j f_j'."""
    if param not in td.params:
        raise ValueError(f"unknown parameter derivation {param!r}")
    allv = td.all_vars()
    mult = MultiPoly.zero(allv)
    for yj, fj in zip(td.y_vars, td.f):
        dfj = fj.coeff_derivative(param)
        if not dfj.is_zero():
            mult = mult + MultiPoly.var(allv, yj, one=td._one()) * dfj.with_variables(allv)
    op = WeylOp.partial((param,), param, allv, one=td._one())
    mult_op = WeylOp.from_poly((param,), mult)
    return op + mult_op
