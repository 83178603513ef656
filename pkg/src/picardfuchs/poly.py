"""Sparse multivariate polynomials with exact coefficients.

A polynomial is a map from exponent tuples to nonzero coefficients:

    x1^2*y1 + 3  over variables (x1, x2, y1)
        -> {(2, 0, 1): Fraction(1), (0, 0, 0): Fraction(3)}

Coefficients are `fractions.Fraction` or `ratfunc.RatFunc` (rational
functions in parameters such as lam); within one polynomial all
coefficients live in the same domain.  The zero polynomial has no terms.

The canonical term order is graded lexicographic in the declared
variable order; it drives printing, pivot selection and every
"leading monomial" notion in the package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def grlex_key(exps):
    """Sort key for graded lex: total degree first, then lex on exponents."""
    return (sum(exps), exps)


def coeff_is_zero(c) -> bool:
    return not c


def coeff_derivative(c, param: str):
    """Derivative of a scalar coefficient with respect to a parameter.

    Fractions are constants; RatFunc knows its own derivative.
    """
    deriv = getattr(c, "derivative", None)
    if deriv is None:
        return Fraction(0)
    return deriv(param)


class MultiPoly:
    """Sparse polynomial over an exact coefficient domain."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms):
        # Trusted constructor: terms must already be normalized (no zeros,
        # exponent tuples of the right length).  Use the classmethods below
        # when building from scratch.
        self.variables = tuple(variables)
        self.terms = terms

    # -- constructors -------------------------------------------------

    @classmethod
    def make(cls, variables, terms) -> "MultiPoly":
        variables = tuple(variables)
        n = len(variables)
        out = {}
        for exps, c in terms.items() if isinstance(terms, dict) else terms:
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(
                    f"exponent tuple {exps} does not match variables {variables}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if coeff_is_zero(c):
                continue
            prev = out.get(exps)
            c = c if prev is None else prev + c
            if coeff_is_zero(c):
                out.pop(exps, None)
            else:
                out[exps] = c
        return cls(variables, out)

    @classmethod
    def zero(cls, variables) -> "MultiPoly":
        return cls(tuple(variables), {})

    @classmethod
    def const(cls, variables, c) -> "MultiPoly":
        variables = tuple(variables)
        if isinstance(c, int):
            c = Fraction(c)
        if coeff_is_zero(c):
            return cls(variables, {})
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name, one=Fraction(1)) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: one})

    @classmethod
    def monomial(cls, variables, exps, c=Fraction(1)) -> "MultiPoly":
        return cls.make(variables, {tuple(exps): c})

    # -- predicates / views -------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """The coefficient of the constant term (zero-coefficient if absent)."""
        zero_exp = (0,) * len(self.variables)
        for exps, c in self.terms.items():
            if exps == zero_exp:
                return c
        return Fraction(0)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def total_degree(self) -> int:
        """Max total degree over all terms; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_on(self, names) -> int:
        """Max combined degree in the given subset of variables; -1 if zero."""
        if not self.terms:
            return -1
        idx = [self.variables.index(n) for n in names]
        return max(sum(e[i] for i in idx) for e in self.terms)

    def leading_exponents(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self):
        return self.terms[self.leading_exponents()]

    def sorted_terms(self):
        """Terms sorted descending in the canonical order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]),
                      reverse=True)

    # -- arithmetic ----------------------------------------------------

    def _check(self, other):
        if self.variables != other.variables:
            raise ValueError(
                f"variable mismatch: {self.variables} vs {other.variables}")

    def __add__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(self.variables, other)
        self._check(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            prev = out.get(exps)
            c = c if prev is None else prev + c
            if coeff_is_zero(c):
                out.pop(exps, None)
            else:
                out[exps] = c
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables,
                         {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(self.variables, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                prev = out.get(exps)
                c = c if prev is None else prev + c
                if coeff_is_zero(c):
                    out.pop(exps, None)
                else:
                    out[exps] = c
        return MultiPoly(self.variables, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        if coeff_is_zero(c):
            return MultiPoly.zero(self.variables)
        return MultiPoly(self.variables,
                         {e: c * v for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus ------------------------------------------------------

    def partial(self, name: str) -> "MultiPoly":
        """Formal partial derivative with respect to a declared variable."""
        if name not in self.variables:
            raise ValueError(f"unknown variable {name!r}")
        i = self.variables.index(name)
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            new = exps[:i] + (e - 1,) + exps[i + 1:]
            c2 = c * e
            prev = out.get(new)
            c2 = c2 if prev is None else prev + c2
            if coeff_is_zero(c2):
                out.pop(new, None)
            else:
                out[new] = c2
        return MultiPoly(self.variables, out)

    def coeff_derivative(self, param: str) -> "MultiPoly":
        """Apply a parameter derivation to every coefficient."""
        out = {}
        for exps, c in self.terms.items():
            d = coeff_derivative(c, param)
            if not coeff_is_zero(d):
                out[exps] = d
        return MultiPoly(self.variables, out)

    # -- structural helpers ---------------------------------------------

    def with_variables(self, new_variables) -> "MultiPoly":
        """Embed into a superset variable list (matching by name)."""
        new_variables = tuple(new_variables)
        pos = {}
        for i, v in enumerate(self.variables):
            if v not in new_variables:
                raise ValueError(f"variable {v!r} missing from target list")
            pos[i] = new_variables.index(v)
        n = len(new_variables)
        out = {}
        for exps, c in self.terms.items():
            new = [0] * n
            for i, e in enumerate(exps):
                new[pos[i]] = e
            out[tuple(new)] = c
        return MultiPoly(new_variables, out)

    def map_coefficients(self, fn, variables=None) -> "MultiPoly":
        variables = self.variables if variables is None else tuple(variables)
        out = {}
        for exps, c in self.terms.items():
            c2 = fn(c)
            if not coeff_is_zero(c2):
                out[exps] = c2
        return MultiPoly(variables, out)

    def evaluate(self, values: dict, coeff_map=None):
        """Evaluate at a full assignment of the variables.

        `values[name]` must live in a domain the coefficients multiply
        into; `coeff_map` optionally converts each coefficient first
        (e.g. RatFunc -> float for numeric work).
        """
        for v in self.variables:
            if v not in values:
                raise ValueError(f"no value for variable {v!r}")
        total = None
        for exps, c in self.terms.items():
            if coeff_map is not None:
                c = coeff_map(c)
            term = c
            for v, e in zip(self.variables, exps):
                if e:
                    term = term * values[v] ** e
            total = term if total is None else total + term
        if total is None:
            return Fraction(0) if coeff_map is None else 0.0
        return total

    def coefficient_of(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    # -- printing --------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.variables, exps) if e)
            cs, sign = _coeff_str(c)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            if not parts:
                parts.append(body if sign >= 0 else f"-{body}")
            else:
                parts.append(("+ " if sign >= 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.variables}, {str(self)!r})"


def _coeff_str(c):
    """Render a coefficient, pulling out a leading sign when easy."""
    if isinstance(c, (int, Fraction)):
        if c < 0:
            return str(-c), -1
        return str(c), 1
    # RatFunc and friends render themselves; parenthesize composites.
    s = str(c)
    if s.startswith("-") and not any(op in s[1:] for op in (" + ", " - ")):
        return _paren_if_needed(s[1:]), -1
    return _paren_if_needed(s), 1


def _paren_if_needed(s: str) -> str:
    if any(op in s for op in (" + ", " - ")) and not (
            s.startswith("(") and s.endswith(")")):
        return f"({s})"
    return s


# ---------------------------------------------------------------------------
# gcd machinery over Fraction coefficients (used by RatFunc reduction)
# ---------------------------------------------------------------------------

def divexact(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Exact division a / b; raises ValueError when b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if a.is_zero():
        return MultiPoly.zero(a.variables)
    a._check(b)
    if b.is_constant():
        inv = b.constant_value()
        return a.map_coefficients(lambda c: c / inv)
    rem = a
    quo = {}
    lead_b = b.leading_exponents()
    cb = b.terms[lead_b]
    while rem.terms:
        lead_r = rem.leading_exponents()
        q = tuple(x - y for x, y in zip(lead_r, lead_b))
        if any(e < 0 for e in q):
            raise ValueError("not exactly divisible")
        c = rem.terms[lead_r] / cb
        quo[q] = c
        rem = rem - b * MultiPoly.monomial(b.variables, q, c)
    return MultiPoly(a.variables, quo)


def _to_recursive(p: MultiPoly, i: int):
    """View p as a univariate polynomial in variables[i], coefficients
    in the remaining variables."""
    rest = p.variables[:i] + p.variables[i + 1:]
    buckets = {}
    for exps, c in p.terms.items():
        d = exps[i]
        rest_exp = exps[:i] + exps[i + 1:]
        buckets.setdefault(d, {})[rest_exp] = c
    return {d: MultiPoly(rest, t) for d, t in buckets.items()}, rest


def _from_recursive(rec, i, variables):
    terms = {}
    for d, coeff_poly in rec.items():
        for exps, c in coeff_poly.terms.items():
            full = exps[:i] + (d,) + exps[i:]
            terms[full] = c
    return MultiPoly(variables, terms)


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic gcd over the rationals (recursively, variable by variable)."""
    a._check(b)
    if a.is_zero():
        return _monic(b)
    if b.is_zero():
        return _monic(a)
    if a.is_constant() or b.is_constant():
        return MultiPoly.const(a.variables, Fraction(1))
    used = [i for i in range(len(a.variables))
            if any(e[i] for e in a.terms) or any(e[i] for e in b.terms)]
    if not used:
        return MultiPoly.const(a.variables, Fraction(1))
    if len(used) == 1:
        return _gcd_univariate(a, b, used[0])
    return _gcd_in_var(a, b, used[0])


def _gcd_univariate(a: MultiPoly, b: MultiPoly, i: int) -> MultiPoly:
    """Primitive PRS over the integers in the single effective variable."""
    import math
    variables = a.variables

    def to_int_dense(p):
        deg = max(e[i] for e in p.terms)
        out = [Fraction(0)] * (deg + 1)
        for e, c in p.terms.items():
            out[e[i]] = c
        scale = 1
        for c in out:
            scale = scale * c.denominator // math.gcd(scale, c.denominator)
        ints = [int(c * scale) for c in out]
        content = 0
        for c in ints:
            content = math.gcd(content, c)
        if content > 1:
            ints = [c // content for c in ints]
        return ints

    def strip(u):
        while u and not u[-1]:
            u.pop()
        return u

    def primitive(u):
        content = 0
        for c in u:
            content = math.gcd(content, c)
        if content > 1:
            return [c // content for c in u]
        return u

    fa, fb = to_int_dense(a), to_int_dense(b)
    while fb:
        # integer pseudo-remainder of fa by fb
        lead = fb[-1]
        while len(fa) >= len(fb):
            c = fa[-1]
            fa = [lead * x for x in fa]
            shift = len(fa) - len(fb)
            for k in range(len(fb)):
                fa[shift + k] -= c * fb[k]
            fa.pop()
            strip(fa)
            if not fa:
                break
        fa = primitive(fa)
        fa, fb = fb, fa
    lead = Fraction(fa[-1])
    terms = {}
    for d, c in enumerate(fa):
        if c:
            exps = [0] * len(variables)
            exps[i] = d
            terms[tuple(exps)] = c / lead
    return MultiPoly(variables, terms)


def _monic(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    lc = p.leading_coefficient()
    return p.map_coefficients(lambda c: c / lc)


def _content_and_primitive(p: MultiPoly, i: int):
    rec, rest = _to_recursive(p, i)
    content = MultiPoly.zero(rest)
    for coeff_poly in rec.values():
        content = poly_gcd(content, coeff_poly)
        if content.is_constant() and not content.is_zero():
            break
    if content.is_zero():
        content = MultiPoly.const(rest, Fraction(1))
    prim = {d: divexact(cp, content) for d, cp in rec.items()}
    return content, prim, rest


def _gcd_in_var(a: MultiPoly, b: MultiPoly, i: int) -> MultiPoly:
    variables = a.variables
    cont_a, prim_a, rest = _content_and_primitive(a, i)
    cont_b, prim_b, _ = _content_and_primitive(b, i)
    cont = poly_gcd(cont_a, cont_b)

    # primitive Euclid on the recursive representations
    fa = _from_recursive(prim_a, i, variables)
    fb = _from_recursive(prim_b, i, variables)

    def deg(p):
        return max((e[i] for e in p.terms), default=-1)

    while not fb.is_zero():
        fa_rem = _pseudo_rem(fa, fb, i)
        fa = fb
        if fa_rem.is_zero():
            fb = fa_rem
        else:
            _, prim, _ = _content_and_primitive(fa_rem, i)
            fb = _from_recursive(prim, i, variables)
    if deg(fa) == 0:
        g = cont.with_variables(variables)
    else:
        _, prim, _ = _content_and_primitive(fa, i)
        g = cont.with_variables(variables) * _from_recursive(prim, i, variables)
    return _monic(g)


def _pseudo_rem(a: MultiPoly, b: MultiPoly, i: int) -> MultiPoly:
    """Pseudo-remainder of a by b in variable i."""
    variables = a.variables

    def deg(p):
        return max((e[i] for e in p.terms), default=-1)

    def lead(p):
        d = deg(p)
        terms = {e[:i] + e[i + 1:]: c for e, c in p.terms.items() if e[i] == d}
        return MultiPoly(p.variables[:i] + p.variables[i + 1:], terms), d

    db = deg(b)
    lb, _ = lead(b)
    lb_full = lb.with_variables(variables)
    rem = a
    while not rem.is_zero() and deg(rem) >= db:
        lr, dr = lead(rem)
        shift = MultiPoly.var(variables, variables[i]) ** (dr - db)
        rem = rem * lb_full - b * shift * lr.with_variables(variables)
    return rem
