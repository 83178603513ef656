"""Specialization of the generic hypergeometric ideal to a concrete family.

The generic annihilating ideal lives in the ring of mu-derivative
operators with polynomial mu coefficients.  Substituting the actual
f-coefficients for the mu's lands in a module (not a ring!) of
mu-derivative operators with parameter-field coefficients; parameter
derivations act on it, and the minimal monic operator whose image lies
in the specialized ideal span is the annihilator of the chosen
cohomology class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .gkz import ClassIndex, gkz_generators
from .lattice import PointConfig
from .linsolve import Echelon, solve_linear
from .poly import MultiPoly, grlex_key, poly_gcd
from .ratfunc import RatFunc
from .weyl import TwistData, WeylOp


class InstabilityError(RuntimeError):
    """Raised when doubling the truncation bounds changes the answer."""


class Specialization:
    """The evaluation mu_{j,i} -> lambda_{j,i} plus its derivation table."""

    def __init__(self, config: PointConfig, assignments, params):
        self.config = config
        self.params = tuple(params)
        self.assignments = dict(assignments)  # mu name -> RatFunc
        for name in config.mu_names:
            if name not in self.assignments:
                raise ValueError(f"no assignment for {name}")
        self.derivations = {
            p: {name: val.derivative(p)
                for name, val in self.assignments.items()}
            for p in self.params
        }

    @classmethod
    def from_twist(cls, td: TwistData, config: PointConfig) -> "Specialization":
        assignments = {}
        for slot, ((j, _), mono) in enumerate(zip(config.pairs,
                                                  config.monomials)):
            c = td.f[j - 1].terms.get(mono)
            if c is None:
                raise ValueError("configuration does not match the equations")
            if isinstance(c, Fraction):
                c = RatFunc.const(td.params, c)
            assignments[config.mu_names[slot]] = c
        return cls(config, assignments, td.params)

    def one(self) -> RatFunc:
        return RatFunc.const(self.params, 1)

    def zero(self) -> RatFunc:
        return RatFunc.const(self.params, 0)

    def values(self):
        return [self.assignments[m] for m in self.config.mu_names]

    def active_slots(self, param: str):
        """Indices whose assignment actually moves under d/d(param)."""
        table = self.derivations[param]
        return [i for i, m in enumerate(self.config.mu_names)
                if not table[m].is_zero()]


class SpecializedOperator:
    """Finite sum of mu-derivative monomials with parameter-field
    coefficients.  These come from specializing operators or from
    parameter derivations; there is deliberately no product here."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms):
        self.n = n
        self.terms = {k: c for k, c in terms.items() if c}

    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def unit(cls, n, one):
        return cls(n, {(0,) * n: one})

    def order(self):
        if not self.terms:
            return -1
        return max(sum(k) for k in self.terms)

    def __eq__(self, other):
        if not isinstance(other, SpecializedOperator):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            prev = out.get(k)
            c = c if prev is None else prev + c
            if c:
                out[k] = c
            else:
                out.pop(k, None)
        return SpecializedOperator(self.n, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return SpecializedOperator(self.n,
                                   {k: v * c for k, v in self.terms.items()})

    def render(self, mu_names):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=grlex_key, reverse=True):
            mono = "*".join(f"d_{m}" if e == 1 else f"d_{m}^{e}"
                            for m, e in zip(mu_names, k) if e)
            c = str(self.terms[k])
            wrapped = f"({c})" if (" " in c or "/" in c) else c
            parts.append(f"{wrapped}*{mono}" if mono and c != "1"
                         else (mono or c))
        return " + ".join(parts)


def specialize_operator(op: WeylOp, spec: Specialization) -> SpecializedOperator:
    """Evaluate the left mu-coefficients of a mu-derivative operator."""
    mu = spec.config.mu_names
    if op.base_vars != mu:
        raise ValueError("operator is not over the mu variables")
    values = dict(zip(mu, spec.values()))
    out = {}
    for exps, c in op.terms.items():
        if c.variables != mu:
            c = c.with_variables(mu)
        val = c.evaluate(values)
        if isinstance(val, Fraction):
            val = RatFunc.const(spec.params, val)
        if val:
            out[exps] = val
    return SpecializedOperator(len(mu), out)


def _derivation_step(s: SpecializedOperator, spec: Specialization,
                     param: str) -> SpecializedOperator:
    """One application of a parameter derivation to a specialized operator:
    differentiate the coefficients, plus shift by d_mu for every slot whose
    assigned value moves."""
    table = spec.derivations[param]
    mu = spec.config.mu_names
    out = {}

    def accumulate(key, c):
        if not c:
            return
        prev = out.get(key)
        c = c if prev is None else prev + c
        if c:
            out[key] = c
        else:
            out.pop(key, None)

    for k, c in s.terms.items():
        accumulate(k, c.derivative(param))
        for slot, name in enumerate(mu):
            d = table[name]
            if d.is_zero():
                continue
            shifted = k[:slot] + (k[slot] + 1,) + k[slot + 1:]
            accumulate(shifted, c * d)
    return SpecializedOperator(s.n, out)


def derivation_image(op: WeylOp, spec: Specialization) -> SpecializedOperator:
    """Image of a parameter-derivation operator in the specialized module,
    i.e. the operator applied to the unit element."""
    for v in op.base_vars:
        if v not in spec.params:
            raise ValueError(f"{v!r} is not a declared parameter")
    n = len(spec.config.mu_names)
    result = SpecializedOperator.zero(n)
    for exps, c in op.terms.items():
        s = SpecializedOperator.unit(n, spec.one())
        for param, k in zip(op.base_vars, exps):
            for _ in range(k):
                s = _derivation_step(s, spec, param)
        if not c.is_constant():
            raise ValueError("coefficients must be parameter functions")
        val = c.constant_value()
        if isinstance(val, Fraction):
            val = RatFunc.const(spec.params, val)
        result = result + s.scale(val)
    return result


# ---------------------------------------------------------------------------
# the truncated specialized ideal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpanWitness:
    """A row of the span: the specialization of  D_mu^beta * generator."""
    beta: tuple
    gen_index: int


class IdealSpan:
    """Echelonized span of specializations of left multiples of the
    generators, up to a derivative-order bound.

    Left multiplication by mu-monomials only rescales a specialized row
    by the (invertible) assigned values, so derivative monomials alone
    generate the span; the mu-degree bound is kept for interface
    validation.
    """

    def __init__(self, gens, spec: Specialization, mu_degree_bound: int,
                 del_order_bound: int, track: bool = True):
        self.spec = spec
        self.gens = list(gens)
        self.mu_degree_bound = mu_degree_bound
        self.del_order_bound = del_order_bound
        n = len(spec.config.mu_names)
        self.n = n
        max_gen_order = max((g.order() for g in self.gens), default=0)
        max_gen_mu = max((c.total_degree() for g in self.gens
                          for c in g.terms.values()), default=0)
        if del_order_bound < 0 or mu_degree_bound < 0:
            raise ValueError("bounds must be non-negative")
        if mu_degree_bound < max_gen_mu:
            raise ValueError(
                f"mu degree bound {mu_degree_bound} below generator degree "
                f"{max_gen_mu}")
        self.work_order = del_order_bound + max_gen_order
        self.echelon = Echelon(track=track)
        self.witnesses = {}
        self._build()

    def _build(self):
        tag = 0
        for beta in _multi_indices_upto(self.n, self.del_order_bound):
            dmono = WeylOp.make(
                self.spec.config.mu_names,
                {tuple(beta): MultiPoly.const(self.spec.config.mu_names,
                                              Fraction(1))})
            for gi, g in enumerate(self.gens):
                product = dmono * g
                row = specialize_operator(product, self.spec)
                if not row.terms:
                    continue
                self.witnesses[tag] = SpanWitness(beta=tuple(beta),
                                                  gen_index=gi)
                self.echelon.add(dict(row.terms), tag)
                tag += 1

    # -- queries -------------------------------------------------------------

    def reduce(self, op: SpecializedOperator, track=True):
        """(residue terms, witness combination over span rows)."""
        if op.order() > self.work_order:
            raise ValueError("operator order exceeds the span truncation")
        return self.echelon.reduce(dict(op.terms), track=track)

    def membership(self, op: SpecializedOperator):
        """Exact combination over the tagged rows when op lies in the span;
        None otherwise (a refusal at this bound proves nothing)."""
        residue, comb = self.reduce(op)
        if residue:
            return None
        return {self.witnesses[t]: c for t, c in comb.items()}

    def recombine(self, witness) -> SpecializedOperator:
        """Rebuild  sum coeff * specialize(D^beta * gen)  from a witness."""
        total = SpecializedOperator.zero(self.n)
        mu = self.spec.config.mu_names
        one = MultiPoly.const(mu, Fraction(1))
        for w, c in witness.items():
            dmono = WeylOp.make(mu, {w.beta: one})
            row = specialize_operator(dmono * self.gens[w.gen_index],
                                      self.spec)
            total = total + row.scale(c)
        return total

    def normal_form(self, op: SpecializedOperator) -> dict:
        residue, _ = self.reduce(op, track=False)
        return residue


def _multi_indices_upto(n, bound):
    for total in range(bound + 1):
        for comp in itertools.combinations_with_replacement(range(n), total):
            exps = [0] * n
            for c in comp:
                exps[c] += 1
            yield tuple(exps)


def _preferred_candidates(span: IdealSpan, level: int):
    """Candidate derivative monomials of a given total order, monomials in
    the derivation-active slots first.  Normal forms of parameter
    derivations live in those slots, so a basis drawn from them matches
    the worked reductions of the family."""
    n = span.n
    active = set()
    for p in span.spec.params:
        active.update(span.spec.active_slots(p))
    preferred, rest = [], []
    for exps in _multi_indices_upto(n, level):
        if sum(exps) != level:
            continue
        if all(e == 0 or i in active for i, e in enumerate(exps)):
            preferred.append(exps)
        else:
            rest.append(exps)
    # within a level, earlier-declared slots first (descending lex)
    preferred.sort(key=grlex_key, reverse=True)
    rest.sort(key=grlex_key, reverse=True)
    return preferred + rest


def star_quotient_basis(gens, spec: Specialization, bounds,
                        check_stability: bool = True):
    """Monomial basis of the specialized-module quotient at the truncation.

    Saturation search: walk derivative orders upward, keep monomials whose
    normal forms are independent of everything kept so far, stop after the
    first order that contributes nothing.  With `check_stability` the run
    is repeated at doubled bounds and must reproduce the same basis.
    """
    mu_bound, del_bound = bounds
    basis = _quotient_basis_once(gens, spec, mu_bound, del_bound)
    report = {"bounds": (mu_bound, del_bound), "stable": None}
    if check_stability:
        doubled = _quotient_basis_once(gens, spec, 2 * mu_bound,
                                       2 * del_bound)
        report["stable"] = doubled == basis
        report["doubled_bounds"] = (2 * mu_bound, 2 * del_bound)
        if not report["stable"]:
            raise InstabilityError(
                f"quotient basis changed under doubled bounds: "
                f"{basis} vs {doubled}")
    return basis, report


def _quotient_basis_once(gens, spec, mu_bound, del_bound):
    span = IdealSpan(gens, spec, mu_bound, del_bound, track=False)
    return _basis_from_span(span)


def _basis_from_span(span: IdealSpan):
    kept = []            # chosen monomials
    kept_nf = Echelon()  # span of their normal forms
    level = 0
    while level <= span.work_order:
        added = False
        for exps in _preferred_candidates(span, level):
            vec = {exps: span.spec.one()}
            residue, _ = span.echelon.reduce(vec, track=False)
            if not residue:
                continue
            if kept_nf.add(residue):
                kept.append(exps)
                added = True
        if level > 0 and not added:
            break
        level += 1
    return kept


# ---------------------------------------------------------------------------
# minimal monic annihilator
# ---------------------------------------------------------------------------

@dataclass
class AnnihilatorResult:
    operator: WeylOp
    order: int
    param: str
    witness: dict
    denominator_ok: bool


def minimal_annihilator(config: PointConfig, idx: ClassIndex,
                        spec: Specialization, param: str, max_order: int,
                        mu_degree_bound=None, del_order_bound=None,
                        invertibles=()):
    """Search orders 1..max_order for the monic parameter-derivation
    operator whose image lies in the specialized ideal span; returns an
    AnnihilatorResult or None."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    gens = gkz_generators(idx, config)
    if mu_degree_bound is None:
        mu_degree_bound = max((c.total_degree() for g in gens
                               for c in g.terms.values()), default=1)

    n = len(spec.config.mu_names)
    dop = WeylOp.partial((param,), param, (), one=spec.one())
    images = [SpecializedOperator.unit(n, spec.one())]
    op_power = WeylOp.from_poly((param,), MultiPoly.const((), spec.one()))
    for _ in range(max_order):
        op_power = dop * op_power
        images.append(derivation_image(op_power, spec))

    span = None
    for m in range(1, max_order + 1):
        # grow the span only as far as the current candidate order needs
        want = del_order_bound if del_order_bound is not None else max(2, m)
        if span is None or span.del_order_bound < want:
            span = IdealSpan(gens, spec, mu_degree_bound, want)
        residues = [span.normal_form(img) for img in images[:m + 1]]
        keys = sorted({k for r in residues for k in r}, key=grlex_key)
        matrix = [[residues[i].get(k, spec.zero()) for i in range(m)]
                  for k in keys]
        rhs = [-residues[m].get(k, spec.zero()) for k in keys]
        if not keys:
            matrix, rhs = [[spec.zero()] * m], [spec.zero()]
        sol = solve_linear(matrix, rhs)
        if not sol.consistent:
            continue
        if sol.kernel:
            raise AssertionError(
                "non-unique annihilator coefficients at minimal order")
        coeffs = sol.solution
        terms = {(m,): MultiPoly.const((), spec.one())}
        for i, a in enumerate(coeffs):
            if a:
                terms[(i,)] = MultiPoly.const((), a)
        operator = WeylOp.make((param,), terms)
        image = derivation_image(operator, spec)
        witness = span.membership(image)
        if witness is None:
            raise AssertionError("solved coefficients failed the span check")
        check = span.recombine(witness)
        if check != image:
            raise AssertionError("membership witness does not recombine")
        ok = all(_denominator_ok(a, invertibles, spec.params)
                 for a in coeffs)
        return AnnihilatorResult(operator=operator, order=m, param=param,
                                 witness=witness, denominator_ok=ok)
    return None


def _denominator_ok(value: RatFunc, invertibles, params) -> bool:
    """Every irreducible factor of the denominator must divide the declared
    invertible elements of the coefficient ring."""
    if not invertibles:
        return value.den.is_constant()
    den = value.den
    product = MultiPoly.const(tuple(params), Fraction(1))
    for p in invertibles:
        product = product * p
    while not den.is_constant():
        g = poly_gcd(den, product)
        if g.is_constant():
            return False
        from .poly import divexact
        den = divexact(den, g)
    return True
