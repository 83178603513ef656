"""The hypergeometric system attached to a point configuration.

Box operators come from lattice relations, Euler operators from the
coordinate weights of the points, and the parameter vector from the
monomial class under study.  The certificate routines verify the
annihilation statements as exact polynomial identities, which is both
cheaper and stronger than quotient-space linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import (PointConfig, RelationBasis, box_from_relation,
                      integer_kernel_basis, relation_check)
from .poly import MultiPoly
from .weyl import WeylOp


@dataclass(frozen=True)
class ClassIndex:
    u: tuple
    v: tuple

    def __post_init__(self):
        if any(x < 0 for x in self.u) or any(x < 0 for x in self.v):
            raise ValueError("class indices must be non-negative")

    @classmethod
    def of(cls, u, v) -> "ClassIndex":
        return cls(tuple(u), tuple(v))


@dataclass
class GkzSystem:
    config: PointConfig
    relations: RelationBasis
    boxes: list
    eulers: list
    beta: list


def euler_operators(config: PointConfig) -> list:
    """First-order operators sum_i w_i mu_i d_mu_i, one per coordinate weight."""
    mu = config.mu_names
    ops = []
    for k in range(1, config.n_x + config.n_eq + 1):
        terms = {}
        for idx, name in enumerate(mu):
            w = config.weight(idx, k)
            if w == 0:
                continue
            exps = tuple(1 if m == name else 0 for m in mu)
            terms[exps] = MultiPoly.var(mu, name).scale(w)
        ops.append(WeylOp.make(mu, terms))
    return ops


def beta_from_class(idx: ClassIndex) -> list:
    """Parameter vector (-(u_k+1), ..., -(v_k+1)) for the monomial class."""
    return ([Fraction(-(uk + 1)) for uk in idx.u]
            + [Fraction(-(vk + 1)) for vk in idx.v])


def gkz_generators(idx: ClassIndex, config: PointConfig) -> list:
    """Boxes plus the shifted Euler operators generating the annihilating
    left ideal of the class."""
    if len(idx.u) != config.n_x or len(idx.v) != config.n_eq:
        raise ValueError("class index shape does not match the configuration")
    basis = integer_kernel_basis(config)
    gens = [box_from_relation(config, b) for b in basis]
    shifts = [uk + 1 for uk in idx.u] + [vk + 1 for vk in idx.v]
    mu = config.mu_names
    for z, s in zip(euler_operators(config), shifts):
        gens.append(z + WeylOp.from_poly(mu, MultiPoly.const(mu, Fraction(s))))
    return gens


def build_system(idx: ClassIndex, config: PointConfig) -> GkzSystem:
    basis = integer_kernel_basis(config)
    return GkzSystem(
        config=config,
        relations=basis,
        boxes=[box_from_relation(config, b) for b in basis],
        eulers=euler_operators(config),
        beta=beta_from_class(idx),
    )


# ---------------------------------------------------------------------------
# generic-coefficient twisted operators and proof certificates
# ---------------------------------------------------------------------------

def generic_ambient_vars(config: PointConfig):
    return config.x_vars + config.y_vars + config.mu_names


def generic_f(config: PointConfig, j: int) -> MultiPoly:
    """f_j with generic coefficients: sum_i mu_{j,i} x^{d_{j,i}}."""
    allv = generic_ambient_vars(config)
    out = MultiPoly.zero(allv)
    for idx, (jj, _) in enumerate(config.pairs):
        if jj != j:
            continue
        exps = {v: 0 for v in allv}
        for v, e in zip(config.x_vars, config.monomials[idx]):
            exps[v] = e
        exps[config.mu_names[idx]] = 1
        out = out + MultiPoly.monomial(allv, tuple(exps[v] for v in allv))
    return out


def twist_x_generic(config: PointConfig, i: int) -> WeylOp:
    """d/dx_i + sum_j y_j d(f_j generic)/dx_i acting on the generic ring."""
    if not 1 <= i <= config.n_x:
        raise ValueError(f"x index {i} out of range")
    allv = generic_ambient_vars(config)
    name = config.x_vars[i - 1]
    mult = MultiPoly.zero(allv)
    for j in range(1, config.n_eq + 1):
        dfj = generic_f(config, j).partial(name)
        if not dfj.is_zero():
            mult = mult + MultiPoly.var(allv, config.y_vars[j - 1]) * dfj
    return (WeylOp.partial(allv, name, allv)
            + WeylOp.from_poly(allv, mult))


def twist_y_generic(config: PointConfig, j: int) -> WeylOp:
    if not 1 <= j <= config.n_eq:
        raise ValueError(f"y index {j} out of range")
    allv = generic_ambient_vars(config)
    return (WeylOp.partial(allv, config.y_vars[j - 1], allv)
            + WeylOp.from_poly(allv, generic_f(config, j)))


def twist_mu(config: PointConfig, j: int, i: int) -> WeylOp:
    """d/dmu_{j,i} + x^{d_{j,i}} y^{e_j}."""
    slot = config.slot(j, i)
    allv = generic_ambient_vars(config)
    mono = config.monomial_poly(slot, allv)
    return (WeylOp.partial(allv, config.mu_names[slot], allv)
            + WeylOp.from_poly(allv, mono))


def _class_monomial(config: PointConfig, idx: ClassIndex) -> MultiPoly:
    allv = generic_ambient_vars(config)
    exps = {v: 0 for v in allv}
    for v, e in zip(config.x_vars, idx.u):
        exps[v] = e
    for v, e in zip(config.y_vars, idx.v):
        exps[v] = e
    return MultiPoly.monomial(allv, tuple(exps[v] for v in allv))


@dataclass
class CertificateReport:
    description: str
    lhs: MultiPoly
    rhs: MultiPoly

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def require(self):
        if not self.holds:
            raise AssertionError(
                f"certificate failed: {self.description}\n"
                f"  lhs = {self.lhs}\n  rhs = {self.rhs}")
        return self


def euler_certificate_x(config: PointConfig, idx: ClassIndex,
                        k: int) -> CertificateReport:
    """Expand D_x_k(x_k x^u y^v) and compare with
    (u_k+1) x^u y^v + sum_{j,i} d_{j,i}(k) mu_{j,i} x^{u+d_{j,i}} y^{v+e_j}."""
    if not 1 <= k <= config.n_x:
        raise ValueError(f"x index {k} out of range")
    allv = generic_ambient_vars(config)
    base = _class_monomial(config, idx)
    arg = MultiPoly.var(allv, config.x_vars[k - 1]) * base
    lhs = twist_x_generic(config, k).apply(arg)
    rhs = base.scale(idx.u[k - 1] + 1)
    for slot in range(config.size()):
        w = config.weight(slot, k)
        if w == 0:
            continue
        shift = config.monomial_poly(slot, allv)
        mu_factor = MultiPoly.var(allv, config.mu_names[slot])
        rhs = rhs + (mu_factor * shift * base).scale(w)
    return CertificateReport(
        description=f"euler-x certificate k={k}, u={idx.u}, v={idx.v}",
        lhs=lhs, rhs=rhs)


def euler_certificate_y(config: PointConfig, idx: ClassIndex,
                        k: int) -> CertificateReport:
    """Expand D_y_k(x^u y^(v+e_k)) and compare with
    (v_k+1) x^u y^v + f_k x^u y^(v+e_k)."""
    if not 1 <= k <= config.n_eq:
        raise ValueError(f"y index {k} out of range")
    allv = generic_ambient_vars(config)
    base = _class_monomial(config, idx)
    arg = MultiPoly.var(allv, config.y_vars[k - 1]) * base
    lhs = twist_y_generic(config, k).apply(arg)
    rhs = base.scale(idx.v[k - 1] + 1) + generic_f(config, k) * arg
    return CertificateReport(
        description=f"euler-y certificate k={k}, u={idx.u}, v={idx.v}",
        lhs=lhs, rhs=rhs)


def box_annihilation_check(config: PointConfig, idx: ClassIndex,
                           b) -> CertificateReport:
    """Both derivative products of the box shift the class monomial to the
    same exponent, so their difference annihilates it."""
    if not relation_check(config, b):
        raise ValueError("vector is not a relation of the configuration")
    allv = generic_ambient_vars(config)
    base = _class_monomial(config, idx)

    def shifted(part):
        out = base
        for slot, mult in enumerate(part):
            for _ in range(mult):
                out = out * config.monomial_poly(slot, allv)
        return out

    plus = tuple(max(x, 0) for x in b)
    minus = tuple(max(-x, 0) for x in b)
    return CertificateReport(
        description=f"box annihilation b={tuple(b)}, u={idx.u}, v={idx.v}",
        lhs=shifted(plus), rhs=shifted(minus))


def scale_mu(op: WeylOp, config: PointConfig, factor: Fraction) -> WeylOp:
    """Substitute mu -> factor*mu (and d_mu -> d_mu/factor) in an operator
    over the mu ring; Euler operators are fixed points of this map."""
    mu = config.mu_names
    out = {}
    for exps, c in op.terms.items():
        scaled_terms = {}
        for pexp, coeff in c.terms.items():
            mu_deg = sum(pexp[c.variables.index(m)] for m in mu
                         if m in c.variables)
            scaled_terms[pexp] = coeff * factor ** mu_deg
        d_deg = sum(e for m, e in zip(op.base_vars, exps) if m in mu)
        poly = MultiPoly.make(c.variables, scaled_terms)
        out[exps] = poly.scale(Fraction(1) / factor ** d_deg)
    return WeylOp.make(op.base_vars, out)
