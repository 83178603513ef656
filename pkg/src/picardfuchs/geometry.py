"""Complete-intersection geometry helpers.

Jacobian minors and the orientation sign fix the local representatives
of the cohomology classes; the smoothness certificate tries to exhibit
1 in the ideal generated by the equations and all maximal minors, which
witnesses that the family has no singular points over the parameter
field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .poly import MultiPoly, divexact, grlex_key
from .ratfunc import RatFunc
from .weyl import TwistData


@dataclass(frozen=True)
class Chart:
    """A strictly increasing r-subset of the x indices, selecting the
    minor that must be invertible on the chart."""
    indices: tuple

    def __post_init__(self):
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError("chart indices must be strictly increasing")

    @classmethod
    def of(cls, *indices):
        return cls(tuple(indices))


def jacobian_minor(td: TwistData, chart: Chart) -> MultiPoly:
    """det [ df_j / dx_{i_k} ]  over the chart columns."""
    r = td.n_eq
    if len(chart.indices) != r:
        raise ValueError(f"chart must pick exactly {r} indices")
    for i in chart.indices:
        if not 1 <= i <= td.n_x:
            raise ValueError(f"chart index {i} out of range")
    rows = [[td.f[j].partial(td.x_vars[i - 1]) for i in chart.indices]
            for j in range(r)]
    return _det(rows, td.x_vars, td._one())


def _det(rows, variables, one):
    n = len(rows)
    if n == 0:
        return MultiPoly.const(variables, one)
    if n == 1:
        return rows[0][0]
    out = MultiPoly.zero(variables)
    for k in range(n):
        minor = [[rows[i][c] for c in range(n) if c != k]
                 for i in range(1, n)]
        term = rows[0][k] * _det(minor, variables, one)
        out = out + (term if k % 2 == 0 else -term)
    return out


def sign_sigma(n_x: int, chart: Chart) -> int:
    """Sign making  (complement wedge chart)  match the standard volume
    order.  Each chart index i_k must move left past the complement
    indices above it, giving (-1)^(sum_k (n_x - i_k - (r - k)))."""
    r = len(chart.indices)
    for i in chart.indices:
        if not 1 <= i <= n_x:
            raise ValueError(f"chart index {i} out of range")
    s = sum((n_x - i) - (r - (k + 1)) for k, i in enumerate(chart.indices))
    return -1 if s % 2 else 1


def sign_sigma_bruteforce(n_x: int, chart: Chart) -> int:
    """Same sign by explicitly sorting the concatenated index list and
    counting inversions; used to validate the closed form."""
    complement = [i for i in range(1, n_x + 1) if i not in chart.indices]
    seq = complement + list(chart.indices)
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


@dataclass
class LocalForm:
    """Reporting metadata for the chart representative of a class: the
    monomial numerator, the chart, its orientation sign and Jacobian."""
    u: tuple
    chart: Chart
    sign: int
    jacobian: MultiPoly
    complement: tuple

    def __str__(self):
        mono = "*".join(f"x{k + 1}^{e}" if e != 1 else f"x{k + 1}"
                        for k, e in enumerate(self.u) if e) or "1"
        wedge = "^".join(f"dx{i}" for i in self.complement) or "1"
        s = "-" if self.sign < 0 else ""
        return f"{s}{mono}/({self.jacobian}) {wedge}"


def local_form(td: TwistData, u, chart: Chart) -> LocalForm:
    jac = jacobian_minor(td, chart)
    complement = tuple(i for i in range(1, td.n_x + 1)
                       if i not in chart.indices)
    return LocalForm(u=tuple(u), chart=chart,
                     sign=sign_sigma(td.n_x, chart), jacobian=jac,
                     complement=complement)


# ---------------------------------------------------------------------------
# smoothness certificate: is 1 in (f_1..f_r, all maximal minors)?
# ---------------------------------------------------------------------------

@dataclass
class SmoothnessCertificate:
    found: bool
    cofactors: list | None      # aligned with the generator list
    generators: list

    def recombine(self) -> MultiPoly | None:
        if not self.found:
            return None
        total = MultiPoly.zero(self.generators[0].variables)
        for c, g in zip(self.cofactors, self.generators):
            total = total + c * g
        return total


def smoothness_certificate(td: TwistData,
                           degree_cap: int | None = None) -> SmoothnessCertificate:
    """Degree-capped Buchberger run on (f_j, J_chart); success means the
    unit ideal, i.e. no common zero of the equations and all minors.
    Failure is only "inconclusive"."""
    gens = list(td.f)
    for chart_indices in itertools.combinations(range(1, td.n_x + 1),
                                                td.n_eq):
        jac = jacobian_minor(td, Chart(tuple(chart_indices)))
        if not jac.is_zero():
            gens.append(jac)
    if degree_cap is None:
        degree_cap = 2 * max(g.total_degree() for g in gens) + 2
    if degree_cap < max(g.total_degree() for g in gens):
        raise ValueError("degree cap below the generator degrees")
    found, cofactors = _unit_in_ideal(gens, degree_cap)
    return SmoothnessCertificate(found=found, cofactors=cofactors,
                                 generators=gens)


def _lead(p: MultiPoly):
    return p.leading_exponents()


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _reduce_tracked(p, cof, basis):
    """Full reduction of p by the tracked basis; cofactor lists updated."""
    p = p
    changed = True
    while changed and not p.is_zero():
        changed = False
        lead_p = _lead(p)
        for g, gcof in basis:
            lead_g = _lead(g)
            if _divides(lead_g, lead_p):
                q = tuple(a - b for a, b in zip(lead_p, lead_g))
                c = p.terms[lead_p] / g.terms[lead_g]
                mono = MultiPoly.monomial(p.variables, q, c)
                p = p - g * mono
                cof = [a - b * mono for a, b in zip(cof, gcof)]
                changed = True
                break
    return p, cof


def _unit_in_ideal(gens, degree_cap):
    variables = gens[0].variables
    ngens = len(gens)

    def unit_vec(i):
        return [MultiPoly.const(variables, Fraction(1)) if k == i
                else MultiPoly.zero(variables) for k in range(ngens)]

    basis = []
    for i, g in enumerate(gens):
        red, cof = _reduce_tracked(g, unit_vec(i), basis)
        if red.is_zero():
            continue
        if red.is_constant():
            inv = red.constant_value()
            return True, [c.scale(1 / inv) for c in cof]
        basis.append((red, cof))

    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    seen = set(pairs)
    while pairs:
        # deterministic queue: smallest lcm degree first
        pairs.sort(key=lambda ij: _pair_key(basis, ij))
        i, j = pairs.pop(0)
        gi, ci = basis[i]
        gj, cj = basis[j]
        li, lj = _lead(gi), _lead(gj)
        lcm = tuple(max(a, b) for a, b in zip(li, lj))
        if sum(lcm) > degree_cap:
            continue
        mi = MultiPoly.monomial(variables,
                                tuple(a - b for a, b in zip(lcm, li)),
                                1 / gi.terms[li])
        mj = MultiPoly.monomial(variables,
                                tuple(a - b for a, b in zip(lcm, lj)),
                                1 / gj.terms[lj])
        s = gi * mi - gj * mj
        scof = [a * mi - b * mj for a, b in zip(ci, cj)]
        red, cof = _reduce_tracked(s, scof, basis)
        if red.is_zero():
            continue
        if red.is_constant():
            inv = red.constant_value()
            return True, [c.scale(1 / inv) for c in cof]
        basis.append((red, cof))
        k = len(basis) - 1
        for t in range(k):
            if (k, t) not in seen:
                pairs.append((k, t))
                seen.add((k, t))
    return False, None


def _pair_key(basis, ij):
    i, j = ij
    li, lj = _lead(basis[i][0]), _lead(basis[j][0])
    lcm = tuple(max(a, b) for a, b in zip(li, lj))
    return (sum(lcm), lcm, i, j)
