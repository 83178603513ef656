"""The twisted quotient presentation of top de Rham cohomology.

The quotient of the polynomial ring by the images of the twisted
operators D_x_i and D_y_j is finite dimensional; we present it by
truncated-degree linear algebra: every relation D(monomial) whose image
stays inside a degree box becomes an echelon row, the surviving classes
are found by a saturation search from low degree, and stability under
box doubling is the correctness signal for the truncation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .linsolve import Echelon, solve_linear
from .poly import MultiPoly, grlex_key
from .ratfunc import RatFunc
from .weyl import TwistData, WeylOp, gauss_manin_lift, twist_x, twist_y


class InstabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class DegreeBox:
    max_x_degree: int
    max_y_degree: int

    def __post_init__(self):
        if self.max_x_degree < 0 or self.max_y_degree < 0:
            raise ValueError("degree bounds must be non-negative")

    def doubled(self) -> "DegreeBox":
        return DegreeBox(2 * self.max_x_degree, 2 * self.max_y_degree)


def default_box(td: TwistData) -> DegreeBox:
    """Generous desk-scale default; correctness rests on the stability
    check, not on this heuristic."""
    max_deg = max(fj.total_degree() for fj in td.f)
    return DegreeBox((td.n_x + 1) * max_deg, td.n_x)


class CohomologySpace:
    """Echelonized presentation of the twisted quotient on a degree box."""

    def __init__(self, twist: TwistData, box: DegreeBox, track: bool = True):
        for fj in twist.f:
            if fj.total_degree() > box.max_x_degree:
                raise ValueError("box too small for the defining equations")
        self.twist = twist
        self.box = box
        self.variables = twist.all_vars()
        self._x_idx = list(range(twist.n_x))
        self._y_idx = list(range(twist.n_x, twist.n_x + twist.n_eq))
        self.ops = ([("x", i, twist_x(twist, i)) for i in
                     range(1, twist.n_x + 1)]
                    + [("y", j, twist_y(twist, j)) for j in
                       range(1, twist.n_eq + 1)])
        self.echelon = Echelon(track=track)
        self._build_relations()
        self.basis = self._discover_basis()
        self._basis_residues = {b: self._residue_of_monomial(b)
                                for b in self.basis}

    # -- box geometry ------------------------------------------------------

    def _in_box(self, exps) -> bool:
        return (sum(exps[i] for i in self._x_idx) <= self.box.max_x_degree
                and sum(exps[i] for i in self._y_idx) <= self.box.max_y_degree)

    def box_monomials(self):
        """All exponent tuples inside the box, ascending canonical order."""
        xs = _exps_total_at_most(len(self._x_idx), self.box.max_x_degree)
        ys = _exps_total_at_most(len(self._y_idx), self.box.max_y_degree)
        out = [x + y for x in xs for y in ys]
        out.sort(key=grlex_key)
        return out

    def poly_in_box(self, p: MultiPoly) -> bool:
        return all(self._in_box(e) for e in p.terms)

    def _one(self):
        return self.twist._one()

    # -- relations ------------------------------------------------------------

    def _build_relations(self):
        one = self._one()
        for exps in self.box_monomials():
            mono = MultiPoly.monomial(self.variables, exps, one)
            for kind, index, op in self.ops:
                image = op.apply(mono)
                if image.is_zero() or not self.poly_in_box(image):
                    continue
                self.echelon.add(dict(image.terms), (kind, index, exps))

    def _residue_of_monomial(self, exps):
        residue, _ = self.echelon.reduce({exps: self._one()}, track=False)
        return residue

    # -- basis discovery ---------------------------------------------------------

    def _discover_basis(self):
        kept = []
        kept_nf = Echelon()
        max_level = self.box.max_x_degree + self.box.max_y_degree
        by_level = {}
        for exps in self.box_monomials():
            by_level.setdefault(sum(exps), []).append(exps)
        for level in range(max_level + 1):
            added = False
            # spanning preference: y-free classes span the quotient, so a
            # basis drawn from them first matches the geometric picture;
            # within a group, earlier-declared variables first
            candidates = sorted(
                by_level.get(level, ()),
                key=lambda e: (any(e[i] for i in self._y_idx),
                               tuple(-x for x in e)))
            for exps in candidates:
                residue = self._residue_of_monomial(exps)
                if not residue:
                    continue
                if kept_nf.add(residue):
                    kept.append(exps)
                    added = True
            if level > 0 and not added:
                break
        return kept

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def basis_monomials(self):
        return [MultiPoly.monomial(self.variables, b, self._one())
                for b in self.basis]

    # -- normal forms ---------------------------------------------------------------

    def normal_form(self, p: MultiPoly) -> "CohomClass":
        if p.variables != self.variables:
            p = p.with_variables(self.variables)
        if not self.poly_in_box(p):
            raise ValueError("polynomial support leaves the degree box")
        residue, _ = self.echelon.reduce(dict(p.terms), track=False)
        return CohomClass(self, self._coords_of_residue(residue))

    def _coords_of_residue(self, residue):
        if not residue:
            return {}
        keys = sorted({k for r in self._basis_residues.values() for k in r}
                      | set(residue), key=grlex_key)
        matrix = [[self._basis_residues[b].get(k, None) or self._zero()
                   for b in self.basis] for k in keys]
        rhs = [residue.get(k, None) or self._zero() for k in keys]
        sol = solve_linear(matrix, rhs)
        if not sol.consistent:
            raise InstabilityError(
                "class does not reduce into the discovered basis; "
                "enlarge the degree box")
        return {b: c for b, c in zip(self.basis, sol.solution) if c}

    def _zero(self):
        one = self._one()
        return one - one

    def class_from_coords(self, coords) -> "CohomClass":
        return CohomClass(self, {b: c for b, c in coords.items() if c})

    def representative(self, cls: "CohomClass") -> MultiPoly:
        out = MultiPoly.zero(self.variables)
        for b, c in cls.coords.items():
            out = out + MultiPoly.monomial(self.variables, b, self._one()).scale(c)
        return out

    # -- differential structure ----------------------------------------------------------

    def gauss_manin_matrix(self, param: str):
        """Matrix of the parameter derivation on the basis; column j holds
        the coordinates of the image of basis class j."""
        op = gauss_manin_lift(self.twist, param)
        cols = []
        for b in self.basis:
            mono = MultiPoly.monomial(self.variables, b, self._one())
            image = op.apply(mono)
            cols.append(self.normal_form(image).coords)
        n = len(self.basis)
        zero = self._zero()
        return [[cols[j].get(self.basis[i], zero) for j in range(n)]
                for i in range(n)]

    def apply_derivation(self, cls: "CohomClass", param: str,
                         gm=None) -> "CohomClass":
        """Derivative of coordinates plus the connection matrix action."""
        if gm is None:
            gm = self.gauss_manin_matrix(param)
        n = len(self.basis)
        vec = [cls.coords.get(b, self._zero()) for b in self.basis]
        out = []
        for i in range(n):
            acc = _field_derivative(vec[i], param)
            for j in range(n):
                acc = acc + gm[i][j] * vec[j]
            out.append(acc)
        return self.class_from_coords(dict(zip(self.basis, out)))

    def dump(self):
        return {
            "basis": [_exps_str(self.variables, b) for b in self.basis],
            "box": [self.box.max_x_degree, self.box.max_y_degree],
            "rows": len(self.echelon.rows),
        }


@dataclass
class CohomClass:
    space: CohomologySpace
    coords: dict

    def __eq__(self, other):
        return (self.space is other.space and self.coords == other.coords)

    def is_zero(self):
        return not self.coords

    def scale(self, c):
        return CohomClass(self.space,
                          {b: v * c for b, v in self.coords.items() if v * c})

    def __add__(self, other):
        out = dict(self.coords)
        for b, c in other.coords.items():
            s = out.get(b)
            s = c if s is None else s + c
            if s:
                out[b] = s
            else:
                out.pop(b, None)
        return CohomClass(self.space, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __str__(self):
        if not self.coords:
            return "0"
        names = self.space.variables
        return " + ".join(
            f"({c})*[{_exps_str(names, b)}]"
            for b, c in sorted(self.coords.items(), key=lambda t: grlex_key(t[0])))


def _exps_str(names, exps):
    mono = "*".join(n if e == 1 else f"{n}^{e}"
                    for n, e in zip(names, exps) if e)
    return mono or "1"


def _field_derivative(c, param):
    if isinstance(c, RatFunc):
        return c.derivative(param)
    return Fraction(0)


def _exps_total_at_most(n, bound):
    if n == 0:
        return [()]
    out = []
    for total in range(bound + 1):
        for comp in itertools.combinations_with_replacement(range(n), total):
            exps = [0] * n
            for c in comp:
                exps[c] += 1
            out.append(tuple(exps))
    return out


# ---------------------------------------------------------------------------
# construction with stability doubling
# ---------------------------------------------------------------------------

def build_space(td: TwistData, box: DegreeBox | None = None,
                check_stability: bool = False) -> CohomologySpace:
    """Build the truncated quotient; with `check_stability`, rebuild on the
    doubled box and require the same basis and the same normal form of the
    first-variable square probe."""
    if box is None:
        box = default_box(td)
    space = CohomologySpace(td, box)
    if check_stability:
        bigger = CohomologySpace(td, box.doubled(), track=False)
        if bigger.basis != space.basis:
            raise InstabilityError(
                f"basis changed under box doubling: {space.basis} "
                f"vs {bigger.basis}")
        probe = MultiPoly.var(td.all_vars(), td.x_vars[0],
                              one=td._one()) ** 2
        if space.normal_form(probe).coords != bigger.normal_form(probe).coords:
            raise InstabilityError("normal form changed under box doubling")
        space.stability = {"stable": True,
                           "doubled_box": (bigger.box.max_x_degree,
                                           bigger.box.max_y_degree)}
    return space


# ---------------------------------------------------------------------------
# cyclic annihilator along one parameter
# ---------------------------------------------------------------------------

def cyclic_annihilator(space: CohomologySpace, cls: CohomClass, param: str,
                       max_order: int):
    """Least monic dependence among cls and its derivation iterates, as an
    operator in d/d(param); 'none up to max_order' is returned as None."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    gm = space.gauss_manin_matrix(param)
    iterates = [cls]
    for _ in range(max_order):
        iterates.append(space.apply_derivation(iterates[-1], param, gm=gm))

    basis = space.basis
    zero = space._zero()
    one = space._one()
    for m in range(1, max_order + 1):
        matrix = [[iterates[i].coords.get(b, zero) for i in range(m)]
                  for b in basis]
        rhs = [-(iterates[m].coords.get(b, zero)) for b in basis]
        sol = solve_linear(matrix, rhs)
        if not sol.consistent:
            continue
        if sol.kernel:
            raise AssertionError("dependence is not unique at minimal order")
        coeffs = sol.solution
        # verify the dependence by direct substitution
        check = iterates[m]
        for i, a in enumerate(coeffs):
            check = check + iterates[i].scale(a)
        if not check.is_zero():
            raise AssertionError("solved dependence fails substitution")
        terms = {(m,): MultiPoly.const((), one)}
        for i, a in enumerate(coeffs):
            if a:
                terms[(i,)] = MultiPoly.const((), a)
        return WeylOp.make((param,), terms)
    return None


def gm_integrability_defect(space: CohomologySpace, p1: str, p2: str):
    """d1(A2) - d2(A1) + [A1, A2]; identically zero for a flat connection."""
    a1 = space.gauss_manin_matrix(p1)
    a2 = space.gauss_manin_matrix(p2)
    n = len(space.basis)

    def deriv(mat, param):
        return [[_field_derivative(mat[i][j], param) for j in range(n)]
                for i in range(n)]

    def mul(a, b):
        return [[sum((a[i][k] * b[k][j] for k in range(n)),
                     start=space._zero()) for j in range(n)]
                for i in range(n)]

    def sub(a, b):
        return [[a[i][j] - b[i][j] for j in range(n)] for i in range(n)]

    def add(a, b):
        return [[a[i][j] + b[i][j] for j in range(n)] for i in range(n)]

    return add(sub(deriv(a2, p1), deriv(a1, p2)),
               sub(mul(a1, a2), mul(a2, a1)))


# ---------------------------------------------------------------------------
# Koszul complex ranks and the degree-lowering step
# ---------------------------------------------------------------------------

def koszul_rank(f, n: int, degree_bound: int) -> int:
    """Rank of the degree-truncated n-th cohomology of the complex whose
    differential wedges by  sum_j f_j e_j."""
    r = len(f)
    if not 0 <= n <= r:
        raise ValueError("cohomological degree out of range")
    variables = f[0].variables
    one = _one_like(f[0])

    def wedge_image(subset, exps):
        """d(x^exps e_subset) as {(subset', exps'): coeff}."""
        out = {}
        for j in range(1, r + 1):
            if j in subset:
                continue
            sign = (-1) ** sum(1 for s in subset if s < j)
            new_subset = tuple(sorted(subset + (j,)))
            fj = f[j - 1]
            for fe, fc in fj.terms.items():
                key = (new_subset,
                       tuple(a + b for a, b in zip(exps, fe)))
                c = fc * sign
                prev = out.get(key)
                c = c if prev is None else prev + c
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
        return out

    def domain(levels, deg):
        subs = list(itertools.combinations(range(1, r + 1), levels))
        monos = _exps_total_at_most(len(variables), deg)
        return [(s, e) for s in subs for e in monos]

    def key_order(key):
        subset, exps = key
        in_window = sum(exps) <= degree_bound
        return (0 if in_window else 1, grlex_key(exps), subset)

    # rank of d_n restricted to the window
    dom_n = domain(n, degree_bound)
    ech = Echelon(key_order=lambda k: (grlex_key(k[1]), k[0]))
    rank_dn = 0
    for s, e in dom_n:
        if ech.add(wedge_image(s, e)):
            rank_dn += 1
    dim_cocycles = len(dom_n) - rank_dn

    if n == 0:
        return dim_cocycles

    # boundaries inside the window: echelon with out-of-window keys first
    ech2 = Echelon(key_order=key_order)
    for s, e in domain(n - 1, degree_bound):
        ech2.add(wedge_image(s, e))
    dim_boundaries = sum(
        1 for pivot in ech2.rows if sum(pivot[1]) <= degree_bound)
    return dim_cocycles - dim_boundaries


def _one_like(p: MultiPoly):
    for c in p.terms.values():
        if isinstance(c, RatFunc):
            return RatFunc.const(c.params, 1)
        return Fraction(1)
    return Fraction(1)


def lower_y_degree(td: TwistData, mus, x_cap: int | None = None):
    """Replace the r-tuple mus by one of strictly lower top y-degree with
    the same combined D_y image, via a skew-symmetric correction solved
    from the top y-slice condition."""
    r = td.n_eq
    if len(mus) != r:
        raise ValueError("need one polynomial per equation")
    allv = td.all_vars()
    mus = [m if m.variables == allv else m.with_variables(allv) for m in mus]
    y_idx = list(range(td.n_x, td.n_x + r))
    d = max((max((sum(e[i] for i in y_idx) for e in m.terms), default=0)
             for m in mus), default=0)
    if d == 0:
        raise ValueError("top y-degree is already zero")

    def top_slice(m):
        return MultiPoly(allv, {e: c for e, c in m.terms.items()
                                if sum(e[i] for i in y_idx) == d})

    tops = [top_slice(m) for m in mus]
    total = MultiPoly.zero(allv)
    for fj, t in zip(td.f, tops):
        total = total + fj.with_variables(allv) * t
    if not total.is_zero():
        raise ValueError("top slices do not satisfy the cocycle condition")

    if x_cap is None:
        x_cap = max((m.degree_on(td.x_vars) for m in mus if not m.is_zero()),
                    default=0)

    # unknown skew eta_{jk} (j<k), y-degree exactly d, x-degree <= cap
    pairs = [(j, k) for j in range(1, r + 1) for k in range(j + 1, r + 1)]
    if not pairs:
        # r = 1: the condition forces the top slice to vanish, nothing to do
        raise ValueError("no skew correction exists for a single equation")
    y_monos = [e for e in _exps_total_at_most(r, d) if sum(e) == d]
    x_monos = _exps_total_at_most(td.n_x, x_cap)
    cells = [(p, xe, ye) for p in pairs for xe in x_monos for ye in y_monos]

    # equations: for each j, sum_k f_k eta_{jk} = top_j  (eta_{kj} = -eta_{jk})
    eq_keys = {}
    rows = []
    rhs = []

    def key_id(j, exps):
        return eq_keys.setdefault((j, exps), len(eq_keys))

    matrix_cols = {}
    for col, (p, xe, ye) in enumerate(cells):
        (a, b) = p
        eta_exps = xe + ye
        for fk_index, sign, eq_j in ((b, 1, a), (a, -1, b)):
            fk = td.f[fk_index - 1].with_variables(allv)
            for fe, fc in fk.terms.items():
                dest = tuple(x + y for x, y in zip(fe, eta_exps))
                matrix_cols.setdefault(col, {})[key_id(eq_j, dest)] = (
                    matrix_cols[col].get(key_id(eq_j, dest),
                                         _zero_like(fc)) + fc * sign)

    rhs_map = {}
    for j, t in enumerate(tops, start=1):
        for e, c in t.terms.items():
            rhs_map[key_id(j, e)] = c

    nrows = len(eq_keys)
    ncols = len(cells)
    zero = _zero_like(td._one())
    matrix = [[zero for _ in range(ncols)] for _ in range(nrows)]
    for col, entries in matrix_cols.items():
        for rid, c in entries.items():
            matrix[rid][col] = c
    rhs = [rhs_map.get(i, zero) for i in range(nrows)]
    sol = solve_linear(matrix, rhs)
    if not sol.consistent:
        raise ValueError("syzygy solve failed inside the truncation; "
                         "enlarge the x cap")

    eta = {}
    for (p, xe, ye), c in zip(cells, sol.solution):
        if c:
            eta[p] = eta.get(p, MultiPoly.zero(allv)) + MultiPoly.monomial(
                allv, xe + ye, td._one()).scale(c)

    out = []
    for j in range(1, r + 1):
        adjust = MultiPoly.zero(allv)
        for k in range(1, r + 1):
            if k == j:
                continue
            pair = (min(j, k), max(j, k))
            e = eta.get(pair)
            if e is None:
                continue
            if k < j:
                e = -e
            adjust = adjust + twist_y(td, k).apply(e)
        out.append(mus[j - 1] - adjust)
    return out


def _zero_like(c):
    return c - c
