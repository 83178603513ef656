"""Integer linear algebra for the point configuration of a family.

Each monomial x^d appearing in f_j contributes the lattice point
(d, e_j) in Z^(N+r).  The group of integer relations among these points
is the kernel of the matrix whose columns are the points; its basis
vectors turn into the two-term constant-coefficient "box" operators of
the hypergeometric system.
"""

from __future__ import annotations

from fractions import Fraction

from .linsolve import rational_rank
from .poly import MultiPoly
from .weyl import TwistData, WeylOp


class PointConfig:
    """Lattice points (d_{j,i}, e_j) with a canonical flattened indexing."""

    def __init__(self, n_x, deltas, points, pairs, monomials, x_vars, y_vars):
        self.n_x = n_x
        self.n_eq = len(deltas)
        self.deltas = tuple(deltas)
        self.points = [tuple(p) for p in points]   # vectors in Z^(N+r)
        self.pairs = list(pairs)                   # flattened (j, i), 1-based
        self.monomials = [tuple(m) for m in monomials]  # the d-parts
        self.x_vars = tuple(x_vars)
        self.y_vars = tuple(y_vars)
        self.mu_names = tuple(f"mu{k + 1}" for k in range(len(points)))
        for (j, _), p in zip(self.pairs, self.points):
            e = p[self.n_x:]
            expected = tuple(1 if t == j - 1 else 0 for t in range(self.n_eq))
            if e != expected:
                raise ValueError("y-part of a point is not a unit vector")
            if any(c < 0 for c in p[:self.n_x]):
                raise ValueError("negative exponent in point configuration")

    @classmethod
    def from_twist(cls, td: TwistData) -> "PointConfig":
        n_x, r = td.n_x, td.n_eq
        points, pairs, monomials = [], [], []
        deltas = []
        for j, fj in enumerate(td.f, start=1):
            # canonical enumeration within an equation: descending lex with
            # the last x variable most significant (matches reading a curve
            # like  x2^2 - x1^3 + ...  left to right)
            exps = sorted(fj.terms, key=lambda e: tuple(reversed(e)),
                          reverse=True)
            deltas.append(len(exps))
            for i, d in enumerate(exps, start=1):
                e = tuple(1 if t == j - 1 else 0 for t in range(r))
                points.append(tuple(d) + e)
                pairs.append((j, i))
                monomials.append(tuple(d))
        return cls(n_x, deltas, points, pairs, monomials, td.x_vars, td.y_vars)

    def size(self) -> int:
        return len(self.points)

    def weight(self, point_index: int, k: int) -> int:
        """k-th coordinate (1-based) of the point, 1..N for x-degrees and
        N+1..N+r for the equation indicator."""
        return self.points[point_index][k - 1]

    def slot(self, j: int, i: int) -> int:
        """Flattened 0-based index of the pair (j, i)."""
        try:
            return self.pairs.index((j, i))
        except ValueError:
            raise ValueError(f"invalid index pair ({j}, {i})") from None

    def monomial_poly(self, point_index: int, variables, one=Fraction(1)):
        """x^d * y^(e_j) as a polynomial in the given ambient variables."""
        exps = {v: 0 for v in variables}
        for v, e in zip(self.x_vars, self.monomials[point_index]):
            exps[v] = e
        j = self.pairs[point_index][0]
        exps[self.y_vars[j - 1]] = 1
        tup = tuple(exps[v] for v in variables)
        return MultiPoly.monomial(variables, tup, one)


class RelationBasis:
    """Z-basis of the relation lattice, sign-normalized and sorted."""

    def __init__(self, config: PointConfig, vectors):
        self.config = config
        self.vectors = [tuple(v) for v in vectors]
        for v in self.vectors:
            if not relation_check(config, v):
                raise ValueError(f"{v} is not a relation of the configuration")

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)


def relation_check(config: PointConfig, b) -> bool:
    """True when sum_k b_k * point_k = 0."""
    b = tuple(b)
    if len(b) != config.size():
        raise ValueError("relation vector has the wrong length")
    dim = config.n_x + config.n_eq
    for c in range(dim):
        if sum(bk * p[c] for bk, p in zip(b, config.points)):
            return False
    return True


def _hnf_kernel(columns):
    """Kernel basis of the integer matrix with the given columns.

    Column-style Hermite reduction: apply unimodular column operations
    until every row has at most one surviving pivot; the transformed
    columns that became zero give the kernel.
    """
    ncols = len(columns)
    if ncols == 0:
        return []
    dim = len(columns[0])
    work = [list(c) for c in columns]
    unim = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def col_op(dst, src, q):
        for t in range(dim):
            work[dst][t] -= q * work[src][t]
        for t in range(ncols):
            unim[dst][t] -= q * unim[src][t]

    def col_swap(a, b):
        work[a], work[b] = work[b], work[a]
        unim[a], unim[b] = unim[b], unim[a]

    pivot_col = 0
    for row in range(dim):
        # euclidean reduction of this row across columns >= pivot_col
        while True:
            nonzero = [c for c in range(pivot_col, ncols) if work[c][row]]
            if len(nonzero) <= 1:
                break
            nonzero.sort(key=lambda c: abs(work[c][row]))
            small = nonzero[0]
            for c in nonzero[1:]:
                q = work[c][row] // work[small][row]
                col_op(c, small, q)
        nonzero = [c for c in range(pivot_col, ncols) if work[c][row]]
        if nonzero:
            col_swap(pivot_col, nonzero[0])
            if work[pivot_col][row] < 0:
                for t in range(dim):
                    work[pivot_col][t] = -work[pivot_col][t]
                for t in range(ncols):
                    unim[pivot_col][t] = -unim[pivot_col][t]
            pivot_col += 1
            if pivot_col == ncols:
                break
    kernel = []
    for c in range(pivot_col, ncols):
        if all(work[c][t] == 0 for t in range(dim)):
            kernel.append(tuple(unim[c]))
    return kernel


def _normalize_sign(v):
    """Make the entry of largest absolute value positive (first such on ties);
    this reproduces the usual display of the box operators."""
    if all(x == 0 for x in v):
        return tuple(v)
    big = max(abs(x) for x in v)
    lead = next(x for x in v if abs(x) == big)
    if lead < 0:
        return tuple(-x for x in v)
    return tuple(v)


def integer_kernel_basis(config: PointConfig) -> RelationBasis:
    """Z-basis of the relation lattice, computed by Hermite reduction."""
    if config.size() == 0:
        raise ValueError("empty point configuration")
    raw = _hnf_kernel(config.points)
    vectors = sorted(_normalize_sign(v) for v in raw)

    # cross-check: cardinality must match the rational kernel dimension,
    # and the basis must be primitive (unit elementary divisors)
    expected = config.size() - rational_rank(
        [[p[t] for p in config.points] for t in range(config.n_x + config.n_eq)])
    if len(vectors) != expected:
        raise AssertionError("kernel basis has wrong cardinality")
    if vectors and not _is_primitive(vectors):
        raise AssertionError("kernel basis is not saturated")
    return RelationBasis(config, vectors)


def _is_primitive(vectors) -> bool:
    """Check that the HNF of the basis matrix has all pivots equal to 1."""
    work = _hnf_rows([list(v) for v in vectors])
    pivots = []
    for row in work:
        nz = [x for x in row if x]
        if nz:
            pivots.append(abs(nz[0]))
    return all(p == 1 for p in pivots)


def _hnf_rows(rows):
    if not rows:
        return rows
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        while True:
            nonzero = [i for i in range(r, len(rows)) if rows[i][c]]
            if len(nonzero) <= 1:
                break
            nonzero.sort(key=lambda i: abs(rows[i][c]))
            small = nonzero[0]
            for i in nonzero[1:]:
                q = rows[i][c] // rows[small][c]
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[small])]
        nonzero = [i for i in range(r, len(rows)) if rows[i][c]]
        if nonzero:
            rows[r], rows[nonzero[0]] = rows[nonzero[0]], rows[r]
            if rows[r][c] < 0:
                rows[r] = [-a for a in rows[r]]
            r += 1
            if r == len(rows):
                break
    return rows


def box_from_relation(config: PointConfig, b) -> WeylOp:
    """The two-term operator  prod_{b>0} D_mu^b - prod_{b<0} D_mu^(-b)."""
    b = tuple(b)
    if len(b) != config.size():
        raise ValueError("relation vector has the wrong length")
    mu = config.mu_names
    plus = tuple(max(x, 0) for x in b)
    minus = tuple(max(-x, 0) for x in b)
    one = MultiPoly.const(mu, Fraction(1))
    op = WeylOp.make(mu, {plus: one})
    return op - WeylOp.make(mu, {minus: one})
