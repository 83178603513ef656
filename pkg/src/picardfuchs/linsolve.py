"""Exact linear algebra over the rational-function field.

Two engines live here:

* `solve_linear` / `kernel_basis`: dense solving for small systems.
  Rows are cleared of denominators and eliminated fraction-free
  (Bareiss), then solved back over the field.

* `Echelon`: a sparse row-echelon accumulator keyed by arbitrary
  hashable "column" keys with a caller-supplied order.  It retains, for
  every stored row, the exact combination of input rows that produced
  it, so every reduction comes with a checkable witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poly import MultiPoly, divexact, grlex_key
from .ratfunc import RatFunc


@dataclass
class LinearSolution:
    consistent: bool
    solution: list | None
    rank: int
    kernel: list
    free_columns: list


def _as_field(x, params):
    if isinstance(x, RatFunc):
        return x
    return RatFunc.const(params, x)


def _field_params(matrix, rhs):
    for row in matrix:
        for x in row:
            if isinstance(x, RatFunc):
                return x.params
    for x in rhs or ():
        if isinstance(x, RatFunc):
            return x.params
    return ()


def solve_linear(matrix, rhs=None) -> LinearSolution:
    """Solve matrix * x = rhs exactly over the rational-function field.

    Returns some solution plus a kernel basis when the system is
    underdetermined; `consistent=False` reports inconsistency instead of
    raising.
    """
    params = _field_params(matrix, rhs)
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if rhs is None:
        rhs = [RatFunc.const(params, 0) for _ in range(m)]
    if len(rhs) != m:
        raise ValueError("rhs length does not match matrix")

    # clear denominators row by row, keep MultiPoly entries for Bareiss
    aug = []
    for row, b in zip(matrix, rhs):
        entries = [_as_field(x, params) for x in row] + [_as_field(b, params)]
        den = MultiPoly.const(params, Fraction(1))
        for x in entries:
            den = den * x.den
        aug.append([divexact(x.num * den, x.den) for x in entries])

    # Bareiss fraction-free forward elimination with column pivoting
    rows = aug
    pivots = []  # (row, col)
    prev = MultiPoly.const(params, Fraction(1))
    r = 0
    for c in range(n):
        pivot_row = None
        for i in range(r, m):
            if not rows[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        p = rows[r][c]
        for i in range(r + 1, m):
            if all(rows[i][j].is_zero() for j in range(c, n + 1)):
                continue
            factor = rows[i][c]
            for j in range(n + 1):
                if j == c:
                    rows[i][j] = MultiPoly.zero(p.variables)
                elif j > c:
                    rows[i][j] = divexact(
                        p * rows[i][j] - factor * rows[r][j], prev)
        pivots.append((r, c))
        prev = p
        r += 1
        if r == m:
            break

    rank = len(pivots)
    # consistency: a row with zero coefficients but nonzero rhs
    consistent = True
    for i in range(rank, m):
        if all(rows[i][j].is_zero() for j in range(n)) and not rows[i][n].is_zero():
            consistent = False
            break

    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(n) if c not in pivot_cols]

    solution = None
    if consistent:
        solution = [RatFunc.const(params, 0) for _ in range(n)]
        for (i, c) in reversed(pivots):
            acc = RatFunc(rows[i][n], MultiPoly.const(params, Fraction(1)))
            for j in range(c + 1, n):
                if not rows[i][j].is_zero():
                    acc = acc - RatFunc.from_poly(rows[i][j]) * solution[j]
            solution[c] = acc / RatFunc.from_poly(rows[i][c])

    kernel = []
    for fc in free_cols:
        vec = [RatFunc.const(params, 0) for _ in range(n)]
        vec[fc] = RatFunc.const(params, 1)
        for (i, c) in reversed(pivots):
            acc = RatFunc.const(params, 0)
            for j in range(c + 1, n):
                if not rows[i][j].is_zero():
                    acc = acc - RatFunc.from_poly(rows[i][j]) * vec[j]
            vec[c] = acc / RatFunc.from_poly(rows[i][c])
        kernel.append(vec)

    return LinearSolution(consistent=consistent, solution=solution,
                          rank=rank, kernel=kernel, free_columns=free_cols)


def rational_rank(int_matrix) -> int:
    """Rank of an integer matrix, by fraction-free elimination over Q."""
    rows = [[Fraction(x) for x in row] for row in int_matrix]
    m = len(rows)
    n = len(rows[0]) if m else 0
    rank = 0
    for c in range(n):
        piv = None
        for i in range(rank, m):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, m):
            if rows[i][c]:
                f = rows[i][c] / p
                for j in range(c, n):
                    rows[i][j] -= f * rows[rank][j]
        rank += 1
        if rank == m:
            break
    return rank


# ---------------------------------------------------------------------------
# sparse echelon with witnesses
# ---------------------------------------------------------------------------

class Echelon:
    """Sparse row echelon over a field, keyed by monomial-like keys.

    Rows are dicts {key: coefficient}.  The pivot of a row is its
    largest key under `key_order` (default graded lex).  Each stored row
    is monic at its pivot and remembers the exact combination of tagged
    input rows it came from.
    """

    def __init__(self, key_order=grlex_key, track=True):
        self.key_order = key_order
        self.track = track
        self.rows = {}      # pivot key -> row dict
        self.witness = {}   # pivot key -> {tag: coefficient}

    def __len__(self):
        return len(self.rows)

    def pivots(self):
        return set(self.rows)

    def reduce(self, vec, track=True):
        """Fully reduce vec; returns (residue, combination_over_tags)."""
        if track and not self.track:
            raise ValueError("echelon built without witness tracking")
        vec = {k: c for k, c in vec.items() if c}
        comb = {}
        while True:
            hits = [k for k in vec if k in self.rows]
            if not hits:
                return vec, comb
            k = max(hits, key=self.key_order)
            c = vec.pop(k)
            row = self.rows[k]
            for k2, c2 in row.items():
                if k2 == k:
                    continue
                prev = vec.get(k2)
                nv = -c * c2 if prev is None else prev - c * c2
                if nv:
                    vec[k2] = nv
                else:
                    vec.pop(k2, None)
            if track:
                for tag, w in self.witness[k].items():
                    prev = comb.get(tag)
                    nv = c * w if prev is None else prev + c * w
                    if nv:
                        comb[tag] = nv
                    else:
                        comb.pop(tag, None)

    def add(self, vec, tag=None) -> bool:
        """Insert a tagged row; returns True when it increased the rank."""
        residue, comb = self.reduce(vec, track=self.track)
        if not residue:
            return False
        pivot = max(residue, key=self.key_order)
        lc = residue[pivot]
        row = {k: c / lc for k, c in residue.items()}
        self.rows[pivot] = row
        if self.track:
            wit = {t: -w / lc for t, w in comb.items()}
            if tag is not None:
                wit[tag] = 1 / lc
            self.witness[pivot] = wit
        return True
