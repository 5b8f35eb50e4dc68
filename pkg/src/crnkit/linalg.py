"""Exact linear algebra over the rationals.

Row reduction, rank, row/null space bases and a small Fourier-Motzkin
solver for systems of linear inequalities. Everything works on lists of
``Fraction``; sizes here are tiny (a handful of species) so clarity wins
over speed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Matrix = list  # list[list[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence], ncols: Optional[int] = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = to_fraction_matrix(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    return len(rref(rows, ncols)[1])


def primitive(v: Sequence[Fraction]) -> list[Fraction]:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return v
    lead = next(x for x in ints if x != 0)
    s = 1 if lead > 0 else -1
    return [Fraction(s * x // g) for x in ints]


def row_space_basis(rows: Sequence[Sequence], ncols: int) -> Matrix:
    basis, _ = rref(rows, ncols)
    return basis


def null_space_basis(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {w : row . w = 0 for every row}, one vector per free column."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        w = [Fraction(0)] * ncols
        w[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            w[pc] = -row[f]
        basis.append(primitive(w))
    return basis


def solve_left(A: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve x A = b exactly for square nonsingular A."""
    n = len(A)
    # x A = b  <=>  A^T x^T = b^T
    aug = [[Fraction(A[j][i]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    red, pivots = rref(aug, n + 1)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n] for row in red]


def determinant(A: Sequence[Sequence]) -> Fraction:
    m = to_fraction_matrix(A)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


# -- Fourier-Motzkin -------------------------------------------------------

def _normalize(coeffs: tuple, rhs: Fraction) -> tuple[tuple, Fraction]:
    """Scale an inequality a.x >= c so its largest |a_i| is 1 (for deduplication)."""
    scale = max((abs(a) for a in coeffs), default=Fraction(0))
    if scale == 0:
        return coeffs, rhs
    return tuple(a / scale for a in coeffs), rhs / scale


def fm_solve(constraints: Sequence[tuple[Sequence, object]], nvars: int) -> Optional[list[Fraction]]:
    """Find x with a.x >= c for every (a, c), or return None if infeasible.

    Variables are eliminated last-to-first; a feasible point is recovered
    by back-substitution, choosing each variable inside its bounds (the
    midpoint when both bounds exist, otherwise the bound itself or 0).
    """
    system = []
    for a, c in constraints:
        a = tuple(Fraction(x) for x in a)
        if len(a) != nvars:
            raise ValueError("constraint has the wrong number of coefficients")
        system.append(_normalize(a, Fraction(c)))
    system = list(dict.fromkeys(system))

    stages: list[list[tuple[tuple, Fraction]]] = []
    for k in range(nvars - 1, -1, -1):
        stages.append(system)
        pos = [s for s in system if s[0][k] > 0]
        neg = [s for s in system if s[0][k] < 0]
        rest = [s for s in system if s[0][k] == 0]
        combined = list(rest)
        for ap, cp in pos:
            for an, cn in neg:
                lp, ln = ap[k], -an[k]
                a = tuple(ln * x + lp * y for x, y in zip(ap, an))
                c = ln * cp + lp * cn
                combined.append(_normalize(a, c))
        system = list(dict.fromkeys(combined))

    for a, c in system:
        if c > 0:
            return None

    x = [Fraction(0)] * nvars
    for k, stage in zip(range(nvars), reversed(stages)):
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        for a, c in stage:
            if a[k] == 0:
                continue
            partial = sum((a[j] * x[j] for j in range(k)), Fraction(0))
            bound = (c - partial) / a[k]
            if a[k] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None:
            if lo > hi:
                raise ArithmeticError("Fourier-Motzkin back-substitution failed")
            x[k] = (lo + hi) / 2
        elif lo is not None:
            x[k] = lo
        elif hi is not None:
            x[k] = hi
    for a, c in constraints:
        if sum((Fraction(ai) * xi for ai, xi in zip(a, x)), Fraction(0)) < Fraction(c):
            raise ArithmeticError("Fourier-Motzkin solution violates a constraint")
    return x
