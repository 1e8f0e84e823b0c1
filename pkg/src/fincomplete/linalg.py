"""Exact linear algebra over the rationals.

All decision procedures in this package reduce to rank and kernel
computations on small matrices of ``fractions.Fraction`` entries.  Rank is
decided by Bareiss fraction-free elimination on integer-cleared rows (the
only arithmetic performed is integer multiplication and exact integer
division), kernels and linear solves use Gauss-Jordan elimination over
``Fraction``, which is likewise exact.  The two routes agree on rank by
construction; the redundancy is deliberate, rank verdicts never depend on
the code path that also produces witnesses.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Vector = tuple[Fraction, ...]


def clear_denominators(row) -> list[int]:
    """Scale a rational row to integers (does not change rank or kernel)."""
    mult = lcm(*(f.denominator for f in row)) if row else 1
    return [int(f * mult) for f in row]


def fraction_free_rank(rows) -> int:
    """Rank via Bareiss elimination; all intermediate values are integers."""
    m = [clear_denominators(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    prev = 1
    for c in range(nc):
        if rank == nr:
            break
        piv = next((i for i in range(rank, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, nr):
            for j in range(c + 1, nc):
                m[i][j] = (m[i][j] * m[rank][c] - m[i][c] * m[rank][j]) // prev
            m[i][c] = 0
        prev = m[rank][c]
        rank += 1
    return rank


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with the pivot columns, exact over Fraction.

    Pivoting is deterministic: the first row with a nonzero entry in the
    current column is used, so identical inputs give identical output.
    """
    m = [[Fraction(x) for x in r] for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def normalize_vector(vec) -> Vector:
    """Canonical representative of a rational vector up to scaling.

    Entries are scaled to coprime integers with the last nonzero entry
    positive; the zero vector is returned unchanged.  Used so kernel bases
    and reported witnesses are byte-stable.
    """
    vec = tuple(Fraction(x) for x in vec)
    if all(x == 0 for x in vec):
        return vec
    mult = lcm(*(x.denominator for x in vec))
    ints = [int(x * mult) for x in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    last_nonzero = next(v for v in reversed(ints) if v != 0)
    sign = 1 if last_nonzero > 0 else -1
    return tuple(Fraction(sign * v, g) for v in ints)


def kernel_basis(rows, width: int) -> list[Vector]:
    """Basis of {v : M v = 0}, one normalized vector per free column.

    ``width`` is the number of columns, needed when ``rows`` is empty.
    Vectors are ordered by ascending free column, giving a canonical basis.
    """
    if not rows:
        ident = []
        for j in range(width):
            v = [Fraction(0)] * width
            v[j] = Fraction(1)
            ident.append(tuple(v))
        return ident
    m, pivots = rref(rows)
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * width
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(normalize_vector(v))
    return basis


def solve(rows, rhs) -> Vector | None:
    """One exact solution of M x = b with free variables set to 0.

    Returns None when the system is inconsistent.
    """
    if not rows:
        return None
    width = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    if width in pivots:
        return None
    x = [Fraction(0)] * width
    for r, pc in enumerate(pivots):
        x[pc] = m[r][width]
    return tuple(x)


def row_space_basis(rows) -> list[Vector]:
    """Nonzero rows of the reduced echelon form (a canonical span basis)."""
    if not rows:
        return []
    m, pivots = rref(rows)
    return [tuple(m[i]) for i in range(len(pivots))]
