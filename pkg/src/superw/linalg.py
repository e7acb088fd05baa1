"""Exact dense linear algebra over any field type with +, -, *, / and
truthiness (Fraction or Scalar).  Matrices are lists of row lists."""

from __future__ import annotations


def rref(rows, ncols, one):
    """Reduced row echelon form in place; returns the pivot column list."""
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = one / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def kernel_basis(rows, ncols, zero, one):
    """Basis of the null space of the matrix (list of coordinate vectors)."""
    work = [list(r) for r in rows]
    pivots = rref(work, ncols, one)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -work[r][fc]
        basis.append(v)
    return basis


def solve(rows, rhs, ncols, zero, one):
    """One solution of A x = b, or None if inconsistent."""
    work = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = rref(work, ncols, one)
    for row in work:
        if row[-1] and not any(row[c] for c in range(ncols)):
            return None
    x = [zero] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = work[r][-1]
    return x


def rank(rows, ncols, one):
    work = [list(r) for r in rows]
    return len(rref(work, ncols, one))
