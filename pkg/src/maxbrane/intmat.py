"""Exact integer matrix helpers on plain nested lists.

Matrices are lists of rows of Python ints, so entries never overflow. All
transforms returned here are unimodular and are checked by the callers that
depend on them.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[int]]
Vector = list[int]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def copy(a: Sequence[Sequence[int]]) -> Matrix:
    return [list(row) for row in a]


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    # row combinations skip zero entries, which dominate in practice
    m = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * m
        for x, brow in zip(row, b):
            if x:
                acc = [s + x * y for s, y in zip(acc, brow)]
        out.append(acc)
    return out


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return [sum(x * y for x, y in zip(row, v) if x) for row in a]


def add(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Sequence[Sequence[int]], c: int) -> Matrix:
    return [[c * x for x in row] for row in a]


def columns(a: Sequence[Sequence[int]]) -> list[Vector]:
    return transpose(a)


def from_columns(cols: Sequence[Sequence[int]], nrows: int | None = None) -> Matrix:
    if not cols:
        return [[] for _ in range(nrows or 0)]
    return transpose(cols)


def block_diag(*blocks: Sequence[Sequence[int]]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def is_symmetric(a: Sequence[Sequence[int]]) -> bool:
    n = len(a)
    return all(len(row) == n for row in a) and all(
        a[i][j] == a[j][i] for i in range(n) for j in range(i + 1, n)
    )


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(u, v))


def bilinear(gram: Sequence[Sequence[int]], u: Sequence, v: Sequence):
    """u^T G v for integer or rational coordinate vectors."""
    return sum(ui * sum(g * vj for g, vj in zip(row, v)) for ui, row in zip(u, gram) if ui)


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def det(a: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(a)
    if n == 0:
        return 1
    m = copy(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def adjugate_inverse(a: Sequence[Sequence[int]]) -> tuple[Matrix, int]:
    """(R, d) with a^-1 = R / d and d > 0, by fraction-free Gauss-Jordan."""
    n = len(a)
    m = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[k], m[piv] = m[piv], m[k]
        pk = m[k]
        p = pk[k]
        for i in range(n):
            if i == k:
                continue
            row = m[i]
            f = row[k]
            if f == 0:
                if p != prev:
                    m[i] = [(x * p) // prev for x in row]
                continue
            m[i] = [(x * p - f * y) // prev for x, y in zip(row, pk)]
        prev = p
    d = prev
    sign = 1 if d > 0 else -1
    return [[sign * x for x in row[n:]] for row in m], abs(d)


def rational_inverse(a: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    r, d = adjugate_inverse(a)
    return [[Fraction(x, d) for x in row] for row in r]


def integer_inverse(a: Sequence[Sequence[int]]) -> Matrix:
    r, d = adjugate_inverse(a)
    if d != 1:
        raise ValueError("matrix is not unimodular")
    return r


def _nearest_quotient(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else 0
    return q


def column_echelon(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, int]:
    """Column-style Hermite reduction: returns (H, V, rank) with A V = H.

    V is unimodular; the first ``rank`` columns of H are independent and the
    remaining columns are zero, so the trailing columns of V form a saturated
    basis of the integer kernel of A.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    cols = transpose(a) if m else [[] for _ in range(n)]
    vcols = [[int(i == j) for i in range(n)] for j in range(n)]
    rank = 0
    for row in range(m):
        if rank == n:
            break
        while True:
            nz = [j for j in range(rank, n) if cols[j][row] != 0]
            if not nz:
                break
            p = min(nz, key=lambda j: abs(cols[j][row]))
            cols[rank], cols[p] = cols[p], cols[rank]
            vcols[rank], vcols[p] = vcols[p], vcols[rank]
            pv = cols[rank][row]
            done = True
            for j in range(rank + 1, n):
                x = cols[j][row]
                if x:
                    q = _nearest_quotient(x, pv)
                    cj, cr = cols[j], cols[rank]
                    cols[j] = [s - q * t for s, t in zip(cj, cr)]
                    vj, vr = vcols[j], vcols[rank]
                    vcols[j] = [s - q * t for s, t in zip(vj, vr)]
                    if cols[j][row]:
                        done = False
            if done:
                rank += 1
                break
    return transpose(cols) if m else [], transpose(vcols), rank


def kernel_basis(a: Sequence[Sequence[int]], ncols: int | None = None) -> list[Vector]:
    """Saturated Z-basis of {x : A x = 0} as a list of vectors."""
    if not a:
        n = ncols or 0
        return [[int(i == j) for i in range(n)] for j in range(n)]
    _, v, rank = column_echelon(a)
    vc = transpose(v)
    return [vc[j] for j in range(rank, len(vc))]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[int], Matrix, Matrix]:
    """Smith normal form with transforms.

    Returns ``(diag, U, V)`` with ``U A V = D`` where D is the m x n matrix
    carrying ``diag`` (nonnegative, each dividing the next, zeros last) on its
    diagonal and U, V unimodular.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = copy(a)
    u = identity(m)
    v = identity(n)

    def swap_rows(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst -= q * row_src
        d[dst] = [x - q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in d:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = d[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            changed = False
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(i, t, _nearest_quotient(d[i][t], d[t][t]))
                    if d[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(j, t, _nearest_quotient(d[t][j], d[t][t]))
                    if d[t][j]:
                        changed = True
            if changed:
                best = None
                for i in range(t, m):
                    if d[i][t] and (best is None or abs(d[i][t]) < best[0]):
                        best = (abs(d[i][t]), i, "r")
                for j in range(t, n):
                    if d[t][j] and (best is None or abs(d[t][j]) < best[0]):
                        best = (abs(d[t][j]), j, "c")
                if best[2] == "r":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue
            p = d[t][t]
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            # pull an offending row into row t and keep reducing
            add_row(t, bad[0], -1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    diag = [d[i][i] for i in range(min(m, n))]
    return diag, u, v


def invariant_factors(a: Sequence[Sequence[int]]) -> list[int]:
    diag, _, _ = smith_normal_form(a)
    return [x for x in diag if x != 0]


def saturation_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """Basis of (span_Q(vectors)) ∩ Z^dim."""
    if not vectors:
        return []
    # kernel of the kernel: x with y.x = 0 for all y orthogonal (euclidean) to span
    perp = kernel_basis([list(v) for v in vectors], dim)
    if not perp:
        return [[int(i == j) for i in range(dim)] for j in range(dim)]
    return kernel_basis(perp, dim)


def span_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """Z-basis of the subgroup generated by ``vectors``."""
    if not vectors:
        return []
    h, _, rank = column_echelon(from_columns(vectors))
    hc = transpose(h)
    return [hc[j] for j in range(rank)]


def complete_basis(basis: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Unimodular matrix whose first columns are ``basis`` (must be saturated)."""
    k = len(basis)
    if k == 0:
        return identity(dim)
    b = from_columns(basis)
    diag, u, _ = smith_normal_form(b)
    if any(x != 1 for x in diag[:k]):
        raise ValueError("vectors do not span a saturated sublattice")
    uinv = integer_inverse(u)
    cols = [list(c) for c in basis] + transpose(uinv)[k:]
    out = from_columns(cols)
    if abs(det(out)) != 1:
        raise ValueError("basis completion failed")
    return out


def solve_in_basis(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[Fraction] | None:
    """Rational coordinates of v in the given independent vectors, or None."""
    k = len(basis)
    n = len(v)
    rows = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, n)):
        return None
    out = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        out[c] = rows[i][k]
    return out


def random_unimodular(rng, n: int, steps: int = 12, bound: int = 2) -> Matrix:
    """Product of random elementary matrices, for property tests and fuzzing.

    ``rng`` is a ``random.Random``; entries stay small for small ``steps``.
    """
    m = identity(n)
    if n < 2:
        return [[rng.choice((1, -1))]] if n == 1 else m
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([k for k in range(-bound, bound + 1) if k])
        # row_i += c * row_j keeps det = 1
        m[i] = [x + c * y for x, y in zip(m[i], m[j])]
    if rng.random() < 0.5:
        m[0] = [-x for x in m[0]]
    return m
