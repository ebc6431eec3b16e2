"""Free abelian groups with an involution and their Comessatti characteristic.

Matrices act on column vectors: column j of ``sigma`` holds the coordinates
of sigma(b_j).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from . import f2, intmat
from .errors import PreconditionError, check
from .lattice import BilinearModule, Gram, IntegerLattice, parse_int_matrix, restrict


def _freeze(m: Sequence[Sequence[int]]) -> Gram:
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class InvolutiveModule:
    sigma: Gram
    gram: Gram | None = None

    def __post_init__(self) -> None:
        s = _freeze(self.sigma)
        object.__setattr__(self, "sigma", s)
        n = len(s)
        if n == 0 or any(len(r) != n for r in s):
            raise PreconditionError("sigma must be a non-empty square matrix")
        if intmat.matmul(s, s) != intmat.identity(n):
            raise PreconditionError("sigma does not square to the identity")
        if self.gram is not None:
            g = _freeze(self.gram)
            object.__setattr__(self, "gram", g)
            if len(g) != n or not intmat.is_symmetric(g):
                raise PreconditionError("gram must be symmetric of the same size as sigma")
            if intmat.matmul(intmat.matmul(intmat.transpose(s), g), s) != [list(r) for r in g]:
                raise PreconditionError("sigma is not an isometry of the given form")

    @property
    def rank(self) -> int:
        return len(self.sigma)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(intmat.matvec(self.sigma, v))

    def lattice(self) -> IntegerLattice:
        if self.gram is None:
            raise PreconditionError("module carries no bilinear form")
        return IntegerLattice(self.gram)

    def conjugate(self, p: Sequence[Sequence[int]]) -> "InvolutiveModule":
        """The same involution written in the basis given by the columns of p."""
        pinv = intmat.integer_inverse(p)
        s = intmat.matmul(intmat.matmul(pinv, self.sigma), p)
        g = None
        if self.gram is not None:
            g = intmat.matmul(intmat.matmul(intmat.transpose(p), self.gram), p)
        return InvolutiveModule(s, g)

    def __add__(self, other: "InvolutiveModule") -> "InvolutiveModule":
        g = None
        if self.gram is not None and other.gram is not None:
            g = intmat.block_diag(self.gram, other.gram)
        return InvolutiveModule(intmat.block_diag(self.sigma, other.sigma), g)

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "InvolutiveModule":
        if "sigma" not in obj:
            raise PreconditionError("involution JSON needs 'sigma'")
        s = parse_int_matrix(obj["sigma"])
        g = parse_int_matrix(obj["gram"]) if obj.get("gram") is not None else None
        return cls(s, g)


SWAP: Gram = ((0, 1), (1, 0))


def comessatti(m: InvolutiveModule) -> int:
    """Rank over F2 of 1 + sigma."""
    n = m.rank
    rows = [[m.sigma[i][j] + (i == j) for j in range(n)] for i in range(n)]
    return f2.matrix_rank_mod2(rows)


def standard_form(a: int, b: int, lam: int) -> list[list[int]]:
    return intmat.block_diag(*([((1,),)] * a + [((-1,),)] * b + [SWAP] * lam))


@dataclass(frozen=True)
class ComessattiDecomposition:
    rank_plus: int
    rank_minus: int
    lam: int
    basis_change: Gram

    @property
    def a(self) -> int:
        return self.rank_plus - self.lam

    @property
    def b(self) -> int:
        return self.rank_minus - self.lam

    @property
    def blocks(self) -> dict[str, int]:
        return {"plus": self.a, "minus": self.b, "swap": self.lam}


def _f2_basis_lift(cols: list[list[int]], p: int) -> list[list[int]]:
    """Unimodular p x p integer matrix whose first columns reduce to ``cols`` mod 2.

    ``cols`` must be independent mod 2. The F2 matrix is completed by unit
    vectors, reduced to the identity by elementary column operations, and
    those operations are replayed in reverse over Z.
    """
    ech = f2.Echelon()
    chosen = []
    for c in cols:
        ok, _ = ech.add(f2.from_int_rows([c])[0])
        check(ok, "columns are dependent mod 2")
        chosen.append([x & 1 for x in c])
    for i in range(p):
        if len(chosen) == p:
            break
        if ech.add(1 << i)[0]:
            chosen.append([int(j == i) for j in range(p)])
    t = intmat.transpose(chosen)  # columns = chosen
    ops: list[tuple[str, int, int]] = []
    work = [list(r) for r in t]

    def col_swap(i: int, j: int) -> None:
        for row in work:
            row[i], row[j] = row[j], row[i]

    def col_add(dst: int, src: int) -> None:
        for row in work:
            row[dst] ^= row[src]

    for r in range(p):
        piv = next(j for j in range(r, p) if work[r][j])
        if piv != r:
            col_swap(r, piv)
            ops.append(("swap", r, piv))
        for j in range(p):
            if j != r and work[r][j]:
                col_add(j, r)
                ops.append(("add", j, r))
    check(work == intmat.identity(p), "F2 reduction did not reach the identity")
    lift = intmat.identity(p)
    for kind, i, j in reversed(ops):
        if kind == "swap":
            for row in lift:
                row[i], row[j] = row[j], row[i]
        else:
            for row in lift:
                row[i] += row[j]
    for c, lc in zip(cols, intmat.transpose(lift)):
        check(all((x - y) % 2 == 0 for x, y in zip(c, lc)), "lift has wrong reduction")
    return lift


def decompose(m: InvolutiveModule) -> ComessattiDecomposition:
    """Standard form: a copies of (+1), b of (-1) and lam swap blocks.

    The returned ``basis_change`` P satisfies P^-1 sigma P = standard form and
    is verified before returning.
    """
    n = m.rank
    s = [list(r) for r in m.sigma]
    plus = intmat.kernel_basis(intmat.sub(s, intmat.identity(n)), n)
    minus = intmat.kernel_basis(intmat.add(s, intmat.identity(n)), n)
    p, q = len(plus), len(minus)
    check(p + q == n, "eigenspace ranks do not add up")
    lam = comessatti(m)
    full = intmat.complete_basis(plus, n)
    ys = [list(c) for c in intmat.transpose(full)[p:]]

    def plus_coords(v: Sequence[int]) -> list[int]:
        if p == 0:
            check(not any(v), "vector should vanish")
            return []
        sol = intmat.solve_in_basis(plus, v)
        check(sol is not None and all(x.denominator == 1 for x in sol), "expected an invariant vector")
        return [int(x) for x in sol]  # type: ignore[union-attr]

    cs = [plus_coords([a + b for a, b in zip(m.apply(y), y)]) for y in ys]
    # F2 column echelon on the c_j, replaying each operation on the y_j
    npiv = 0
    for r in range(p):
        j = next((j for j in range(npiv, q) if cs[j][r] & 1), None)
        if j is None:
            continue
        ys[npiv], ys[j] = ys[j], ys[npiv]
        cs[npiv], cs[j] = cs[j], cs[npiv]
        for l in range(q):
            if l != npiv and cs[l][r] & 1:
                ys[l] = [a + b for a, b in zip(ys[l], ys[npiv])]
                cs[l] = [a + b for a, b in zip(cs[l], cs[npiv])]
        npiv += 1
    check(npiv == lam, "F2 rank of the extension classes differs from lambda")
    lift = _f2_basis_lift([cs[i] for i in range(lam)], p) if p else []
    new_plus = [list(intmat.matvec(intmat.from_columns(plus), c)) for c in intmat.transpose(lift)] if p else []
    cols: list[list[int]] = new_plus[lam:]
    for j in range(lam, q):
        half = [x // 2 for x in cs[j]]
        check(all(x % 2 == 0 for x in cs[j]), "class expected to be even")
        k = intmat.matvec(intmat.from_columns(plus), half) if p else [0] * n
        cols.append([a - b for a, b in zip(ys[j], k)])
    pairs = []
    for i in range(lam):
        bi = new_plus[i]
        # c_i - b_i is even; shift y_i so that sigma y_i = -y_i + b_i
        c_amb = intmat.matvec(intmat.from_columns(plus), cs[i])
        diff = [x - y for x, y in zip(c_amb, bi)]
        check(all(x % 2 == 0 for x in diff), "lift mismatch")
        yi = [a - d // 2 for a, d in zip(ys[i], diff)]
        pairs.extend([yi, [b - y for b, y in zip(bi, yi)]])
    cols.extend(pairs)
    P = intmat.from_columns(cols)
    check(abs(intmat.det(P)) == 1, "basis change is not unimodular")
    conj = intmat.matmul(intmat.matmul(intmat.integer_inverse(P), s), P)
    check(conj == standard_form(p - lam, q - lam, lam), "basis change does not reach the standard form")
    return ComessattiDecomposition(p, q, lam, _freeze(P))


def eigen_sublattice(m: InvolutiveModule, sign: int) -> BilinearModule:
    """Saturated (sign)-eigensublattice with the restricted form."""
    if m.gram is None:
        raise PreconditionError("eigen_sublattice needs a bilinear form")
    if sign not in (1, -1):
        raise PreconditionError("sign must be +1 or -1")
    n = m.rank
    a = intmat.sub(m.sigma, intmat.scale(intmat.identity(n), sign))
    basis = intmat.kernel_basis(a, n)
    return restrict(m.gram, basis)


@dataclass(frozen=True)
class SplittingReport:
    trivial_mod2: bool
    lambda_zero: bool
    eigen_split: bool
    basis_sums_even: bool

    @property
    def all_equal(self) -> bool:
        return len({self.trivial_mod2, self.lambda_zero, self.eigen_split, self.basis_sums_even}) == 1


def splitting_report(m: InvolutiveModule) -> SplittingReport:
    """Evaluate the four equivalent splitting conditions independently."""
    n = m.rank
    s = m.sigma
    trivial = all((s[i][j] - (i == j)) % 2 == 0 for i in range(n) for j in range(n))
    lam0 = comessatti(m) == 0
    plus = intmat.kernel_basis(intmat.sub(s, intmat.identity(n)), n)
    minus = intmat.kernel_basis(intmat.add(s, intmat.identity(n)), n)
    both = plus + minus
    split = len(both) == n and abs(intmat.det(intmat.from_columns(both))) == 1
    sums_even = True
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        if any((a + b) % 2 for a, b in zip(e, m.apply(e))):
            sums_even = False
            break
    rep = SplittingReport(trivial, lam0, split, sums_even)
    check(rep.all_equal, f"splitting conditions disagree: {rep}")
    return rep


def symmetric_square(m: InvolutiveModule) -> InvolutiveModule:
    """Induced involution on Sym^2 in the basis e_i e_j (i <= j)."""
    n = m.rank
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    pos = {ij: k for k, ij in enumerate(idx)}
    cols = []
    for i, j in idx:
        si = [m.sigma[r][i] for r in range(n)]
        sj = [m.sigma[r][j] for r in range(n)]
        col = [0] * len(idx)
        for a in range(n):
            if not si[a]:
                continue
            for b in range(n):
                if sj[b]:
                    key = (a, b) if a <= b else (b, a)
                    col[pos[key]] += si[a] * sj[b]
        cols.append(col)
    return InvolutiveModule(intmat.from_columns(cols))


def submodule_action(m: InvolutiveModule, basis: Sequence[Sequence[int]]) -> InvolutiveModule:
    """Restriction of sigma to a sigma-invariant sublattice spanned by ``basis``."""
    cols = []
    for b in basis:
        sol = intmat.solve_in_basis(basis, m.apply(b))
        if sol is None or any(x.denominator != 1 for x in sol):
            raise PreconditionError("sublattice is not sigma-invariant")
        cols.append([int(x) for x in sol])
    return InvolutiveModule(intmat.from_columns(cols))


def quotient_action(m: InvolutiveModule, basis: Sequence[Sequence[int]]) -> InvolutiveModule:
    """Induced involution on M / N for a saturated sigma-invariant N."""
    n = m.rank
    k = len(basis)
    full = intmat.complete_basis(basis, n)
    conj = intmat.matmul(intmat.matmul(intmat.integer_inverse(full), m.sigma), full)
    check(all(conj[i][j] == 0 for i in range(k, n) for j in range(k)), "sublattice is not sigma-invariant")
    return InvolutiveModule([row[k:] for row in conj[k:]])
