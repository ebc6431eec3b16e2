"""Integral lattices: named constructions, signatures, discriminant forms.

A lattice is stored as its symmetric Gram matrix in a fixed basis; vectors
are integer coordinate tuples in that basis. Dual vectors are rational
coordinate tuples in the same basis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd
from typing import Any, Iterable, Sequence

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from . import intmat
from .errors import DegenerateLatticeError, PreconditionError, check

Gram = tuple[tuple[int, ...], ...]

E8_CARTAN: Gram = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, -1),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, -1, 0, 0, 0, 0, 2),
)

U_GRAM: Gram = ((0, 1), (1, 0))


def _freeze(gram: Sequence[Sequence[int]]) -> Gram:
    return tuple(tuple(int(x) for x in row) for row in gram)


def mod2(q: Fraction) -> Fraction:
    """Representative of q in [0, 2)."""
    return q - 2 * (q.numerator // (2 * q.denominator))


def mod1(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def sign_variations(coeffs: Sequence[int]) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia(gram: Sequence[Sequence[int]]) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of a symmetric integer matrix.

    The characteristic polynomial of a real symmetric matrix has only real
    roots, so Descartes' rule of signs counts them exactly.
    """
    n = len(gram)
    if n == 0:
        return (0, 0, 0)
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in gram], (n, n), ZZ)
    coeffs = [int(c) for c in dm.charpoly()]  # leading coefficient first
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1
    pos = sign_variations(coeffs)
    deg = len(coeffs) - 1
    neg_coeffs = [c * (-1) ** (deg - i) for i, c in enumerate(coeffs)]
    neg = sign_variations(neg_coeffs)
    check(pos + neg + zero == n, "characteristic polynomial has non-real roots")
    return pos, neg, zero


@dataclass(frozen=True)
class IntegerLattice:
    gram: Gram
    label: str | None = None

    def __post_init__(self) -> None:
        g = _freeze(self.gram)
        object.__setattr__(self, "gram", g)
        if len(g) == 0:
            raise DegenerateLatticeError("a lattice must have positive rank")
        if not intmat.is_symmetric(g):
            raise PreconditionError("Gram matrix must be square and symmetric")
        if self.det == 0:
            raise DegenerateLatticeError("Gram matrix is degenerate (determinant 0)")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return intmat.det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def parity(self) -> str:
        return "even" if self.is_even else "odd"

    def pair(self, u: Sequence, v: Sequence):
        return intmat.bilinear(self.gram, u, v)

    def square(self, v: Sequence):
        return self.pair(v, v)

    def image(self, v: Sequence[int]) -> list[int]:
        """G v, the pairings of v with the basis vectors."""
        return intmat.matvec(self.gram, v)

    def basis_vector(self, i: int) -> tuple[int, ...]:
        return tuple(int(i == j) for j in range(self.rank))

    def rescale(self, m: int) -> "IntegerLattice":
        if m == 0:
            raise DegenerateLatticeError("rescaling by 0 gives a degenerate lattice")
        label = f"{self.label}({m})" if self.label else None
        return IntegerLattice(intmat.scale(self.gram, m), label)

    def __add__(self, other: "IntegerLattice") -> "IntegerLattice":
        return direct_sum(self, other)

    def is_isometry(self, sigma: Sequence[Sequence[int]]) -> bool:
        s = [list(r) for r in sigma]
        return intmat.matmul(intmat.matmul(intmat.transpose(s), self.gram), s) == [list(r) for r in self.gram]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"gram": [list(r) for r in self.gram]}
        if self.label:
            out["label"] = self.label
        return out


def direct_sum(*parts: IntegerLattice, label: str | None = None) -> IntegerLattice:
    gram = intmat.block_diag(*(p.gram for p in parts))
    if label is None and all(p.label for p in parts):
        label = " + ".join(p.label for p in parts)  # type: ignore[misc]
    return IntegerLattice(gram, label)


# ---------------------------------------------------------------------------
# named lattices

_TERM = re.compile(
    r"""^\s*
    (?:(?P<U>U)|(?P<E8>E8)|<\s*(?P<k>[+-]?\d+)\s*>)
    \s*(?:\(\s*(?P<m>[+-]?\d+)\s*\))?
    \s*(?:\^\s*(?P<p>\d+))?
    \s*$""",
    re.VERBOSE,
)


def _split_terms(expr: str) -> list[str]:
    terms, depth, cur = [], 0, ""
    for ch in expr:
        if ch in "(<":
            depth += 1
        elif ch in ")>":
            depth -= 1
        if ch == "+" and depth == 0:
            terms.append(cur)
            cur = ""
        else:
            cur += ch
    terms.append(cur)
    return terms


def make_named(expr: str) -> IntegerLattice:
    """Build a lattice from an expression such as ``"U^3 + E8(-1)^2 + <-4>"``.

    Summands are ``U``, ``E8`` (positive definite root lattice), and ``<k>``;
    each may carry a rescaling ``(m)`` and a repetition ``^p``.
    """
    blocks: list[Gram] = []
    for raw in _split_terms(expr):
        m = _TERM.match(raw)
        if not m:
            raise PreconditionError(f"cannot parse lattice term {raw.strip()!r}")
        if m.group("U"):
            base: Gram = U_GRAM
        elif m.group("E8"):
            base = E8_CARTAN
        else:
            k = int(m.group("k"))
            if k == 0:
                raise DegenerateLatticeError("<0> is degenerate")
            base = ((k,),)
        scale = int(m.group("m")) if m.group("m") is not None else 1
        if scale == 0:
            raise DegenerateLatticeError("rescaling by 0 gives a degenerate lattice")
        reps = int(m.group("p")) if m.group("p") is not None else 1
        if reps < 1:
            raise PreconditionError("repetition count must be positive")
        blocks.extend([_freeze(intmat.scale(base, scale))] * reps)
    return IntegerLattice(intmat.block_diag(*blocks), expr.strip())


def lattice_from_json(obj: dict[str, Any]) -> IntegerLattice:
    if "expr" in obj:
        return make_named(str(obj["expr"]))
    if "gram" not in obj:
        raise PreconditionError("lattice JSON needs 'gram' or 'expr'")
    gram = parse_int_matrix(obj["gram"])
    return IntegerLattice(gram, obj.get("label"))


def parse_int_matrix(rows: Any) -> list[list[int]]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise PreconditionError("matrix must be a list of rows")
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, bool):
                raise PreconditionError("matrix entries must be integers")
            if isinstance(x, int):
                row.append(x)
            elif isinstance(x, str) and re.fullmatch(r"\s*[+-]?\d+\s*", x):
                row.append(int(x))
            else:
                raise PreconditionError(f"matrix entry {x!r} is not an integer")
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# invariants


def signature(lat: IntegerLattice) -> tuple[int, int]:
    pos, neg, zero = inertia(lat.gram)
    check(zero == 0, "nondegenerate lattice has a zero eigenvalue")
    return pos, neg


def _require_vector(lat: IntegerLattice, v: Sequence[int]) -> tuple[int, ...]:
    if len(v) != lat.rank:
        raise PreconditionError(f"vector has length {len(v)}, lattice rank is {lat.rank}")
    t = tuple(int(x) for x in v)
    if not any(t):
        raise PreconditionError("the zero vector has no divisibility")
    return t


def divisibility(lat: IntegerLattice, v: Sequence[int]) -> int:
    t = _require_vector(lat, v)
    d = intmat.content(lat.image(t))
    check(d > 0, "nonzero vector pairs trivially with a nondegenerate lattice")
    return d


def is_primitive(lat: IntegerLattice, v: Sequence[int]) -> bool:
    t = _require_vector(lat, v)
    return intmat.content(t) == 1


@dataclass(frozen=True)
class DiscriminantGroup:
    """Finite quadratic module L^vee / L in Smith coordinates.

    ``generator_reps[i]`` is a dual vector (rational lattice coordinates)
    generating the i-th cyclic factor; ``qvalues[i]`` is its square mod 2
    for even lattices (mod 1 for odd ones, where only the bilinear form is
    well defined).
    """

    invariant_factors: tuple[int, ...]
    generator_reps: tuple[tuple[Fraction, ...], ...]
    qvalues: tuple[Fraction, ...]
    even: bool
    gen_gram: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    _vinv: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    _factor_index: tuple[int, ...] = field(repr=False)

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    def class_of(self, dual: Sequence) -> tuple[int, ...]:
        """Smith coordinates of the coset of a dual vector."""
        xs = [Fraction(x) for x in dual]
        out = []
        for pos, idx in enumerate(self._factor_index):
            d = self.invariant_factors[pos]
            z = sum(a * b for a, b in zip(self._vinv[idx], xs)) * d
            check(z.denominator == 1, "vector is not in the dual lattice")
            out.append(int(z) % d)
        # every non-listed factor has d = 1 and contributes nothing
        return tuple(out)

    def q(self, coords: Sequence[int]) -> Fraction:
        val = sum(
            coords[i] * coords[j] * self.gen_gram[i][j]
            for i in range(len(coords))
            for j in range(len(coords))
            if coords[i] and coords[j]
        )
        return mod2(Fraction(val)) if self.even else mod1(Fraction(val))

    def elements(self) -> Iterable[tuple[int, ...]]:
        return product(*(range(d) for d in self.invariant_factors))


@lru_cache(maxsize=512)
def discriminant_group(lat: IntegerLattice) -> DiscriminantGroup:
    diag, _, v = intmat.smith_normal_form(lat.gram)
    check(all(d != 0 for d in diag), "degenerate Gram reached discriminant computation")
    prod = 1
    for d in diag:
        prod *= d
    check(prod == abs(lat.det), "Smith invariants do not multiply to |det|")
    vinv = tuple(tuple(row) for row in intmat.rational_inverse(v))
    idx = tuple(i for i, d in enumerate(diag) if d > 1)
    factors = tuple(diag[i] for i in idx)
    vcols = intmat.transpose(v)
    gens = tuple(tuple(Fraction(x, diag[i]) for x in vcols[i]) for i in idx)
    gg = tuple(tuple(Fraction(lat.pair(a, b)) for b in gens) for a in gens)
    even = lat.is_even
    qs = tuple((mod2 if even else mod1)(gg[i][i]) for i in range(len(gens)))
    return DiscriminantGroup(factors, gens, qs, even, gg, vinv, idx)


def discriminant_class(lat: IntegerLattice, v: Sequence[int]) -> tuple[tuple[int, ...], Fraction]:
    """Class of v/div(v) in A_L together with its q-value."""
    t = _require_vector(lat, v)
    c = intmat.content(t)
    if c != 1:
        raise PreconditionError(f"vector is not primitive (content {c}); divide it by {c} first")
    d = divisibility(lat, t)
    A = discriminant_group(lat)
    cls = A.class_of([Fraction(x, d) for x in t])
    qv = Fraction(lat.square(t), d * d)
    qv = mod2(qv) if lat.is_even else mod1(qv)
    check(A.q(cls) == qv, "q-value of v* disagrees with its Smith coordinates")
    return cls, qv


# ---------------------------------------------------------------------------
# sublattices


@dataclass(frozen=True)
class BilinearModule:
    """A saturated sublattice given by ambient basis vectors, possibly degenerate."""

    basis: tuple[tuple[int, ...], ...]
    gram: Gram
    saturated: bool = True

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def det(self) -> int:
        return intmat.det(self.gram) if self.gram else 1

    @property
    def degenerate(self) -> bool:
        return self.rank > 0 and self.det == 0

    def to_lattice(self, label: str | None = None) -> IntegerLattice:
        if self.rank == 0:
            raise DegenerateLatticeError("the zero module is not a lattice")
        if self.degenerate:
            raise DegenerateLatticeError("sublattice is degenerate; discriminant data is undefined")
        return IntegerLattice(self.gram, label)

    def ambient(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Ambient coordinates of a vector given in this module's basis."""
        n = len(self.basis[0]) if self.basis else 0
        out = [0] * n
        for c, b in zip(coords, self.basis):
            if c:
                for i, x in enumerate(b):
                    out[i] += c * x
        return tuple(out)

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of an ambient vector in this module's basis."""
        sol = intmat.solve_in_basis(self.basis, v)
        if sol is None or any(x.denominator != 1 for x in sol):
            raise PreconditionError("vector does not lie in the sublattice")
        return tuple(int(x) for x in sol)


def restrict(lat: IntegerLattice | Sequence[Sequence[int]], basis: Sequence[Sequence[int]]) -> BilinearModule:
    """Sublattice spanned by ``basis`` with the form of ``lat`` (a lattice or a raw Gram)."""
    g = lat.gram if isinstance(lat, IntegerLattice) else lat
    b = tuple(tuple(int(x) for x in v) for v in basis)
    gram = tuple(tuple(intmat.bilinear(g, u, w) for w in b) for u in b)
    return BilinearModule(b, gram)


def orthogonal_complement(lat: IntegerLattice, span: Sequence[Sequence[int]]) -> BilinearModule:
    for v in span:
        if len(v) != lat.rank:
            raise PreconditionError("spanning vector has the wrong length")
    rows = [lat.image(v) for v in span if any(v)]
    if not rows:
        basis = [lat.basis_vector(i) for i in range(lat.rank)]
    else:
        basis = intmat.kernel_basis(rows, lat.rank)
    return restrict(lat, basis)


# ---------------------------------------------------------------------------
# invariant triple


@dataclass(frozen=True)
class InvariantTriple:
    rank: int
    signature: tuple[int, int]
    parity: str
    factors: tuple[int, ...]
    qvalues: tuple[Fraction, ...]
    form: DiscriminantGroup = field(repr=False, compare=False)

    def key(self) -> tuple:
        """Deterministic key; complete for cyclic discriminant groups."""
        if len(self.factors) == 1:
            d = self.factors[0]
            q = self.qvalues[0]
            canon = min(
                (self.form.q((k,)) for k in range(1, d) if gcd(k, d) == 1),
                default=q,
            )
            qkey: tuple = (canon,)
        elif not self.factors:
            qkey = ()
        else:
            counts: dict[Fraction, int] = {}
            for el in self.form.elements():
                val = self.form.q(el)
                counts[val] = counts.get(val, 0) + 1
            qkey = tuple(sorted(counts.items()))
        return (self.rank, self.signature, self.parity, self.factors, qkey)

    def equivalent(self, other: "InvariantTriple") -> bool:
        if (self.rank, self.signature, self.parity, self.factors) != (
            other.rank,
            other.signature,
            other.parity,
            other.factors,
        ):
            return False
        return forms_isomorphic(self.form, other.form)


def forms_isomorphic(a: DiscriminantGroup, b: DiscriminantGroup, limit: int = 4096) -> bool:
    if a.invariant_factors != b.invariant_factors or a.even != b.even:
        return False
    if not a.invariant_factors:
        return True
    if len(a.invariant_factors) == 1:
        d = a.invariant_factors[0]
        target = b.qvalues[0]
        return any(gcd(k, d) == 1 and a.q((k,)) == target for k in range(1, d))
    if a.order > limit:
        raise PreconditionError("discriminant group too large for isomorphism search")
    # map generators of a to elements of b of matching order, check q on all of a
    orders = a.invariant_factors
    elems_b = list(b.elements())

    def element_order(el: tuple[int, ...]) -> int:
        o = 1
        for x, d in zip(el, b.invariant_factors):
            k = d // gcd(x, d)
            o = o * k // gcd(o, k)
        return o

    candidates = [[e for e in elems_b if orders[i] % element_order(e) == 0] for i in range(len(orders))]
    all_a = list(a.elements())

    def image(coeffs: tuple[int, ...], imgs: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
        return tuple(
            sum(c * im[j] for c, im in zip(coeffs, imgs)) % dj for j, dj in enumerate(b.invariant_factors)
        )

    for imgs in product(*candidates):
        if any(a.q(tuple(int(i == k) for k in range(len(orders)))) != b.q(imgs[i]) for i in range(len(orders))):
            continue
        seen = set()
        ok = True
        for el in all_a:
            im = image(el, imgs)
            if im in seen or a.q(el) != b.q(im):
                ok = False
                break
            seen.add(im)
        if ok:
            return True
    return False


def invariant_triple(lat: IntegerLattice) -> InvariantTriple:
    """Rank, signature, parity and discriminant form.

    This is a complete isometry invariant only under Nikulin-type hypotheses
    (even, indefinite, rank at least the discriminant length plus two); it is
    computed unconditionally and callers decide whether it is decisive.
    """
    A = discriminant_group(lat)
    return InvariantTriple(lat.rank, signature(lat), lat.parity, A.invariant_factors, A.qvalues, A)
