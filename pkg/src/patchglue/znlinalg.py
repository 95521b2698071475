"""Exact integer and mod-2 linear algebra.

Vectors are plain tuples of Python ints, so nothing overflows. Mod-2 vectors
are tuples over {0, 1}.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

IntVector = tuple[int, ...]
Mod2Vector = tuple[int, ...]


def primitive(v: Sequence[int]) -> IntVector:
    v = tuple(int(x) for x in v)
    g = math.gcd(*v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[IntVector]:
    """Z-basis of {x in Z^n : r.x = 0 for every row r}.

    Uses unimodular column operations, so the returned basis spans a
    saturated lattice.
    """
    A = [list(map(int, r)) for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    c = 0
    for row in A:
        if c == n:
            break
        for j in range(c + 1, n):
            if row[j] == 0:
                continue
            a, b = row[c], row[j]
            g, x, y = _xgcd(a, b)
            p, q = -(b // g), a // g
            for M in (A, U):
                for r in M:
                    rc, rj = r[c], r[j]
                    r[c] = x * rc + y * rj
                    r[j] = p * rc + q * rj
        if row[c] != 0:
            c += 1
    return [tuple(U[i][j] for i in range(n)) for j in range(c, n)]


def hermite_rows(vectors: Iterable[Sequence[int]], n: int) -> list[IntVector]:
    """Row Hermite normal form of the lattice spanned by ``vectors`` (nonzero rows only)."""
    rows = [list(map(int, v)) for v in vectors]
    rows = [r for r in rows if any(r)]
    out = []
    for col in range(n):
        live = [r for r in rows if r[col] != 0]
        if not live:
            continue
        rest = [r for r in rows if r[col] == 0]
        piv = live[0]
        for other in live[1:]:
            a, b = piv[col], other[col]
            g, x, y = _xgcd(a, b)
            new_piv = [x * p + y * o for p, o in zip(piv, other)]
            new_other = [(a // g) * o - (b // g) * p for p, o in zip(piv, other)]
            piv = new_piv
            if any(new_other):
                rest.append(new_other)
        if piv[col] < 0:
            piv = [-x for x in piv]
        for r in out:
            q = r[col] // piv[col]
            if q:
                r[:] = [a - q * b for a, b in zip(r, piv)]
        out.append(piv)
        rows = [r for r in rest if any(r)]
    return [tuple(r) for r in out]


def rank(vectors: Sequence[Sequence[int]], n: int | None = None) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    return len(hermite_rows(vectors, n if n is not None else len(vectors[0])))


def saturate(generators: Sequence[Sequence[int]]) -> list[IntVector]:
    """Z-basis of span_R(generators) intersected with Z^n.

    The kernel of the kernel is saturated by construction; the result is put
    in Hermite form and sorted so it is the same for every generating set of
    the same real span.
    """
    generators = [tuple(map(int, g)) for g in generators]
    if not generators:
        return []
    n = len(generators[0])
    if any(len(g) != n for g in generators):
        raise ValueError("generators live in different dimensions")
    perp = integer_kernel(generators, n)
    basis = integer_kernel(perp, n) if perp else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return sorted(hermite_rows(basis, n))


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    A = [list(map(int, r)) for r in M]
    k = len(A)
    if k == 0:
        return 1
    sign, prev = 1, 1
    for i in range(k - 1):
        if A[i][i] == 0:
            for j in range(i + 1, k):
                if A[j][i] != 0:
                    A[i], A[j] = A[j], A[i]
                    sign = -sign
                    break
            else:
                return 0
        for j in range(i + 1, k):
            for l in range(i + 1, k):
                A[j][l] = (A[j][l] * A[i][i] - A[j][i] * A[i][l]) // prev
        prev = A[i][i]
    return sign * A[-1][-1]


def lattice_index(generators: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by linearly independent ``generators`` in its saturation.

    This is the gcd of the maximal minors; it is 1 exactly when the
    generators extend to a basis of Z^n. Returns 0 for dependent input.
    """
    gens = [tuple(map(int, g)) for g in generators]
    if not gens:
        return 1
    r, n = len(gens), len(gens[0])
    g = 0
    for cols in itertools.combinations(range(n), r):
        g = math.gcd(g, determinant([[v[c] for c in cols] for v in gens]))
        if g == 1:
            return 1
    return g


# ---------------------------------------------------------------------------
# mod 2


def mod2(v: Sequence[int]) -> Mod2Vector:
    return tuple(int(x) & 1 for x in v)


def add2(u: Sequence[int], v: Sequence[int]) -> Mod2Vector:
    return tuple(a ^ b for a, b in zip(u, v))


def _rref2(vectors: Iterable[Sequence[int]], n: int) -> tuple[Mod2Vector, ...]:
    rows = [list(mod2(v)) for v in vectors]
    out: list[list[int]] = []
    for col in range(n):
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            continue
        rows.remove(piv)
        for r in rows + out:
            if r[col]:
                r[:] = [a ^ b for a, b in zip(r, piv)]
        out.append(piv)
    out.sort(key=lambda r: r.index(1))
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class Mod2Subspace:
    n: int
    basis: tuple[Mod2Vector, ...]  # reduced row echelon form

    @classmethod
    def from_vectors(cls, n: int, vectors: Iterable[Sequence[int]]) -> "Mod2Subspace":
        vectors = list(vectors)
        if any(len(v) != n for v in vectors):
            raise ValueError("vector length does not match ambient dimension %d" % n)
        return cls(n, _rref2(vectors, n))

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(r.index(1) for r in self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, u: Sequence[int]) -> Mod2Vector:
        u = list(mod2(u))
        for row, p in zip(self.basis, self.pivots):
            if u[p]:
                u = [a ^ b for a, b in zip(u, row)]
        return tuple(u)

    def contains(self, u: Sequence[int]) -> bool:
        return not any(self.reduce(u))

    def __le__(self, other: "Mod2Subspace") -> bool:
        return self.n == other.n and all(other.contains(r) for r in self.basis)


@dataclass(frozen=True)
class Mod2Quotient:
    """Z_2^n modulo a subspace, with one canonical representative per class."""

    subspace: Mod2Subspace

    @property
    def n(self) -> int:
        return self.subspace.n

    @property
    def num_classes(self) -> int:
        return 2 ** (self.n - self.subspace.rank)

    def canonical_form(self, u: Sequence[int]) -> Mod2Vector:
        if len(u) != self.n:
            raise ValueError("vector length does not match ambient dimension %d" % self.n)
        return self.subspace.reduce(u)

    def same_class(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return self.subspace.contains(add2(mod2(u), mod2(v)))

    @cached_property
    def classes(self) -> tuple[Mod2Vector, ...]:
        free = [c for c in range(self.n) if c not in self.subspace.pivots]
        out = []
        for bits in itertools.product((0, 1), repeat=len(free)):
            u = [0] * self.n
            for c, b in zip(free, bits):
                u[c] = b
            out.append(tuple(u))
        return tuple(sorted(out))


def mod2_quotient(n: int, lattice_basis: Sequence[Sequence[int]]) -> Mod2Quotient:
    """Z_2^n / (Z_2 (x) L) for a *saturated* lattice basis of L.

    Reducing a non-saturated basis gives the wrong subspace: the saturated
    basis (1, 0) of Z(2, 0) reduces to (1, 0), the raw generator to (0, 0).
    """
    return Mod2Quotient(Mod2Subspace.from_vectors(n, lattice_basis))


@dataclass(frozen=True)
class QuotientMap:
    source: Mod2Quotient
    target: Mod2Quotient

    def __call__(self, u: Sequence[int]) -> Mod2Vector:
        return self.target.canonical_form(u)

    def fibre(self, v: Sequence[int]) -> list[Mod2Vector]:
        v = self.target.canonical_form(v)
        return [u for u in self.source.classes if self(u) == v]

    def as_dict(self) -> dict[Mod2Vector, Mod2Vector]:
        return {u: self(u) for u in self.source.classes}


def induced_map(source: Mod2Quotient, target: Mod2Quotient) -> QuotientMap:
    if source.n != target.n or not source.subspace <= target.subspace:
        raise ValueError("no induced quotient map: source subspace is not contained in target subspace")
    return QuotientMap(source, target)
