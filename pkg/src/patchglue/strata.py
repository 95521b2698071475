"""Strata of the real special fibre and the Euler characteristic formulas.

A stratum is a pair (cell, eps) with eps a class of Z_2(cell). Its orthant set
Q lives in Z_2^{n+1} / (Z_2 (x) T(Rec cell) x 0), where the last bit is the
sign of the degeneration function (0 = positive). The positive orthants Q+
are the classes with last bit 0, identified with Z_2(Rec cell) by dropping
that bit.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .degeneration import require_strongly_unimodular
from .polyhedra import Subdivision, recession_cone, tangent_lattice
from .znlinalg import Mod2Quotient, Mod2Vector, add2, induced_map, mod2, mod2_quotient


@dataclass(frozen=True)
class CellQuotients:
    tangent: Mod2Quotient  # Z_2(sigma)
    recession: Mod2Quotient  # Z_2(Rec sigma)
    orthants: Mod2Quotient  # Z_2^{n+1} / (T(Rec sigma) x 0)
    base_vertex: Mod2Vector


@lru_cache(maxsize=16)
def cell_quotients(sub: Subdivision) -> tuple[CellQuotients, ...]:
    n = sub.ambient_dim
    out = []
    for c in sub.cells:
        rec = tangent_lattice(recession_cone(c))
        out.append(CellQuotients(
            mod2_quotient(n, tangent_lattice(c)),
            mod2_quotient(n, rec),
            mod2_quotient(n + 1, [r + (0,) for r in rec]),
            mod2([int(x) for x in c.vertices[0]]),
        ))
    return tuple(out)


@dataclass(frozen=True)
class StratumRecord:
    cell: int
    eps: Mod2Vector
    k: int
    dim: int
    chi_c: int
    Qplus: frozenset[Mod2Vector]
    Q: frozenset[Mod2Vector]

    def to_dict(self) -> dict:
        return {
            "cell": self.cell,
            "eps": list(self.eps),
            "k": self.k,
            "dim": self.dim,
            "chi_c": self.chi_c,
            "Qplus": sorted(map(list, self.Qplus)),
            "Q": sorted(map(list, self.Q)),
        }


def codimension_k(sub: Subdivision, cell: int) -> int:
    """Number of components of the special fibre through the orbit of ``cell``."""
    return len(sub.cells[cell].vertices)


def _orthant_label(q: CellQuotients, x: Mod2Vector) -> Mod2Vector:
    """Z_2(sigma)-label of an orthant class (eps_hat, t): eps_hat - t * vertex."""
    *u, t = x
    if t:
        u = add2(u, q.base_vertex)
    return q.tangent.canonical_form(tuple(u))


def enumerate_strata(sub: Subdivision) -> list[StratumRecord]:
    require_strongly_unimodular(sub)
    n = sub.ambient_dim
    records = []
    for cid, (c, q) in enumerate(zip(sub.cells, cell_quotients(sub))):
        k = codimension_k(sub, cid)
        dim = n - c.dim
        proj = induced_map(q.recession, q.tangent)
        by_label = defaultdict(set)
        for x in q.orthants.classes:
            by_label[_orthant_label(q, x)].add(x)
        for eps in q.tangent.classes:
            qplus = frozenset(proj.fibre(eps))
            full = frozenset(by_label[eps])
            if len(full) != 2**k or len(qplus) != 2 ** (k - 1):
                raise RuntimeError("orthant count mismatch at cell %d" % cid)
            if {x + (0,) for x in qplus} != {x for x in full if x[-1] == 0}:
                raise RuntimeError("positive orthants inconsistent at cell %d" % cid)
            records.append(StratumRecord(cid, eps, k, dim, (-1) ** dim, qplus, full))
    return records


def orthant_inclusion(sub: Subdivision, S: StratumRecord, T: StratumRecord) -> dict[Mod2Vector, Mod2Vector]:
    """Inclusion Q(S) -> Q(T) for a stratum T in the closure of S (cell of S is a face of cell of T)."""
    if S.cell not in sub.face_ids[T.cell]:
        raise ValueError("no adjacency: cell %d is not a face of cell %d" % (S.cell, T.cell))
    qs = cell_quotients(sub)
    qS, qT = qs[S.cell], qs[T.cell]
    if qT.tangent.canonical_form(S.eps) != T.eps:
        raise ValueError("no adjacency: label %s does not map to %s" % (S.eps, T.eps))
    f = induced_map(qS.orthants, qT.orthants)
    out = {x: f(x) for x in S.Q}
    if not set(out.values()) <= T.Q or len(set(out.values())) != len(out):
        raise RuntimeError("orthant map is not an injection into Q(T)")
    return out


@dataclass(frozen=True)
class ChiSummary:
    per_codim: dict[int, int]
    chi_positive: int
    chi_total: int
    chi_boundary: int

    def to_dict(self) -> dict:
        return {
            "per_codim": {str(k): v for k, v in sorted(self.per_codim.items())},
            "chi_positive": self.chi_positive,
            "chi_total": self.chi_total,
            "chi_boundary": self.chi_boundary,
        }


def chi_formula(sub: Subdivision) -> ChiSummary:
    """Euler characteristics of the blow-up pieces from the strata of the special fibre.

    ``chi_total`` adds the generic-fibre orbits (k = 0): one copy of
    (R^*)^{n+1-dim rho} for each cone rho of the recession fan.
    """
    per_codim: dict[int, int] = defaultdict(int)
    for s in enumerate_strata(sub):
        per_codim[s.k] += s.chi_c
    per_codim = dict(per_codim)
    n = sub.ambient_dim
    generic = sum(
        (-2) ** (n + 1 - rho.dim)
        for rho in {recession_cone(c) for c in sub.cells}
    )
    chi_pos = sum(2 ** (k - 1) * v for k, v in per_codim.items())
    chi_bdy = sum(2**k * v for k, v in per_codim.items())
    return ChiSummary(per_codim, chi_pos, generic + chi_bdy, chi_bdy)


def chi_blowup_abstract(strata) -> tuple[int, int, int]:
    """(chi_total, chi_boundary, chi_positive) from hand-entered (chi_c, k) pairs."""
    total = boundary = positive = 0
    for chi, k in strata:
        if k < 0:
            raise ValueError("codimension k must be non-negative")
        total += 2**k * chi
        if k >= 1:
            boundary += 2**k * chi
            positive += 2 ** (k - 1) * chi
    return total, boundary, positive
