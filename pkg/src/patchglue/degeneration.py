"""The cone complex C(Sigma) and the (strong) unimodularity checks.

C(Sigma) lives in R^{n+1}: each cell sigma is coned at height 1, and the
recession cones sit at height 0. Projection to the last coordinate is the
degeneration map.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

from .polyhedra import Subdivision, _homogenize
from .znlinalg import IntVector, lattice_index, rank


class DegenerationError(ValueError):
    pass


@dataclass(frozen=True)
class ConeComplex:
    base: Subdivision
    cones: tuple[tuple[IntVector, ...], ...]  # indexed by cell id

    @cached_property
    def recession_cones(self) -> tuple[tuple[IntVector, ...], ...]:
        return tuple(sorted({tuple(g for g in c if g[-1] == 0) for c in self.cones}))

    @cached_property
    def rays(self) -> tuple[IntVector, ...]:
        return tuple(sorted({g for c in self.cones for g in c}))

    def level_positive(self, cell: int) -> tuple[IntVector, ...]:
        return tuple(g for g in self.cones[cell] if g[-1] > 0)


def cone_over(sub: Subdivision) -> ConeComplex:
    cones = []
    for c in sub.cells:
        gens = {_homogenize(v) for v in c.vertices} | {r + (0,) for r in c.rays}
        cones.append(tuple(sorted(gens)))
    return ConeComplex(sub, tuple(cones))


@dataclass
class ValidationReport:
    unimodular: bool
    strongly_unimodular: bool
    offending_cones: list[tuple[int, str]] = field(default_factory=list)
    multiplicities: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "unimodular": self.unimodular,
            "strongly_unimodular": self.strongly_unimodular,
            "offending_cones": [{"cell": i, "reason": r} for i, r in self.offending_cones],
            "multiplicities": {str(i): list(m) for i, m in sorted(self.multiplicities.items())},
        }


def _cone_problem(gens) -> str | None:
    if not gens:
        return None
    r = rank(gens)
    if r != len(gens):
        return "non-simplicial: %d rays span dimension %d" % (len(gens), r)
    idx = lattice_index(gens)
    if idx != 1:
        return "not unimodular: lattice index %d" % idx
    return None


def check_strongly_unimodular(C: ConeComplex) -> ValidationReport:
    offending = []
    unimodular = strong = True
    for i, gens in enumerate(C.cones):
        problem = _cone_problem(gens)
        if problem:
            unimodular = strong = False
            offending.append((i, problem))
            continue
        heights = sorted({g[-1] for g in gens if g[-1] > 1})
        if heights:
            strong = False
            offending.append((i, "ray with last coordinate %s" % ", ".join(map(str, heights))))
    report = ValidationReport(unimodular, strong, offending)
    if unimodular:
        report.multiplicities = {i: multiplicities(C, i) for i in range(len(C.cones))}
    return report


def multiplicities(C: ConeComplex, cell: int) -> tuple[int, ...]:
    """Heights of the level-positive rays of C(cell).

    On a full-dimensional unimodular cone these are the coefficients of the
    height function in the dual basis; height is primitive, so at least one
    of them is odd there. Lower cells may legitimately be all even.
    """
    gens = C.cones[cell]
    if _cone_problem(gens):
        raise DegenerationError("multiplicities require unimodular C(Sigma)")
    out = tuple(g[-1] for g in gens if g[-1] > 0)
    n = C.base.ambient_dim
    if C.base.cells[cell].dim == n and not any(a % 2 for a in out):
        raise DegenerationError("cell %d: all multiplicities even on a maximal cone; C(Sigma) is invalid" % cell)
    return out


def require_strongly_unimodular(sub: Subdivision) -> ValidationReport:
    bad = [i for i, c in enumerate(sub.cells) if not c.is_integral]
    if bad:
        den = math.lcm(*(d for i in bad for d in sub.cells[i].denominators))
        raise DegenerationError(
            "cells %s have non-integer vertices; scale Sigma by d = %d to reach a strongly unimodular subdivision"
            % (bad, den)
        )
    report = check_strongly_unimodular(cone_over(sub))
    if not report.strongly_unimodular:
        raise DegenerationError(
            "subdivision is not strongly unimodular: "
            + "; ".join("cell %d: %s" % p for p in report.offending_cones)
        )
    return report


class PositiveCount(enum.Enum):
    HALF = "half"
    FULL = "full"
    EMPTY = "empty"

    def count(self, k: int) -> int:
        return {PositiveCount.HALF: 2 ** (k - 1), PositiveCount.FULL: 2**k, PositiveCount.EMPTY: 0}[self]


def classify_positive_count(sign: str, parities) -> PositiveCount:
    """How many of the 2^k local orthants of +-x_1^a_1...x_k^a_k are positive.

    ``parities`` holds "odd"/"even" (or the integers a_i themselves).
    """
    if not parities:
        raise ValueError("classification needs at least one exponent parity")
    odd = [p == "odd" if isinstance(p, str) else p % 2 == 1 for p in parities]
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if any(odd):
        return PositiveCount.HALF
    return PositiveCount.FULL if sign == "+" else PositiveCount.EMPTY
