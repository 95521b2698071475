"""Lattice polyhedra in vertex/ray form and polyhedral subdivisions of R^n.

Every polyhedron is handled through its homogenization: the pointed cone in
R^{n+1} spanned by (v, 1) for vertices and (f, 0) for rays. Facets, faces,
membership and the pairwise-intersection test are all computed on that cone
with exact integer arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .znlinalg import (
    IntVector,
    determinant,
    dot,
    hermite_rows,
    integer_kernel,
    primitive,
    rank,
    saturate,
)


class SubdivisionError(ValueError):
    """Raised when a cell list is not a complete polyhedral subdivision."""


class Cone:
    """Pointed-or-not rational cone spanned by nonzero integer generators."""

    def __init__(self, generators: Iterable[Sequence[int]], dim: int):
        self.dim = dim
        gens = {primitive(g) for g in generators}
        if any(len(g) != dim for g in gens):
            raise ValueError("generator length does not match dimension %d" % dim)
        self.generators: tuple[IntVector, ...] = tuple(sorted(gens))

    def __repr__(self):
        return "Cone(%r)" % (list(self.generators),)

    @cached_property
    def span(self) -> list[IntVector]:
        return saturate(self.generators)

    @cached_property
    def equations(self) -> list[IntVector]:
        if not self.generators:
            return [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]
        return integer_kernel(self.generators, self.dim)

    @cached_property
    def facets(self) -> list[tuple[IntVector, frozenset[int]]]:
        """Inner facet normals (defined modulo the equations) with their tight generator sets."""
        d = len(self.span)
        if d == 0:
            return []
        gens = self.generators
        seen = {}
        for subset in itertools.combinations(range(len(gens)), d - 1):
            rows = [gens[i] for i in subset]
            if rank(rows, self.dim) != d - 1:
                continue
            ker = integer_kernel(rows + list(self.equations), self.dim)
            if len(ker) != 1:
                continue
            a = primitive(ker[0])
            vals = [dot(a, g) for g in gens]
            if all(x >= 0 for x in vals):
                pass
            elif all(x <= 0 for x in vals):
                a, vals = tuple(-x for x in a), [-x for x in vals]
            else:
                continue
            tight = frozenset(i for i, x in enumerate(vals) if x == 0)
            seen.setdefault(tight, a)
        return sorted(((a, t) for t, a in seen.items()), key=lambda p: (sorted(p[1]), p[0]))

    @cached_property
    def is_pointed(self) -> bool:
        if not self.generators:
            return True
        if not self.facets:
            return False
        common = frozenset(range(len(self.generators)))
        for _, tight in self.facets:
            common &= tight
        return not common

    def smallest_face(self, indices: Iterable[int]) -> frozenset[int]:
        indices = set(indices)
        face = frozenset(range(len(self.generators)))
        for _, tight in self.facets:
            if indices <= tight:
                face &= tight
        return face

    @cached_property
    def extreme(self) -> tuple[int, ...]:
        return tuple(
            i for i in range(len(self.generators))
            if rank([self.generators[j] for j in self.smallest_face([i])], self.dim) == 1
        )

    @cached_property
    def faces(self) -> list[frozenset[int]]:
        """All faces as sets of generator indices (the apex is the empty set when pointed)."""
        full = frozenset(range(len(self.generators)))
        found = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for f in frontier:
                for _, tight in self.facets:
                    g = f & tight
                    if g not in found:
                        found.add(g)
                        nxt.append(g)
            frontier = nxt
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def contains(self, x: Sequence[int]) -> bool:
        if any(dot(e, x) != 0 for e in self.equations):
            return False
        return all(dot(a, x) >= 0 for a, _ in self.facets)

    def face_rank(self, face: Iterable[int]) -> int:
        return rank([self.generators[i] for i in face], self.dim)


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(int(x))
    return Fraction(x)


def _homogenize(vertex: Sequence[Fraction]) -> IntVector:
    den = math.lcm(*(x.denominator for x in vertex)) if vertex else 1
    return primitive([int(x * den) for x in vertex] + [den])


@dataclass(frozen=True)
class LatticePolyhedron:
    """Conv(vertices) + Cone(rays); vertices may be rational."""

    ambient_dim: int
    vertices: tuple[tuple[Fraction, ...], ...]
    rays: tuple[IntVector, ...]

    @classmethod
    def from_data(cls, vertices, rays=(), denominators=None, ambient_dim=None) -> "LatticePolyhedron":
        """Build a polyhedron, dropping redundant vertices and rays.

        ``vertices`` are numerator vectors, divided by ``denominators`` when given.
        """
        vertices = [tuple(_as_fraction(x) for x in v) for v in vertices]
        if denominators is not None:
            if len(denominators) != len(vertices):
                raise ValueError("one denominator per vertex required")
            vertices = [tuple(x / int(d) for x in v) for v, d in zip(vertices, denominators)]
        rays = [tuple(int(x) for x in r) for r in rays]
        if not vertices:
            raise ValueError("a lattice polyhedron needs at least one vertex")
        n = ambient_dim if ambient_dim is not None else len(vertices[0])
        if any(len(v) != n for v in vertices) or any(len(r) != n for r in rays):
            raise ValueError("dimension mismatch: coordinates must have length %d" % n)
        if any(not any(r) for r in rays):
            raise ValueError("zero ray")
        gens = [_homogenize(v) for v in vertices] + [primitive(r) + (0,) for r in rays]
        cone = Cone(gens, n + 1)
        if not cone.is_pointed:
            raise ValueError("polyhedron contains a line; only pointed polyhedra are supported")
        keep = [cone.generators[i] for i in cone.extreme]
        return cls._from_generators(keep, n)

    @classmethod
    def _from_generators(cls, gens: Iterable[IntVector], n: int) -> "LatticePolyhedron":
        verts, rays = [], []
        for g in gens:
            if g[-1] > 0:
                verts.append(tuple(Fraction(x, g[-1]) for x in g[:-1]))
            else:
                rays.append(tuple(g[:-1]))
        if not verts:
            raise ValueError("face at infinity is not a polyhedron")
        return cls(n, tuple(sorted(verts)), tuple(sorted(rays)))

    @cached_property
    def cone(self) -> Cone:
        return Cone([_homogenize(v) for v in self.vertices] + [r + (0,) for r in self.rays], self.ambient_dim + 1)

    @cached_property
    def dim(self) -> int:
        return len(self.cone.span) - 1

    @property
    def is_bounded(self) -> bool:
        return not self.rays

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for v in self.vertices for x in v)

    @property
    def denominators(self) -> list[int]:
        return [math.lcm(*(x.denominator for x in v)) if v else 1 for v in self.vertices]

    def sort_key(self):
        return (self.dim, self.vertices, self.rays)

    def facet_inequalities(self) -> list[tuple[IntVector, int]]:
        """Pairs (a, b) with a.x >= b on the polyhedron, one per facet; equations not included."""
        out = []
        gens = self.cone.generators
        for a, tight in self.cone.facets:
            if not any(gens[i][-1] > 0 for i in tight):
                continue
            out.append((a[:-1], -a[-1]))
        return out

    def contains(self, x: Sequence) -> bool:
        return self.cone.contains(_homogenize([_as_fraction(c) for c in x]))

    def to_dict(self) -> dict:
        dens = self.denominators
        return {
            "vertices": [[int(x * d) for x in v] for v, d in zip(self.vertices, dens)],
            "denominators": dens,
            "rays": [list(r) for r in self.rays],
        }

    @classmethod
    def from_dict(cls, data: dict, ambient_dim=None) -> "LatticePolyhedron":
        verts = [[_as_fraction(x) for x in v] for v in data["vertices"]]
        rays = [[int(x) for x in r] for r in data.get("rays", [])]
        dens = data.get("denominators")
        if dens is not None:
            dens = [int(d) for d in dens]
            if any(d <= 0 for d in dens):
                raise ValueError("denominators must be positive")
        return cls.from_data(verts, rays, dens, ambient_dim)


def faces(P: LatticePolyhedron) -> list[LatticePolyhedron]:
    """All nonempty faces of ``P``, ``P`` included, in canonical order."""
    gens = P.cone.generators
    out = []
    for f in P.cone.faces:
        if any(gens[i][-1] > 0 for i in f):
            out.append(LatticePolyhedron._from_generators([gens[i] for i in sorted(f)], P.ambient_dim))
    return sorted(set(out), key=LatticePolyhedron.sort_key)


def recession_cone(P: LatticePolyhedron) -> LatticePolyhedron:
    return LatticePolyhedron(P.ambient_dim, (tuple(Fraction(0) for _ in range(P.ambient_dim)),), P.rays)


def tangent_lattice(P: LatticePolyhedron) -> list[IntVector]:
    """Saturated Z-basis of the linear space parallel to the affine hull of ``P``."""
    v0 = P.vertices[0]
    dirs = []
    for v in P.vertices[1:]:
        diff = [a - b for a, b in zip(v, v0)]
        den = math.lcm(*(x.denominator for x in diff))
        dirs.append([int(x * den) for x in diff])
    dirs.extend(P.rays)
    dirs = [d for d in dirs if any(d)]
    return saturate(dirs)


def scale(P: LatticePolyhedron, d: int) -> LatticePolyhedron:
    return LatticePolyhedron(P.ambient_dim, tuple(tuple(x * d for x in v) for v in P.vertices), P.rays)


# ---------------------------------------------------------------------------
# subdivisions


@dataclass(frozen=True)
class Subdivision:
    """Face-closed complete polyhedral subdivision of R^n; cell ids are tuple positions."""

    ambient_dim: int
    cells: tuple[LatticePolyhedron, ...]

    def __len__(self):
        return len(self.cells)

    @cached_property
    def index(self) -> dict[LatticePolyhedron, int]:
        return {c: i for i, c in enumerate(self.cells)}

    def cell_id(self, P: LatticePolyhedron) -> int:
        try:
            return self.index[P]
        except KeyError:
            raise KeyError("cell is not part of the subdivision") from None

    @cached_property
    def face_ids(self) -> tuple[frozenset[int], ...]:
        """For each cell, the ids of all its faces (itself included)."""
        return tuple(frozenset(self.index[f] for f in faces(c)) for c in self.cells)

    @cached_property
    def coface_ids(self) -> tuple[frozenset[int], ...]:
        up = [set() for _ in self.cells]
        for i, fs in enumerate(self.face_ids):
            for j in fs:
                up[j].add(i)
        return tuple(frozenset(s) for s in up)

    @cached_property
    def covering_pairs(self) -> list[tuple[int, int]]:
        """Pairs (face id, cell id) with the face of codimension one in the cell."""
        return sorted(
            (j, i)
            for i, fs in enumerate(self.face_ids)
            for j in fs
            if self.cells[j].dim == self.cells[i].dim - 1
        )

    @cached_property
    def maximal_ids(self) -> list[int]:
        return [i for i, up in enumerate(self.coface_ids) if up == {i}]

    @property
    def vertices(self) -> list[tuple[Fraction, ...]]:
        return sorted({v for c in self.cells for v in c.vertices})

    def to_dict(self) -> dict:
        return {"dim": self.ambient_dim, "cells": [c.to_dict() for c in self.cells]}

    @classmethod
    def from_dict(cls, data: dict) -> "Subdivision":
        n = int(data["dim"])
        cells = [LatticePolyhedron.from_dict(c, n) for c in data["cells"]]
        return validate_subdivision(cells, n)


class Fan(Subdivision):
    """A complete subdivision all of whose cells are cones with apex 0."""


def _intersection_is_common_face(P: LatticePolyhedron, Q: LatticePolyhedron) -> bool:
    """True iff C(P) and C(Q) meet in a face of each (so P and Q meet in a common face)."""
    CP, CQ = P.cone, Q.cone
    N = CP.dim
    eqs = list(CP.equations) + list(CQ.equations)
    ineqs = [a for a, _ in CP.facets] + [a for a, _ in CQ.facets]
    base = rank(eqs, N) if eqs else 0
    if base == N:
        point = None
    else:
        need = N - 1 - base
        point = [0] * N
        found = False
        for subset in itertools.combinations(range(len(ineqs)), need):
            rows = eqs + [ineqs[i] for i in subset]
            if rank(rows, N) != N - 1:
                continue
            ker = integer_kernel(rows, N)
            r = ker[0]
            for cand in (r, tuple(-x for x in r)):
                if all(dot(a, cand) >= 0 for a in ineqs):
                    point = [p + c for p, c in zip(point, cand)]
                    found = True
        if not found:
            point = None
    for A, B in ((CP, CQ), (CQ, CP)):
        if point is None:
            face = frozenset()
        else:
            face = frozenset(range(len(A.generators)))
            for a, tight in A.facets:
                if dot(a, point) == 0:
                    face &= tight
        if not all(B.contains(A.generators[i]) for i in face):
            return False
    return True


def _canonical_cells(cells: Iterable[LatticePolyhedron]) -> list[LatticePolyhedron]:
    closed = set()
    for c in cells:
        closed.update(faces(c))
    return sorted(closed, key=LatticePolyhedron.sort_key)


def validate_subdivision(cells: Sequence, n: int | None = None) -> Subdivision:
    """Check and canonicalize a complete polyhedral subdivision of R^n.

    Missing faces are added. Raises SubdivisionError naming cell ids: input
    positions for dimension errors, canonical ids otherwise.
    """
    cells = [c if isinstance(c, LatticePolyhedron) else LatticePolyhedron.from_dict(c, n) for c in cells]
    if not cells:
        raise SubdivisionError("subdivision not complete: no cells")
    if n is None:
        n = cells[0].ambient_dim
    bad = [i for i, c in enumerate(cells) if c.ambient_dim != n]
    if bad:
        raise SubdivisionError("dimension mismatch: input cells %s are not in R^%d" % (bad, n))
    canon = _canonical_cells(cells)
    sub = Subdivision(n, tuple(canon))
    maximal = sub.maximal_ids

    overlaps = []
    for i, j in itertools.combinations(maximal, 2):
        if not _intersection_is_common_face(canon[i], canon[j]):
            overlaps.append((i, j))
    if overlaps:
        raise SubdivisionError("cells overlap in non-face: pairs %s" % overlaps)

    low = [i for i in maximal if canon[i].dim != n]
    if low:
        raise SubdivisionError("dimension mismatch: maximal cells %s have dimension < %d" % (low, n))
    if n == 0:
        return sub

    walls: dict[tuple, list[int]] = {}
    for i in maximal:
        C = canon[i].cone
        for f in C.faces:
            if C.face_rank(f) == n:
                key = tuple(sorted(C.generators[k] for k in f))
                walls.setdefault(key, []).append(i)
    open_walls = []
    rec_walls = []
    for key, owners in walls.items():
        at_infinity = all(g[-1] == 0 for g in key)
        if at_infinity:
            rec_walls.append(key)
        if len(owners) != (1 if at_infinity else 2):
            open_walls.extend(owners)
    rec_ridges: dict[tuple, int] = {}
    for key in rec_walls:
        C = Cone(key, n + 1)
        for f in C.faces:
            if C.face_rank(f) == n - 1:
                ridge = tuple(sorted(C.generators[k] for k in f))
                rec_ridges[ridge] = rec_ridges.get(ridge, 0) + 1
    if open_walls or any(v != 2 for v in rec_ridges.values()):
        if not open_walls:
            open_walls = [i for i in maximal if canon[i].rays]
        raise SubdivisionError("subdivision not complete: cells %s have unmatched walls" % sorted(set(open_walls)))
    return sub


def scale_subdivision(sub: Subdivision, d: int) -> Subdivision:
    return validate_subdivision([scale(c, d) for c in sub.cells], sub.ambient_dim)


def _quotient_projection(basis: list[IntVector], n: int) -> list[IntVector]:
    """Integer matrix whose rows give coordinates on Z^n / span(basis)."""
    if not basis:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    perp = integer_kernel(basis, n)
    return sorted(hermite_rows(perp, n)) if perp else []


def star_fan(sub: Subdivision, cell) -> Fan:
    """The fan of cells around ``cell`` in R^n / span(cell), as a complete fan."""
    sigma = sub.cells[cell] if isinstance(cell, int) else cell
    if sigma not in sub.index:
        raise KeyError("cell is not part of the subdivision")
    sid = sub.index[sigma]
    n = sub.ambient_dim
    proj = _quotient_projection(tangent_lattice(sigma), n)
    m = len(proj)
    v0 = sigma.vertices[0]
    cones = []
    for tid in sorted(sub.coface_ids[sid]):
        tau = sub.cells[tid]
        dirs = list(tau.rays)
        for v in tau.vertices:
            diff = [a - b for a, b in zip(v, v0)]
            den = math.lcm(*(x.denominator for x in diff)) if diff else 1
            dirs.append([int(x * den) for x in diff])
        images = [tuple(dot(row, d) for row in proj) for d in dirs]
        images = [im for im in images if any(im)]
        cones.append(LatticePolyhedron.from_data([[0] * m], images, ambient_dim=m))
    fan = validate_subdivision(cones, m)
    return Fan(fan.ambient_dim, fan.cells)


def recession_fan(sub: Subdivision) -> Fan:
    """The fan of recession cones of the cells, as a subdivision of its own."""
    fan = validate_subdivision({recession_cone(c) for c in sub.cells}, sub.ambient_dim)
    return Fan(fan.ambient_dim, fan.cells)


def _pulling_simplices(P: LatticePolyhedron) -> list[list[tuple[Fraction, ...]]]:
    if P.dim == 0:
        return [[P.vertices[0]]]
    v0 = P.vertices[0]
    out = []
    for F in faces(P):
        if F.dim == P.dim - 1 and v0 not in F.vertices:
            out.extend(s + [v0] for s in _pulling_simplices(F))
    return out


def normalized_volume(P: LatticePolyhedron) -> Fraction:
    """n! times the Euclidean volume of a bounded full-dimensional polytope (0 if lower-dimensional)."""
    if P.rays:
        raise ValueError("volume of an unbounded polyhedron")
    n = P.ambient_dim
    if P.dim < n:
        return Fraction(0)
    total = Fraction(0)
    for s in _pulling_simplices(P):
        rows = [[a - b for a, b in zip(v, s[0])] for v in s[1:]]
        den = math.lcm(*(x.denominator for r in rows for x in r))
        total += Fraction(abs(determinant([[int(x * den) for x in r] for r in rows])), den**n)
    return total
