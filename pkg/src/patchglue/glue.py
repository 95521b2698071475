"""The glued cell model of the positive special fibre.

Cells are pairs (sigma, eps_hat) with eps_hat in Z_2(Rec sigma); the cell is
the open orthant R(sigma) of dimension n - dim sigma. Its closure contains
(tau, image of eps_hat) for every tau having sigma as a face.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .degeneration import require_strongly_unimodular
from .polyhedra import Subdivision
from .strata import cell_quotients
from .unionfind import UnionFind
from .znlinalg import Mod2Vector


class GlueError(ValueError):
    pass


@dataclass(frozen=True)
class GluedComplex:
    n: int
    cells: tuple[tuple[int, Mod2Vector], ...]
    dims: tuple[int, ...]
    # covering relations (lower, higher): lower lies in the boundary of higher
    face_pairs: frozenset[tuple[int, int]]

    @cached_property
    def index(self) -> dict[tuple[int, Mod2Vector], int]:
        return {c: i for i, c in enumerate(self.cells)}

    @cached_property
    def facets_of(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for lo, hi in sorted(self.face_pairs):
            out[hi].append(lo)
        return out

    @cached_property
    def cofacets_of(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for lo, hi in sorted(self.face_pairs):
            out[lo].append(hi)
        return out

    def closure(self) -> set[tuple[int, int]]:
        """All pairs (a, b), a != b, with a in the closure of b."""
        below: dict[int, set[int]] = {}
        for c in sorted(range(len(self.cells)), key=lambda i: self.dims[i]):
            s = set()
            for f in self.facets_of.get(c, []):
                s.add(f)
                s |= below[f]
            below[c] = s
        return {(a, b) for b, s in below.items() for a in s}

    @property
    def f_vector(self) -> list[int]:
        counts = Counter(self.dims)
        return [counts.get(d, 0) for d in range(self.n + 1)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cells": [
                {"id": i, "cell": c, "eps": list(e), "dim": d}
                for i, ((c, e), d) in enumerate(zip(self.cells, self.dims))
            ],
            "faces": [list(p) for p in sorted(self.face_pairs)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GluedComplex":
        cells = data["cells"]
        if [c["id"] for c in cells] != list(range(len(cells))):
            raise ValueError("cell ids must be 0..N-1 in order")
        return cls(
            int(data["n"]),
            tuple((int(c["cell"]), tuple(int(b) for b in c["eps"])) for c in cells),
            tuple(int(c["dim"]) for c in cells),
            frozenset((int(a), int(b)) for a, b in data["faces"]),
        )


def build_glued_complex(sub: Subdivision) -> GluedComplex:
    require_strongly_unimodular(sub)
    n = sub.ambient_dim
    qs = cell_quotients(sub)
    cells, dims = [], []
    for cid, (c, q) in enumerate(zip(sub.cells, qs)):
        for e in q.recession.classes:
            cells.append((cid, e))
            dims.append(n - c.dim)
    index = {c: i for i, c in enumerate(cells)}
    pairs = set()
    for face, cid in sub.covering_pairs:
        target = qs[cid].recession
        for e in qs[face].recession.classes:
            pairs.add((index[(cid, target.canonical_form(e))], index[(face, e)]))
    return GluedComplex(n, tuple(cells), tuple(dims), frozenset(pairs))


def check_complex(G: GluedComplex) -> None:
    """Raise GlueError unless the face pairs form a graded, pure poset on the cells."""
    N = len(G.cells)
    for lo, hi in G.face_pairs:
        if not (0 <= lo < N and 0 <= hi < N):
            raise GlueError("face pair (%d, %d) refers to a missing cell" % (lo, hi))
        if G.dims[hi] != G.dims[lo] + 1:
            raise GlueError("face pair (%d, %d) is not of codimension one" % (lo, hi))
    below = G.closure()
    if any((b, a) in below for a, b in below):
        raise GlueError("face relation has a cycle")
    bare = [c for c in range(N) if G.dims[c] > 0 and not G.facets_of.get(c)]
    if bare:
        raise GlueError("cells %s of positive dimension have no faces" % bare)
    loose = [c for c in range(N) if G.dims[c] == 1 and len(G.facets_of.get(c, [])) != 2]
    if loose:
        raise GlueError("1-cells %s do not have exactly two endpoints" % loose)
    for c in range(N):
        for f in G.facets_of.get(c, []):
            # every face of dimension d - 2 under c is reached through exactly two facets
            for g in G.facets_of.get(f, []):
                through = [h for h in G.facets_of[c] if g in G.facets_of.get(h, [])]
                if len(through) != 2:
                    raise GlueError("cell %d is not a regular cell at face %d" % (c, g))


def chi_direct(G: GluedComplex) -> int:
    return sum((-1) ** d for d in G.dims)


def components(G: GluedComplex) -> list[list[int]]:
    uf = UnionFind(len(G.cells))
    for a, b in G.face_pairs:
        uf.union(a, b)
    return uf.groups()


@dataclass(frozen=True)
class SurfaceType:
    closed: bool
    orientable: bool
    chi: int
    connected: bool
    name: str
    genus: int | None = None
    crosscaps: int | None = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("closed", "orientable", "chi", "connected", "name", "genus", "crosscaps")}


def _boundary_cycle(G: GluedComplex, c: int) -> list[tuple[int, int, int]]:
    """Oriented boundary of a 2-cell as (edge, tail vertex, head vertex) triples."""
    edges = G.facets_of.get(c, [])
    ends = {}
    for e in edges:
        vs = G.facets_of.get(e, [])
        if len(vs) != 2:
            raise GlueError("1-cell %d does not have two distinct endpoints" % e)
        ends[e] = tuple(vs)
    if not edges:
        raise GlueError("2-cell %d has no boundary" % c)
    start = edges[0]
    tail, head = ends[start]
    cycle = [(start, tail, head)]
    used = {start}
    while head != tail or len(cycle) < len(edges):
        nxt = [e for e in edges if e not in used and head in ends[e]]
        if not nxt:
            break
        e = nxt[0]
        a, b = ends[e]
        cycle.append((e, head, b if a == head else a))
        used.add(e)
        head = cycle[-1][2]
    if len(cycle) != len(edges) or cycle[-1][2] != tail:
        raise GlueError("boundary of 2-cell %d is not a single polygon" % c)
    return cycle


def surface_type(G: GluedComplex) -> SurfaceType:
    if G.n != 2:
        raise GlueError("surface classification needs n = 2, got n = %d" % G.n)
    incidence = Counter(lo for lo, hi in G.face_pairs if G.dims[lo] == 1)
    edges = [i for i, d in enumerate(G.dims) if d == 1]
    if any(incidence[e] != 2 for e in edges):
        raise GlueError("not closed: 1-cells %s are not in exactly two 2-cell boundaries"
                        % [e for e in edges if incidence[e] != 2])
    faces2 = [i for i, d in enumerate(G.dims) if d == 2]
    direction = {c: {e: (t, h) for e, t, h in _boundary_cycle(G, c)} for c in faces2}
    by_edge = defaultdict(list)
    for c in faces2:
        for e in direction[c]:
            by_edge[e].append(c)
    orient: dict[int, int] = {}
    orientable = True
    for start in faces2:
        if start in orient:
            continue
        orient[start] = 1
        stack = [start]
        while stack:
            c = stack.pop()
            for e, (t, h) in direction[c].items():
                for d in by_edge[e]:
                    if d == c:
                        continue
                    want = -orient[c] if direction[d][e] == (t, h) else orient[c]
                    if d not in orient:
                        orient[d] = want
                        stack.append(d)
                    elif orient[d] != want:
                        orientable = False
    chi = chi_direct(G)
    connected = len(components(G)) == 1
    if not connected:
        return SurfaceType(True, orientable, chi, False, "disconnected")
    if orientable:
        g = (2 - chi) // 2
        name = {0: "sphere", 1: "torus"}.get(g, "orientable surface of genus %d" % g)
        return SurfaceType(True, True, chi, True, name, genus=g)
    k = 2 - chi
    name = {1: "RP2", 2: "Klein bottle"}.get(k, "non-orientable surface with %d crosscaps" % k)
    return SurfaceType(True, False, chi, True, name, crosscaps=k)


@dataclass
class TopologyReport:
    f_vector: list[int]
    chi_direct: int
    components: list[list[int]]
    surface: SurfaceType | None = None
    chi_formula: int | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "f_vector": self.f_vector,
            "chi_direct": self.chi_direct,
            "chi_formula": self.chi_formula,
            "components": {"count": len(self.components), "cells": self.components},
            "surface": self.surface.to_dict() if self.surface else None,
            "notes": self.notes,
        }


def topology_report(G: GluedComplex, chi_formula: int | None = None) -> TopologyReport:
    report = TopologyReport(G.f_vector, chi_direct(G), components(G), chi_formula=chi_formula)
    if G.n == 2:
        try:
            report.surface = surface_type(G)
        except GlueError as exc:
            report.notes.append(str(exc))
    return report
