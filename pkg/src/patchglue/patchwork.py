"""Combinatorial patchworking of real hypersurfaces from a convex lifting.

The combinatorial model glues 2^n reflected copies of a lattice polytope D.
Copies eps and eps' are identified along a face F of D when eps + eps' lies
in the mod 2 span of the inward normals of the facets of D containing F.
For a smooth D this span is the mod 2 reduction of the saturated normal
lattice of F, so the glued space is the real toric variety of D.
"""
from __future__ import annotations

import itertools
import math
import os
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .polyhedra import Fan, LatticePolyhedron, normalized_volume, validate_subdivision
from .unionfind import UnionFind
from .znlinalg import IntVector, Mod2Subspace, Mod2Vector, determinant, dot, mod2


class PatchworkError(ValueError):
    pass


def _sign_of(x) -> int:
    if isinstance(x, str):
        if x not in ("+", "-"):
            raise PatchworkError("sign must be '+' or '-', got %r" % x)
        return 1 if x == "+" else -1
    x = Fraction(x)
    if x == 0:
        raise PatchworkError("zero coefficient")
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class ViroInput:
    points: tuple[IntVector, ...]
    lifting: tuple[int, ...]
    signs: tuple[int, ...]
    coeffs: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        m = len(self.points)
        if m == 0:
            raise PatchworkError("no lattice points")
        if len(self.lifting) != m or len(self.signs) != m:
            raise PatchworkError("points, lifting and signs must have equal length")
        if len(set(self.points)) != m:
            raise PatchworkError("repeated lattice point")
        if len({len(p) for p in self.points}) != 1:
            raise PatchworkError("points of mixed dimension")

    @property
    def n(self) -> int:
        return len(self.points[0])

    @classmethod
    def from_dict(cls, data: dict) -> "ViroInput":
        points = tuple(tuple(int(x) for x in p) for p in data["points"])
        lifting = tuple(int(x) for x in data["lifting"])
        coeffs = None
        if data.get("coeffs") is not None:
            coeffs = tuple(Fraction(str(c)) for c in data["coeffs"])
            signs = tuple(_sign_of(c) for c in coeffs)
            if "signs" in data and tuple(_sign_of(s) for s in data["signs"]) != signs:
                raise PatchworkError("signs disagree with coefficient signs")
        else:
            signs = tuple(_sign_of(s) for s in data["signs"])
        return cls(points, lifting, signs, coeffs)

    def to_dict(self) -> dict:
        out = {
            "points": [list(p) for p in self.points],
            "lifting": list(self.lifting),
            "signs": ["+" if s > 0 else "-" for s in self.signs],
        }
        if self.coeffs is not None:
            out["coeffs"] = [str(c) for c in self.coeffs]
        return out

    @cached_property
    def polytope(self) -> LatticePolyhedron:
        return LatticePolyhedron.from_data(self.points)

    def sign_map(self) -> dict[IntVector, int]:
        return dict(zip(self.points, self.signs))


def simplex_points(d: int) -> list[IntVector]:
    """Lattice points of the triangle with vertices 0, d e1, d e2."""
    return [(i, j) for j in range(d + 1) for i in range(d + 1 - j)]


def standard_lifting(point: IntVector) -> int:
    """i^2 + ij + j^2: convex, and its regular subdivision of d*triangle is the unimodular one."""
    i, j = point
    return i * i + i * j + j * j


def harnack_signs(d: int) -> dict[IntVector, int]:
    """Harnack's sign rule: a minus exactly at points with both coordinates odd."""
    if d < 1:
        raise PatchworkError("degree must be at least 1")
    return {p: -1 if p[0] % 2 and p[1] % 2 else 1 for p in simplex_points(d)}


def triangle_input(d: int, signs: dict[IntVector, int], coeffs=None) -> ViroInput:
    pts = simplex_points(d)
    return ViroInput(
        tuple(pts),
        tuple(standard_lifting(p) for p in pts),
        tuple(signs[p] for p in pts),
        None if coeffs is None else tuple(Fraction(coeffs[p]) for p in pts),
    )


def extend_signs(signs: dict, eps: Mod2Vector, points=None) -> dict:
    """Signs in the orthant eps: s(I) * (-1)^<eps, I>. Accepts +1/-1 or '+'/'-' values."""
    if points is not None:
        missing = [p for p in points if p not in signs]
        if missing:
            raise PatchworkError("missing sign at %s" % (missing[0],))
    flip = {1: -1, -1: 1, "+": "-", "-": "+"}
    out = {}
    for p, s in signs.items():
        if s not in flip:
            raise PatchworkError("bad sign %r at %s" % (s, p))
        out[p] = flip[s] if dot(eps, p) % 2 else s
    return out


# ---------------------------------------------------------------------------
# regular subdivision


@dataclass(frozen=True)
class Triangulation:
    points: tuple[IntVector, ...]
    cells: tuple[tuple[int, ...], ...]  # maximal cells as sorted point indices
    n: int

    @cached_property
    def is_simplicial(self) -> bool:
        return all(len(c) == self.n + 1 for c in self.cells)

    def cell_volume(self, cell: tuple[int, ...]) -> Fraction:
        return normalized_volume(LatticePolyhedron.from_data([self.points[i] for i in cell]))

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """All nonempty faces of a simplicial subdivision, by size then lexicographically."""
        if not self.is_simplicial:
            raise PatchworkError("faces are only enumerated for triangulations")
        out = set()
        for c in self.cells:
            for k in range(1, len(c) + 1):
                out.update(itertools.combinations(c, k))
        return tuple(sorted(out, key=lambda f: (len(f), f)))


def regular_subdivision(inp: ViroInput) -> Triangulation:
    """Projection of the lower faces of the convex hull of the lifted points."""
    n = inp.n
    delta = inp.polytope
    if delta.dim != n:
        raise PatchworkError("Newton polytope is not full-dimensional")
    lifted = [p + (h,) for p, h in zip(inp.points, inp.lifting)]
    up = tuple(int(i == n) for i in range(n + 1))
    hull = LatticePolyhedron.from_data(lifted, rays=[up])
    cells = set()
    for a, b in hull.facet_inequalities():
        if a[-1] <= 0:
            continue
        cells.add(tuple(i for i, q in enumerate(lifted) if dot(a, q) == b))
    tri = Triangulation(inp.points, tuple(sorted(cells)), n)
    total = sum((tri.cell_volume(c) for c in tri.cells), Fraction(0))
    if total != normalized_volume(delta):
        raise PatchworkError("lower faces do not cover the Newton polytope")
    return tri


def check_combinatorial(tri: Triangulation) -> bool:
    """True iff every maximal cell is a unimodular simplex."""
    if not tri.is_simplicial:
        return False
    for c in tri.cells:
        p0 = tri.points[c[0]]
        rows = [[a - b for a, b in zip(tri.points[i], p0)] for i in c[1:]]
        if abs(determinant(rows)) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# the glued complex of reflected copies


def normal_fan(delta: LatticePolyhedron) -> Fan:
    """Inner normal fan of a full-dimensional lattice polytope."""
    if delta.dim != delta.ambient_dim or delta.rays:
        raise PatchworkError("normal fan needs a full-dimensional polytope")
    ineq = delta.facet_inequalities()
    origin = [(0,) * delta.ambient_dim]
    cones = [
        LatticePolyhedron.from_data(origin, [a for a, b in ineq if dot(a, v) == b])
        for v in delta.vertices
    ]
    sub = validate_subdivision(cones, delta.ambient_dim)
    return Fan(sub.ambient_dim, sub.cells)


def boundary_subspace(delta: LatticePolyhedron, point_set) -> Mod2Subspace:
    """Mod 2 span of the inward normals of the facets of ``delta`` containing all of ``point_set``."""
    normals = [
        a for a, b in delta.facet_inequalities()
        if all(dot(a, p) == b for p in point_set)
    ]
    return Mod2Subspace.from_vectors(delta.ambient_dim, [mod2(a) for a in normals])


@dataclass(frozen=True)
class PatchworkComplex:
    triangulation: Triangulation
    signs: tuple[int, ...]
    facets: tuple[tuple[IntVector, int], ...]
    ambient_cells: tuple[tuple[tuple[int, ...], Mod2Vector], ...]
    curve_cells: tuple[tuple[tuple[int, ...], Mod2Vector], ...]
    curve_dims: tuple[int, ...]
    curve_pairs: frozenset[tuple[int, int]]  # (lower, higher)
    boundary_cells: dict[int, tuple[int, ...]]  # curve cell -> facets of D containing it
    pieces: dict[tuple[tuple[int, ...], Mod2Vector], tuple[tuple[int, ...], tuple[int, ...]]]

    @property
    def n(self) -> int:
        return self.triangulation.n

    @property
    def ambient_chi(self) -> int:
        return sum((-1) ** (len(f) - 1) for f, _ in self.ambient_cells)


def build_patchwork(tri: Triangulation, signs) -> PatchworkComplex:
    """Patchwork complex of a unimodular triangulation; ``signs`` maps points (or indices) to +1/-1."""
    if not check_combinatorial(tri):
        raise PatchworkError("combinatorial mode requires unimodular triangulation")
    pts = tri.points
    if isinstance(signs, dict):
        missing = [p for p in pts if p not in signs]
        if missing:
            raise PatchworkError("missing sign at %s" % (missing[0],))
        signs = tuple(signs[p] for p in pts)
    signs = tuple(_sign_of(x) for x in signs)
    if len(signs) != len(pts):
        raise PatchworkError("one sign per point required")
    n = tri.n
    used = sorted({i for c in tri.cells for i in c})
    delta = LatticePolyhedron.from_data([pts[i] for i in used])
    facets = tuple(delta.facet_inequalities())
    all_eps = list(itertools.product((0, 1), repeat=n))

    def sign(i: int, eps) -> int:
        return signs[i] * (-1) ** (dot(eps, pts[i]) % 2)

    ambient, curve, dims, boundary = [], [], [], {}
    space_of = {}
    for f in tri.faces:
        verts = [pts[i] for i in f]
        on = tuple(k for k, (a, b) in enumerate(facets) if all(dot(a, p) == b for p in verts))
        space = Mod2Subspace.from_vectors(n, [mod2(facets[k][0]) for k in on])
        space_of[f] = space
        for eps in sorted({space.reduce(e) for e in all_eps}):
            ambient.append((f, eps))
            if len(f) >= 2 and len({sign(i, eps) for i in f}) == 2:
                boundary[len(curve)] = on
                curve.append((f, eps))
                dims.append(len(f) - 2)
    index = {c: i for i, c in enumerate(curve)}
    pairs = set()
    for hi, (f, eps) in enumerate(curve):
        if len(f) < 3:
            continue
        for drop in range(len(f)):
            g = f[:drop] + f[drop + 1:]
            lo = index.get((g, space_of[g].reduce(eps)))
            if lo is not None:
                pairs.add((lo, hi))
    pieces = {}
    for c in tri.cells:
        for eps in all_eps:
            plus = tuple(i for i in c if sign(i, eps) > 0)
            minus = tuple(i for i in c if sign(i, eps) < 0)
            pieces[(c, eps)] = (plus, minus)
    return PatchworkComplex(
        tri, signs, facets, tuple(ambient), tuple(curve), tuple(dims),
        frozenset(pairs), boundary, pieces,
    )


@dataclass
class CurveReport:
    components: int
    chi: int
    closed: bool
    boundary_incidences: dict[int, int]
    f_vector: list[int]

    def to_dict(self) -> dict:
        return {
            "components": self.components,
            "chi": self.chi,
            "closed": self.closed,
            "boundary_incidences": {str(k): v for k, v in sorted(self.boundary_incidences.items())},
            "f_vector": self.f_vector,
        }


def curve_report(P: PatchworkComplex) -> CurveReport:
    if P.n != 2:
        raise PatchworkError("curve report needs n = 2, got n = %d" % P.n)
    m = len(P.curve_cells)
    uf = UnionFind(m)
    cofaces = Counter()
    for lo, hi in P.curve_pairs:
        uf.union(lo, hi)
        cofaces[lo] += 1
    top = P.n - 1
    # a pseudomanifold without boundary: every codimension-one cell has two cofaces
    closed = all(cofaces[i] == 2 for i, d in enumerate(P.curve_dims) if d == top - 1)
    incid = defaultdict(int)
    for i, fs in P.boundary_cells.items():
        if P.curve_dims[i] == 0:
            for k in fs:
                incid[k] += 1
    counts = Counter(P.curve_dims)
    return CurveReport(
        len(uf.groups()) if m else 0,
        sum((-1) ** d for d in P.curve_dims),
        closed,
        {k: incid.get(k, 0) for k in range(len(P.facets))},
        [counts.get(d, 0) for d in range(max(top, 0) + 1)],
    )


# ---------------------------------------------------------------------------
# numeric oracle: sign changes of the actual polynomial for small t


@dataclass
class OracleEstimate:
    components: int
    per_copy: dict[Mod2Vector, int]
    note: str

    def to_dict(self) -> dict:
        return {
            "components": self.components,
            "per_copy": {"".join(map(str, k)): v for k, v in sorted(self.per_copy.items())},
            "note": self.note,
        }


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PATCHGLUE_THREADS", "")))
    except ValueError:
        return min(4, os.cpu_count() or 1)


_GRID_DIRECTIONS = {(1, 0), (0, 1), (1, -1)}


def _log_t(t) -> float:
    t = Fraction(t)
    return math.log(t.numerator) - math.log(t.denominator)


def numeric_oracle(inp: ViroInput, t=Fraction(1, 1024), resolution: int = 512,
                   sharpness: float | None = None) -> OracleEstimate:
    """Count components of {sum c_I t^nu(I) x^I = 0} in the real toric surface of D.

    The surface is charted by the polytope itself: a point u of D with facet
    distances l_F(u) sits over x_j = prod_F l_F(u)^(s a_Fj) in each orthant,
    with s = sharpness * log(1/t). Signs are sampled on a triangular grid of D
    and the zero set is traced by marching triangles; grid edges on the
    boundary are glued across copies like the combinatorial model.
    """
    if inp.n != 2:
        raise PatchworkError("numeric oracle is implemented for curves (n = 2) only")
    if Fraction(t) <= 0 or Fraction(t) >= 1:
        raise PatchworkError("t must lie in (0, 1)")
    if resolution < 8:
        raise PatchworkError("resolution must be at least 8")
    delta = inp.polytope
    if delta.dim != 2:
        raise PatchworkError("Newton polytope is not full-dimensional")
    verts = [tuple(int(x) for x in v) for v in delta.vertices]
    facets = delta.facet_inequalities()
    for a, _ in facets:
        direction = (a[1], -a[0])
        if direction not in _GRID_DIRECTIONS and (-direction[0], -direction[1]) not in _GRID_DIRECTIONS:
            raise PatchworkError("edge direction %s is not supported by the grid" % (direction,))
    lo = [min(v[k] for v in verts) for k in range(2)]
    hi = [max(v[k] for v in verts) for k in range(2)]
    R = max(1, resolution // max(hi[0] - lo[0], hi[1] - lo[1]))
    xs, ys = np.meshgrid(np.arange(R * lo[0], R * hi[0] + 1), np.arange(R * lo[1], R * hi[1] + 1), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    A = np.array([a for a, _ in facets], dtype=np.int64)
    B = np.array([b for _, b in facets], dtype=np.int64)
    dist = xs[:, None] * A[None, :, 0] + ys[:, None] * A[None, :, 1] - R * B[None, :]  # R * l_F
    inside = (dist >= 0).all(axis=1)
    xs, ys, dist = xs[inside], ys[inside], dist[inside]
    pid = {(int(x), int(y)): k for k, (x, y) in enumerate(zip(xs, ys))}

    tris = []
    for (x, y), k in pid.items():
        r, u, d = pid.get((x + 1, y)), pid.get((x, y + 1)), pid.get((x + 1, y + 1))
        if r is not None and u is not None:
            tris.append((k, r, u))
            if d is not None:
                tris.append((r, d, u))
    tris = np.array(tris, dtype=np.int64)

    nu = np.array(inp.lifting, dtype=float)
    if sharpness is None:
        sharpness = max(1.0, float(nu.max() - nu.min()) + 1.0) / 2.5
    log_t = _log_t(t)
    s = sharpness * -log_t
    expo = np.array([[dot(a, I) - b for a, b in facets] for I in inp.points], dtype=float)  # m x F
    with np.errstate(divide="ignore", invalid="ignore"):
        log_l = np.log(dist / R)
        # 0 * log 0 counts as 0: a monomial on a facet does not vanish there
        weighted = np.where(expo[None, :, :] == 0, 0.0, expo[None, :, :] * log_l[:, None, :]).sum(axis=2)
    if inp.coeffs is not None:
        mags = np.array([math.log(abs(float(c))) for c in inp.coeffs])
    else:
        mags = np.zeros(len(inp.points))
    logs = s * weighted + (nu * log_t + mags)[None, :]  # points x monomials
    top = logs.max(axis=1, keepdims=True)
    scaled = np.exp(logs - top)
    pts = np.array(inp.points, dtype=np.int64)
    base = np.array(inp.signs, dtype=float)

    copies = list(itertools.product((0, 1), repeat=2))

    def sample(eps):
        par = (pts @ np.array(eps)) % 2
        val = scaled @ (base * (1 - 2 * par))
        return np.where(val >= 0, 1, -1)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        signs = dict(zip(copies, pool.map(sample, copies)))

    tight = (dist == 0)
    spaces: dict[bytes, Mod2Subspace] = {}

    def reduce(mask, eps):
        key = mask.tobytes()
        if key not in spaces:
            spaces[key] = Mod2Subspace.from_vectors(2, [mod2(facets[f][0]) for f in np.flatnonzero(mask)])
        return spaces[key].reduce(eps)

    keys: dict[tuple, int] = {}
    segments = []
    per_copy = {}
    for eps in copies:
        sg = signs[eps][tris]
        mixed = np.flatnonzero(~((sg == sg[:, :1]).all(axis=1)))
        local = []
        for ti in mixed:
            tri = tris[ti]
            ends = []
            for a, b in ((0, 1), (1, 2), (0, 2)):
                p, q = int(tri[a]), int(tri[b])
                if signs[eps][p] != signs[eps][q]:
                    e = reduce(tight[p] & tight[q], eps)
                    key = (min(p, q), max(p, q), e)
                    ends.append(keys.setdefault(key, len(keys)))
            local.append(tuple(ends))
        segments.extend(local)
        per_copy[eps] = local
    uf = UnionFind(len(keys))
    for a, b in segments:
        uf.union(a, b)
    count = {}
    for eps, local in per_copy.items():
        cuf = UnionFind(len(keys))
        used = set()
        for a, b in local:
            cuf.union(a, b)
            used.update((a, b))
        count[eps] = len(cuf.groups(used))
    note = "grid step 1/%d, %d samples per copy, sharpness %.3g" % (R, len(xs), sharpness)
    return OracleEstimate(len(uf.groups()) if keys else 0, count, note)
