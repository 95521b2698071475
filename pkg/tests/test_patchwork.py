import itertools
import random
from fractions import Fraction

import pytest

from patchglue.glue import build_glued_complex, surface_type
from patchglue.patchwork import (
    PatchworkError,
    ViroInput,
    boundary_subspace,
    build_patchwork,
    check_combinatorial,
    curve_report,
    extend_signs,
    harnack_signs,
    normal_fan,
    numeric_oracle,
    regular_subdivision,
    simplex_points,
    standard_lifting,
    triangle_input,
)
from patchglue.polyhedra import LatticePolyhedron, faces
from patchglue.strata import chi_formula
from patchglue.unionfind import UnionFind
from patchglue.znlinalg import Mod2Subspace, mod2, saturate

L = LatticePolyhedron.from_data


def harnack_count(d):
    return (d - 1) * (d - 2) // 2 + 1


def planar_curve_components(d, signs, tri):
    """Trace the patchwork in the plane picture of the four reflected triangles.

    Points on the axes are shared by neighbouring copies automatically; the
    outer edge i + j = d is glued to its reflection through the origin.
    """
    def place(p, eps):
        return ((-1) ** eps[0] * Fraction(p[0]), (-1) ** eps[1] * Fraction(p[1]))

    def key(a, b):
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        if abs(mid[0]) + abs(mid[1]) == d:
            mid = max(mid, (-mid[0], -mid[1]))
        return mid

    ids, edges = {}, []
    for eps in itertools.product((0, 1), repeat=2):
        s = extend_signs(signs, eps)
        for cell in tri.cells:
            pts = [tri.points[i] for i in cell]
            ends = [key(place(p, eps), place(q, eps)) for p, q in itertools.combinations(pts, 2) if s[p] != s[q]]
            if ends:
                edges.append(tuple(ids.setdefault(e, len(ids)) for e in ends))
    uf = UnionFind(len(ids))
    for a, b in edges:
        uf.union(a, b)
    return len(uf.groups())


def random_signs(d, rng):
    return {p: rng.choice((1, -1)) for p in simplex_points(d)}


def test_regular_subdivision_examples():
    trivial = ViroInput(((0, 0), (1, 0), (0, 1)), (0, 0, 0), (1, 1, 1))
    assert regular_subdivision(trivial).cells == ((0, 1, 2),)
    seg = ViroInput(((0,), (1,), (2,)), (0, 0, 1), (1, 1, 1))
    assert regular_subdivision(seg).cells == ((0, 1), (1, 2))
    four = regular_subdivision(triangle_input(2, harnack_signs(2)))
    assert len(four.cells) == 4 and check_combinatorial(four)
    assert all(four.cell_volume(c) == 1 for c in four.cells)


def test_squared_norm_lifting_leaves_a_square():
    pts = simplex_points(2)
    tri = regular_subdivision(ViroInput(tuple(pts), tuple(i * i + j * j for i, j in pts), (1,) * 6))
    assert sorted(len(c) for c in tri.cells) == [3, 3, 4]
    assert not check_combinatorial(tri)


def test_check_combinatorial_examples():
    pts = simplex_points(2)
    flat = regular_subdivision(ViroInput(tuple(pts), (0,) * 6, (1,) * 6))
    assert not check_combinatorial(flat)
    assert check_combinatorial(regular_subdivision(ViroInput(((0,), (1,)), (0, 0), (1, 1))))


def test_degenerate_polytope_rejected():
    with pytest.raises(PatchworkError, match="not full-dimensional"):
        regular_subdivision(ViroInput(((0, 0), (1, 1), (2, 2)), (0, 1, 0), (1, 1, 1)))


def test_extend_signs():
    s = {(1, 0): "+", (2, 2): "-", (0, 1): 1}
    assert extend_signs(s, (0, 0)) == s
    assert extend_signs(s, (1, 0))[(1, 0)] == "-"
    for eps in itertools.product((0, 1), repeat=2):
        assert extend_signs(s, eps)[(2, 2)] == "-"
    with pytest.raises(PatchworkError, match="missing sign"):
        extend_signs(s, (1, 1), points=[(5, 5)])


def test_harnack_signs():
    assert set(harnack_signs(1).values()) == {1}
    assert [p for p, s in harnack_signs(2).items() if s < 0] == [(1, 1)]
    minus = sorted(p for p, s in harnack_signs(6).items() if s < 0)
    assert minus == [(1, 1), (1, 3), (1, 5), (3, 1), (3, 3), (5, 1)]
    assert len(harnack_signs(6)) == 28
    with pytest.raises(PatchworkError):
        harnack_signs(0)


def test_degree_one():
    tri = regular_subdivision(triangle_input(1, harnack_signs(1)))
    for signs in ({(0, 0): 1, (1, 0): 1, (0, 1): -1}, {(0, 0): 1, (1, 0): 1, (0, 1): 1}):
        rep = curve_report(build_patchwork(tri, signs))
        assert (rep.components, rep.chi, rep.closed) == (1, 0, True)


@pytest.mark.parametrize("d", range(1, 7))
def test_harnack_curves_are_maximal(d):
    inp = triangle_input(d, harnack_signs(d))
    tri = regular_subdivision(inp)
    rep = curve_report(build_patchwork(tri, inp.signs))
    assert rep.components == harnack_count(d)
    assert rep.components == planar_curve_components(d, harnack_signs(d), tri)
    assert rep.closed and rep.chi == 0
    assert set(rep.boundary_incidences.values()) == {d}


def test_non_unimodular_rejected():
    pts = simplex_points(2)
    tri = regular_subdivision(ViroInput(tuple(pts), (0,) * 6, (1,) * 6))
    with pytest.raises(PatchworkError, match="combinatorial mode requires unimodular triangulation"):
        build_patchwork(tri, (1,) * 6)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_random_signs_give_closed_curves(d):
    rng = random.Random(d)
    tri = regular_subdivision(triangle_input(d, harnack_signs(d)))
    for _ in range(20):
        signs = random_signs(d, rng)
        rep = curve_report(build_patchwork(tri, signs))
        assert rep.closed and rep.chi == 0
        assert rep.components <= harnack_count(d)
        assert rep.components == planar_curve_components(d, signs, tri)
        flipped = curve_report(build_patchwork(tri, {p: -s for p, s in signs.items()}))
        assert (flipped.components, flipped.chi) == (rep.components, rep.chi)


def test_square_patchworks():
    pts = tuple((i, j) for i in range(3) for j in range(3))
    rng = random.Random(4)
    tri = regular_subdivision(ViroInput(pts, tuple(i * i + j * j + i * j for i, j in pts), (1,) * 9))
    assert check_combinatorial(tri)
    for _ in range(20):
        P = build_patchwork(tri, [rng.choice((1, -1)) for _ in pts])
        rep = curve_report(P)
        assert P.ambient_chi == 0 and rep.closed and rep.chi == 0


def test_curve_report_needs_a_surface():
    tri = regular_subdivision(ViroInput(((0,), (1,), (2,)), (1, 0, 1), (1, -1, 1)))
    P = build_patchwork(tri, (1, -1, 1))
    assert P.ambient_chi == 0
    with pytest.raises(PatchworkError, match="n = 2"):
        curve_report(P)


SMOOTH = [
    L([(0, 0), (1, 0), (0, 1)]),
    L([(0, 0), (3, 0), (0, 3)]),
    L([(0, 0), (2, 0), (0, 2), (2, 2)]),
    L([(0, 0), (2, 0), (0, 1), (1, 1)]),
    L([(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)]),
]


@pytest.mark.parametrize("delta", SMOOTH)
def test_boundary_rule_matches_normal_lattice(delta):
    ineq = delta.facet_inequalities()
    for F in faces(delta):
        normals = [a for a, b in ineq if all(sum(x * y for x, y in zip(a, v)) == b for v in F.vertices)]
        lattice = Mod2Subspace.from_vectors(2, [mod2(v) for v in saturate(normals)])
        assert boundary_subspace(delta, F.vertices) == lattice


def test_boundary_rule_needs_smoothness():
    delta = L([(0, 0), (2, 0), (0, 1)])
    vertex = [(Fraction(0), Fraction(1))]
    assert boundary_subspace(delta, vertex).rank == 1
    normals = [a for a, b in delta.facet_inequalities() if sum(x * y for x, y in zip(a, vertex[0])) == b]
    assert Mod2Subspace.from_vectors(2, [mod2(v) for v in saturate(normals)]).rank == 2


@pytest.mark.parametrize("delta, chi", [(SMOOTH[0], 1), (SMOOTH[2], 0), (SMOOTH[3], 0), (SMOOTH[4], -2)])
def test_ambient_chi_matches_product_degeneration(delta, chi):
    pts = [(i, j) for i in range(4) for j in range(4) if delta.contains((i, j))]
    tri = regular_subdivision(ViroInput(tuple(pts), tuple(standard_lifting(p) for p in pts), (1,) * len(pts)))
    assert check_combinatorial(tri)
    P = build_patchwork(tri, (1,) * len(pts))
    fan = normal_fan(delta)
    assert P.ambient_chi == chi == chi_formula(fan).chi_positive
    if chi == 1:
        assert surface_type(build_glued_complex(fan)).name == "RP2"


def test_oracle_on_a_line():
    inp = ViroInput(((0, 0), (1, 0), (0, 1)), (0, 0, 0), (-1, 1, 1), (Fraction(-1), Fraction(1), Fraction(1)))
    for t in (Fraction(1, 2), Fraction(1, 1024)):
        assert numeric_oracle(inp, t, 64).components == 1


@pytest.mark.parametrize("d", [1, 2, 3])
def test_oracle_agrees_with_combinatorics(d):
    rng = random.Random(100 + d)
    tri = regular_subdivision(triangle_input(d, harnack_signs(d)))
    for trial in range(4):
        signs = harnack_signs(d) if trial == 0 else random_signs(d, rng)
        coeffs = {p: s * Fraction(rng.randint(1, 9), rng.randint(1, 9)) for p, s in signs.items()}
        inp = triangle_input(d, signs, coeffs)
        combinatorial = curve_report(build_patchwork(tri, inp.signs)).components
        assert numeric_oracle(inp, Fraction(1, 1024), 512).components == combinatorial


def test_oracle_input_checks():
    inp = triangle_input(1, harnack_signs(1))
    with pytest.raises(PatchworkError, match="t must"):
        numeric_oracle(inp, 0, 64)
    with pytest.raises(PatchworkError, match="resolution"):
        numeric_oracle(inp, Fraction(1, 8), 4)
    skew = ViroInput(((0, 0), (2, 1), (1, 2)), (0, 0, 0), (1, -1, 1))
    with pytest.raises(PatchworkError, match="edge direction"):
        numeric_oracle(skew, Fraction(1, 8), 64)


def test_oracle_thread_cap(monkeypatch):
    inp = triangle_input(2, harnack_signs(2))
    monkeypatch.setenv("PATCHGLUE_THREADS", "1")
    one = numeric_oracle(inp, Fraction(1, 1024), 64)
    monkeypatch.setenv("PATCHGLUE_THREADS", "4")
    assert numeric_oracle(inp, Fraction(1, 1024), 64).per_copy == one.per_copy


def test_viro_input_json():
    data = {"points": [[0, 0], [1, 0], [0, 1]], "lifting": [0, 0, 0], "coeffs": ["-1", "1/2", "3"]}
    inp = ViroInput.from_dict(data)
    assert inp.signs == (-1, 1, 1)
    assert ViroInput.from_dict(inp.to_dict()) == inp
    with pytest.raises(PatchworkError):
        ViroInput.from_dict({**data, "signs": ["+", "+", "+"]})
    with pytest.raises(PatchworkError):
        ViroInput.from_dict({"points": [[0, 0]], "lifting": [0, 1], "signs": ["+"]})


def test_standard_lifting_is_strictly_convex_on_the_grid():
    # second differences along the three triangle directions are positive
    for i, j in itertools.product(range(-3, 4), repeat=2):
        for u in ((1, 0), (0, 1), (1, -1)):
            f = [standard_lifting((i + k * u[0], j + k * u[1])) for k in (-1, 0, 1)]
            assert f[0] + f[2] - 2 * f[1] > 0
