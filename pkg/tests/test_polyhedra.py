import itertools
import random
from fractions import Fraction

import pytest
from shapely.geometry import MultiPoint, box
from shapely.ops import unary_union

from patchglue.fixtures import p2_fan, random_subdivision
from patchglue.polyhedra import (
    LatticePolyhedron,
    SubdivisionError,
    faces,
    normalized_volume,
    recession_cone,
    recession_fan,
    star_fan,
    tangent_lattice,
    validate_subdivision,
)
from patchglue.znlinalg import determinant

L = LatticePolyhedron.from_data


def supported_faces(P, bound=3):
    """Faces of a polyhedron as argmin sets of integer functionals bounded below on it."""
    n = P.ambient_dim
    out = set()
    for c in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(sum(a * b for a, b in zip(c, r)) < 0 for r in P.rays):
            continue
        vals = [sum(a * b for a, b in zip(c, v)) for v in P.vertices]
        m = min(vals)
        verts = tuple(v for v, x in zip(P.vertices, vals) if x == m)
        rays = tuple(r for r in P.rays if sum(a * b for a, b in zip(c, r)) == 0)
        out.add((verts, rays))
    return out


def face_keys(P):
    return {(F.vertices, F.rays) for F in faces(P)}


@pytest.mark.parametrize("P, count", [
    (L([(0, 0), (1, 0), (0, 1)]), 7),
    (L([(0, 0)], [(1, 0)]), 2),
    (L([(0, 0), (1, 0)], [(0, 1)]), 6),
    (L([(0, 0), (2, 0), (0, 1), (1, 1)]), 9),
    (L([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]), 15),
])
def test_faces_match_supporting_functionals(P, count):
    assert len(faces(P)) == count
    assert face_keys(P) == supported_faces(P)


def test_redundant_generators_dropped():
    P = L([(0, 0), (1, 0), (0, 1), (Fraction(1, 3), Fraction(1, 3))], [(1, 1)])
    assert P.vertices == ((0, 0), (0, 1), (1, 0))
    assert L([(0, 0)], [(1, 0), (2, 0)]).rays == ((1, 0),)


def test_rejects_lines_and_mismatches():
    with pytest.raises(ValueError, match="line"):
        L([(0,)], [(1,), (-1,)])
    with pytest.raises(ValueError, match="dimension mismatch"):
        L([(0, 0), (1,)])


def test_recession_cone_examples():
    assert recession_cone(L([(0, 0), (1, 0)], [(0, 1)])) == L([(0, 0)], [(0, 1)])
    assert recession_cone(L([(0, 0), (1, 0), (0, 1)])) == L([(0, 0)])
    C = L([(0, 0)], [(1, 0), (0, 1)])
    assert recession_cone(C) == C


def test_tangent_lattice_examples():
    assert tangent_lattice(L([(0, 0), (2, 0)])) == [(1, 0)]
    assert tangent_lattice(L([(3, 1)])) == []
    basis = tangent_lattice(L([(0, 0), (1, 1)], [(1, -1)]))
    assert len(basis) == 2 and abs(determinant(basis)) == 1


def test_validate_examples():
    assert len(validate_subdivision([L([(0,)]), L([(0,)], [(1,)]), L([(0,)], [(-1,)])], 1).cells) == 3
    with pytest.raises(SubdivisionError, match="cells overlap in non-face"):
        validate_subdivision([L([(0,)], [(1,)]), L([(-1,)], [(1,)])], 1)
    assert len(p2_fan().cells) == 7


def test_validate_incomplete_and_mixed_dimension():
    with pytest.raises(SubdivisionError, match="subdivision not complete"):
        validate_subdivision([L([(0, 0)], [(1, 0), (0, 1)])], 2)
    with pytest.raises(SubdivisionError, match="dimension mismatch"):
        validate_subdivision([L([(0,)], [(1,)]), L([(0, 0)], [(1, 0)])], 1)
    with pytest.raises(SubdivisionError, match="overlap"):
        # a stray ray through the interior of a 2-cone
        validate_subdivision(list(p2_fan().cells) + [L([(0, 0)], [(1, 1)])], 2)


def test_star_fan_examples():
    from patchglue.fixtures import model_1d
    m = model_1d()
    F = star_fan(m, m.cell_id(L([(0,)])))
    assert sorted(c.rays for c in F.cells) == [(), ((-1,),), ((1,),)]
    top = star_fan(m, m.maximal_ids[0])
    assert top.ambient_dim == 0 and len(top.cells) == 1
    p2 = p2_fan()
    ray = star_fan(p2, p2.cell_id(L([(0, 0)], [(1, 0)])))
    assert ray.ambient_dim == 1 and len(ray.maximal_ids) == 2


def test_normalized_volume():
    assert normalized_volume(L([(0, 0), (2, 0), (0, 2)])) == 4
    assert normalized_volume(L([(0, 0), (1, 0), (0, 1), (1, 1)])) == 2
    assert normalized_volume(L([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])) == 3
    assert normalized_volume(L([(0, 0), (1, 1)])) == 0


def _clipped(cell, extent):
    verts = [tuple(float(x) for x in v) for v in cell.vertices]
    far = 100 * extent
    cloud = [(v[0] + far * sum(r[0] for r in R), v[1] + far * sum(r[1] for r in R))
             for v in verts for k in range(len(cell.rays) + 1) for R in itertools.combinations(cell.rays, k)]
    return MultiPoint(cloud).convex_hull.intersection(box(-extent, -extent, extent, extent))


@pytest.mark.parametrize("seed", range(15))
def test_random_subdivisions_tile_the_plane(seed):
    """Independent geometric check with shapely: maximal cells cover a box without overlapping."""
    sub = random_subdivision(2, random.Random(seed), 4)
    extent = 2 + max(abs(float(x)) for v in sub.vertices for x in v)
    pieces = [_clipped(sub.cells[i], extent) for i in sub.maximal_ids]
    frame = box(-extent, -extent, extent, extent)
    assert unary_union(pieces).symmetric_difference(frame).area < 1e-9
    for a, b in itertools.combinations(pieces, 2):
        assert a.intersection(b).area < 1e-9


def test_shapely_detects_what_validation_rejects():
    cells = [L([(0, 0)], [(1, 0), (0, 1)]), L([(0, 0)], [(1, 1), (-1, 0)]),
             L([(0, 0)], [(-1, 0), (0, -1)]), L([(0, 0)], [(0, -1), (1, 0)])]
    assert _clipped(cells[0], 5).intersection(_clipped(cells[1], 5)).area > 0
    with pytest.raises(SubdivisionError, match="overlap"):
        validate_subdivision(cells, 2)


def test_json_round_trip(shipped):
    _, sub = shipped
    again = type(sub).from_dict(sub.to_dict())
    assert again.cells == sub.cells


def test_recession_fan_of_line_degeneration():
    from patchglue.fixtures import p2_line_degeneration
    fan = recession_fan(p2_line_degeneration())
    assert fan.cells == p2_fan().cells


def test_face_of_is_transitive(shipped):
    _, sub = shipped
    for P in sub.cells:
        all_faces = set(faces(P))
        for F in all_faces:
            assert set(faces(F)) <= all_faces


def test_recession_rank_bounded(shipped):
    _, sub = shipped
    for P in sub.cells:
        assert len(tangent_lattice(recession_cone(P))) <= len(tangent_lattice(P))


def test_validation_is_idempotent(shipped):
    _, sub = shipped
    again = validate_subdivision(sub.cells, sub.ambient_dim)
    assert again.cells == sub.cells
    assert validate_subdivision(list(reversed(sub.cells)), sub.ambient_dim).cells == sub.cells


def _region(cell, extent):
    if cell.dim == 2:
        return _clipped(cell, extent)
    far = 100 * extent
    from shapely.geometry import LineString, Point
    pts = [tuple(float(x) for x in v) for v in cell.vertices]
    pts += [(pts[0][0] + far * r[0], pts[0][1] + far * r[1]) for r in cell.rays]
    if len(pts) == 1:
        return Point(pts[0])
    return LineString(sorted(pts)).intersection(box(-extent, -extent, extent, extent))


@pytest.mark.parametrize("seed", [None, 0, 1, 2])
def test_cells_meet_in_common_faces(shipped, seed):
    """Set-theoretic intersection of two cells equals their largest common face (n = 2 fixtures)."""
    _, sub = shipped
    if seed is not None:
        sub = random_subdivision(2, random.Random(seed), 3)
    if sub.ambient_dim != 2:
        pytest.skip("geometric check is planar")
    extent = 2 + max(abs(float(x)) for v in sub.vertices for x in v)
    regions = [_region(c, extent) for c in sub.cells]
    for i, j in itertools.combinations(range(len(sub.cells)), 2):
        common = set(faces(sub.cells[i])) & set(faces(sub.cells[j]))
        meet = regions[i].intersection(regions[j])
        if not common:
            assert meet.is_empty
            continue
        top = max(common, key=lambda F: F.dim)
        assert all(F in set(faces(top)) for F in common)
        assert meet.symmetric_difference(_region(top, extent)).length < 1e-6
