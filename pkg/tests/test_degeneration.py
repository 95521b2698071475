import itertools
import random

import pytest

from patchglue.degeneration import (
    DegenerationError,
    PositiveCount,
    check_strongly_unimodular,
    classify_positive_count,
    cone_over,
    multiplicities,
    require_strongly_unimodular,
)
from patchglue.fixtures import half_vertex_1d, model_1d, p2_fan, p2_line_degeneration, random_subdivision
from patchglue.polyhedra import scale_subdivision


def positive_orthants(sign, exponents):
    """Count sign patterns of (x_1..x_k) where sign * x_1^a_1 ... x_k^a_k > 0."""
    s = 1 if sign == "+" else -1
    return sum(
        s * (-1) ** sum(e * a for e, a in zip(eps, exponents)) > 0
        for eps in itertools.product((0, 1), repeat=len(exponents))
    )


def test_cone_over_examples():
    C = cone_over(model_1d())
    assert sorted(C.rays) == [(-1, 0), (0, 1), (1, 0)]
    assert sorted(sorted(c) for c in C.cones if len(c) == 2) == [[(-1, 0), (0, 1)], [(0, 1), (1, 0)]]
    assert (1, 2) in cone_over(half_vertex_1d()).rays
    assert sorted(cone_over(p2_fan()).rays) == [(-1, -1, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_strongly_unimodular_examples():
    assert check_strongly_unimodular(cone_over(model_1d())).strongly_unimodular
    report = check_strongly_unimodular(cone_over(half_vertex_1d()))
    assert not report.unimodular
    assert any("lattice index 2" in reason for _, reason in report.offending_cones)
    assert check_strongly_unimodular(cone_over(p2_line_degeneration())).strongly_unimodular


def test_non_simplicial_is_reported_not_raised():
    from patchglue.polyhedra import LatticePolyhedron, validate_subdivision
    L = LatticePolyhedron.from_data
    # a square cell with four vertices has a non-simplicial cone
    cells = [L([(0, 0), (1, 0), (0, 1), (1, 1)]), L([(0, 0), (1, 0)], [(0, -1)]), L([(1, 0), (1, 1)], [(1, 0)]),
             L([(1, 1), (0, 1)], [(0, 1)]), L([(0, 1), (0, 0)], [(-1, 0)]),
             L([(0, 0)], [(-1, 0), (0, -1)]), L([(1, 0)], [(1, 0), (0, -1)]),
             L([(1, 1)], [(1, 0), (0, 1)]), L([(0, 1)], [(-1, 0), (0, 1)])]
    report = check_strongly_unimodular(cone_over(validate_subdivision(cells, 2)))
    assert not report.unimodular
    assert any(reason.startswith("non-simplicial") for _, reason in report.offending_cones)


def test_scaling_repairs_half_vertex():
    with pytest.raises(DegenerationError, match="scale Sigma by d = 2"):
        require_strongly_unimodular(half_vertex_1d())
    assert check_strongly_unimodular(cone_over(scale_subdivision(half_vertex_1d(), 2))).strongly_unimodular


def test_multiplicities_all_ones_on_strongly_unimodular():
    for sub in [model_1d(), p2_fan(), p2_line_degeneration()] + [
        random_subdivision(n, random.Random(s), 3) for n in (1, 2) for s in range(5)
    ]:
        C = cone_over(sub)
        for i, cell in enumerate(sub.cells):
            assert multiplicities(C, i) == (1,) * len(cell.vertices)


def test_multiplicities_reject_non_unimodular():
    C = cone_over(half_vertex_1d())
    bad = next(i for i, c in enumerate(C.cones) if len(c) == 2)
    with pytest.raises(DegenerationError, match="multiplicities require unimodular"):
        multiplicities(C, bad)


def test_level_positive_rays_are_face_compatible():
    sub = p2_line_degeneration()
    C = cone_over(sub)
    for face, cell in sub.covering_pairs:
        assert set(C.level_positive(face)) <= set(C.level_positive(cell))


def test_classification_examples():
    assert classify_positive_count("+", ["odd", "even"]) is PositiveCount.HALF
    assert classify_positive_count("+", ["even", "even"]) is PositiveCount.FULL
    assert classify_positive_count("-", ["even", "even"]) is PositiveCount.EMPTY
    assert classify_positive_count("-", ["odd"]) is PositiveCount.HALF
    with pytest.raises(ValueError):
        classify_positive_count("+", [])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_classification_against_orthant_count(k):
    for sign in "+-":
        for pattern in itertools.product(("odd", "even"), repeat=k):
            exps = [1 if p == "odd" else 2 for p in pattern]
            assert classify_positive_count(sign, pattern).count(k) == positive_orthants(sign, exps)
