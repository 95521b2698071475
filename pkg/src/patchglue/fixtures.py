"""Reference subdivisions and a random generator of strongly unimodular ones."""
from __future__ import annotations

import itertools
import random
from typing import Sequence

from .polyhedra import LatticePolyhedron, Subdivision, validate_subdivision
from .znlinalg import IntVector

P2_RAYS = [(1, 0), (0, 1), (-1, -1)]
P1P1_RAYS = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def _cells_from_cones(n: int, cones: Sequence[Sequence[IntVector]]) -> Subdivision:
    """Read a subdivision off the maximal cones of a fan in R^{n+1} with heights 0/1."""
    cells = []
    for gens in cones:
        verts = [g[:n] for g in gens if g[n] == 1]
        rays = [g[:n] for g in gens if g[n] == 0]
        cells.append(LatticePolyhedron.from_data(verts, rays, ambient_dim=n))
    return validate_subdivision(cells, n)


def model_1d() -> Subdivision:
    """R^1 cut at the origin: {0}, [0, oo), (-oo, 0]."""
    return _cells_from_cones(1, [[(0, 1), (1, 0)], [(0, 1), (-1, 0)]])


def half_vertex_1d() -> Subdivision:
    """R^1 cut at 1/2; unimodular only after scaling by 2."""
    L = LatticePolyhedron.from_data
    return validate_subdivision([L([[1]], [[1]], [2]), L([[1]], [[-1]], [2])], 1)


def fan_subdivision(rays: Sequence[IntVector]) -> Subdivision:
    """A complete 2-d fan (rays in cyclic order) viewed as a subdivision with one vertex."""
    m = len(rays)
    cones = [[(0, 0, 1), tuple(rays[i]) + (0,), tuple(rays[(i + 1) % m]) + (0,)] for i in range(m)]
    return _cells_from_cones(2, cones)


def p2_fan() -> Subdivision:
    return fan_subdivision(P2_RAYS)


def p1p1_fan() -> Subdivision:
    return fan_subdivision(P1P1_RAYS)


def p2_line_degeneration() -> Subdivision:
    """Two vertices A = (0, 0) and B = (1, 1) with recession fan the fan of P^2.

    The star of B is the fan of P^2 and the star of A is that fan plus the
    ray (1, 1), i.e. the blow-up of P^2 in a point.
    """
    A, B = (0, 0, 1), (1, 1, 1)
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (-1, -1, 0)
    cones = [
        [A, B, e1],
        [A, B, e2],
        [B, e1, e2],
        [A, e2, e3],
        [A, e3, e1],
    ]
    return _cells_from_cones(2, cones)


# ---------------------------------------------------------------------------
# random strongly unimodular subdivisions


def _stellar(cones: list[tuple[int, ...]], face: frozenset[int], new: int) -> list[tuple[int, ...]]:
    out = []
    for c in cones:
        if face <= set(c):
            for r in face:
                out.append(tuple(sorted((set(c) - {r}) | {new})))
        else:
            out.append(c)
    return out


def random_subdivision(n: int, rng: random.Random, steps: int = 4) -> Subdivision:
    """Random strongly unimodular subdivision of R^n for n in (1, 2).

    Starts from a smooth complete fan coned at height 1 and applies random
    stellar subdivisions of C(Sigma) whose new ray has height 0 or 1, then a
    random unimodular change of coordinates. Smoothness and heights in {0, 1}
    are preserved at each step.
    """
    if n == 1:
        rays = [(1,), (-1,)]
    elif n == 2:
        a = rng.randint(-2, 2)
        rays = rng.choice([P2_RAYS, P1P1_RAYS, [(1, 0), (0, 1), (-1, a), (0, -1)]])
    else:
        raise ValueError("random subdivisions are only generated for n = 1, 2")
    gens: list[IntVector] = [tuple([0] * n + [1])] + [tuple(r) + (0,) for r in rays]
    if n == 1:
        cones = [(0, 1), (0, 2)]
    else:
        m = len(rays)
        cones = [tuple(sorted((0, 1 + i, 1 + (i + 1) % m))) for i in range(m)]
    for _ in range(steps):
        candidates = set()
        for c in cones:
            for size in range(2, len(c) + 1):
                for face in _subsets(c, size):
                    height = sum(gens[i][-1] for i in face)
                    if height <= 1:
                        candidates.add(face)
        face = rng.choice(sorted(candidates, key=sorted))
        new = tuple(sum(gens[i][j] for i in face) for j in range(n + 1))
        gens.append(new)
        cones = _stellar(cones, face, len(gens) - 1)
    A = _random_unimodular(n, rng)
    shift = [rng.randint(-3, 3) for _ in range(n)]

    def move(g):
        x = [sum(A[i][j] * g[j] for j in range(n)) + g[n] * shift[i] for i in range(n)]
        return tuple(x) + (g[n],)

    return _cells_from_cones(n, [[move(gens[i]) for i in c] for c in cones])


def _subsets(c, size):
    return [frozenset(s) for s in itertools.combinations(c, size)]


def _random_unimodular(n: int, rng: random.Random) -> list[list[int]]:
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            A[0] = [-x for x in A[0]]
            continue
        c = rng.choice([-1, 1])
        A[i] = [a + c * b for a, b in zip(A[i], A[j])]
    return A
