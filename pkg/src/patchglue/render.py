"""Deterministic SVG pictures of patchworks and planar subdivisions."""
from __future__ import annotations

import itertools

from shapely.geometry import MultiPoint, box

from .patchwork import PatchworkComplex
from .polyhedra import Subdivision

SIZE = 1000


def _fmt(x: float) -> str:
    return ("%.3f" % x).rstrip("0").rstrip(".")


def _svg(body: list[str]) -> str:
    head = '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">' % (
        SIZE, SIZE, SIZE, SIZE)
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>", ""])


def patchwork_svg(P: PatchworkComplex) -> str:
    """The four reflected copies of the polygon with triangulation, signs and curve."""
    if P.n != 2:
        raise ValueError("patchwork pictures need n = 2")
    tri = P.triangulation
    pts = tri.points
    reach = max(max(abs(x), abs(y)) for x, y in pts) or 1
    scale = (SIZE / 2 - 30) / reach

    def place(p, eps):
        x = (-1) ** eps[0] * p[0]
        y = (-1) ** eps[1] * p[1]
        return SIZE / 2 + scale * x, SIZE / 2 - scale * y

    def line(a, b, style):
        return '<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>' % (
            _fmt(a[0]), _fmt(a[1]), _fmt(b[0]), _fmt(b[1]), style)

    body = []
    edges = sorted({e for c in tri.cells for e in itertools.combinations(c, 2)})
    copies = list(itertools.product((0, 1), repeat=2))
    for eps in copies:
        for i, j in edges:
            body.append(line(place(pts[i], eps), place(pts[j], eps), 'stroke="#bbb" stroke-width="1"'))
    for eps in copies:
        for c in tri.cells:
            plus, minus = P.pieces[(c, eps)]
            if not plus or not minus:
                continue
            mids = []
            for i, j in itertools.combinations(c, 2):
                if (i in plus) != (j in plus):
                    a, b = place(pts[i], eps), place(pts[j], eps)
                    mids.append(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2))
            body.append(line(mids[0], mids[1], 'stroke="#c00" stroke-width="3"'))
    for eps in copies:
        for i, p in enumerate(pts):
            s = P.signs[i] * (-1) ** ((eps[0] * p[0] + eps[1] * p[1]) % 2)
            x, y = place(p, eps)
            fill = "black" if s > 0 else "white"
            body.append('<circle cx="%s" cy="%s" r="4" fill="%s" stroke="black"/>' % (_fmt(x), _fmt(y), fill))
    return _svg(body)


def subdivision_svg(sub: Subdivision, extent: float | None = None) -> str:
    """Maximal cells of a planar subdivision, unbounded ones clipped to a box."""
    if sub.ambient_dim != 2:
        raise ValueError("subdivision pictures need n = 2")
    verts = [tuple(float(x) for x in v) for v in sub.vertices]
    if extent is None:
        extent = max([abs(x) for v in verts for x in v] + [1.0]) * 2 + 1
    frame = box(-extent, -extent, extent, extent)
    scale = (SIZE - 40) / (2 * extent)

    def place(x, y):
        return SIZE / 2 + scale * x, SIZE / 2 - scale * y

    body = []
    palette = ["#f4d58d", "#bfd7ea", "#c5e1a5", "#f8bbd0", "#d1c4e9", "#ffe0b2"]
    for k, cid in enumerate(sub.maximal_ids):
        c = sub.cells[cid]
        far = 100 * extent
        cloud = [
            (float(v[0]) + far * sum(r[0] for r in R), float(v[1]) + far * sum(r[1] for r in R))
            for v in c.vertices
            for m in range(len(c.rays) + 1)
            for R in itertools.combinations(c.rays, m)
        ]
        region = MultiPoint(cloud).convex_hull.intersection(frame)
        coords = list(region.exterior.coords)[:-1]
        path = " ".join("%s,%s" % tuple(map(_fmt, place(x, y))) for x, y in coords)
        body.append('<polygon points="%s" fill="%s" stroke="black" stroke-width="2"/>' % (
            path, palette[k % len(palette)]))
    for v in verts:
        x, y = place(*v)
        body.append('<circle cx="%s" cy="%s" r="5" fill="black"/>' % (_fmt(x), _fmt(y)))
    return _svg(body)
