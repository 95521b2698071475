"""Command-line driver: ``patchglue <command> INPUT [options]``.

Exit codes: 0 success, 1 the input parsed but failed a check (the report is
still written), 2 malformed input or usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

import jsonschema

from .degeneration import DegenerationError, check_strongly_unimodular, cone_over
from .glue import build_glued_complex, check_complex, topology_report
from .patchwork import (
    PatchworkError,
    ViroInput,
    build_patchwork,
    check_combinatorial,
    curve_report,
    numeric_oracle,
    regular_subdivision,
    simplex_points,
)
from .polyhedra import Subdivision, SubdivisionError
from .render import patchwork_svg, subdivision_svg
from .strata import chi_formula, enumerate_strata

SAFE_INT = 2**53


class InputError(Exception):
    pass


def load_schema(name: str) -> dict:
    text = resources.files("patchglue").joinpath("schemas", name + ".schema.json").read_text()
    return json.loads(text)


def to_json(obj) -> str:
    """Deterministic JSON; integers beyond 2^53 become decimal strings."""
    def fix(x):
        if isinstance(x, bool):
            return x
        if isinstance(x, int):
            return str(x) if abs(x) > SAFE_INT else x
        if isinstance(x, dict):
            return {str(k): fix(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [fix(v) for v in x]
        return x
    return json.dumps(fix(obj), sort_keys=True, indent=2) + "\n"


def _read(path: str, schema: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("cannot read %s: %s" % (path, exc))
    try:
        jsonschema.validate(data, load_schema(schema))
    except jsonschema.ValidationError as exc:
        raise InputError("%s does not match the %s schema: %s" % (path, schema, exc.message))
    return data


def _read_subdivision(path: str) -> Subdivision:
    data = _read(path, "subdivision")
    try:
        return Subdivision.from_dict(data)
    except SubdivisionError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise InputError("%s: %s" % (path, exc))


def _read_viro(path: str) -> ViroInput:
    data = _read(path, "viro-input")
    try:
        return ViroInput.from_dict(data)
    except (ValueError, ArithmeticError) as exc:
        raise InputError("%s: %s" % (path, exc))


def _emit(report: dict, args) -> None:
    text = to_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        sub = _read_subdivision(args.input)
    except SubdivisionError as exc:
        _emit({
            "valid_subdivision": False, "error": str(exc), "unimodular": False,
            "strongly_unimodular": False, "offending_cones": [], "multiplicities": {},
        }, args)
        return 1
    report = check_strongly_unimodular(cone_over(sub))
    out = {"valid_subdivision": True, "cells": len(sub.cells), **report.to_dict()}
    _emit(out, args)
    return 0 if report.strongly_unimodular else 1


def _strata_table(records) -> str:
    lines = ["%5s  %-8s %3s %4s %5s  %s" % ("cell", "eps", "k", "dim", "chi_c", "Q+")]
    for r in records:
        lines.append("%5d  %-8s %3d %4d %5d  %s" % (
            r.cell, "".join(map(str, r.eps)), r.k, r.dim, r.chi_c,
            " ".join("".join(map(str, q)) for q in sorted(r.Qplus))))
    return "\n".join(lines) + "\n"


def cmd_strata(args) -> int:
    sub = _read_subdivision(args.input)
    records = enumerate_strata(sub)
    summary = chi_formula(sub)
    (sys.stdout if args.out else sys.stderr).write(_strata_table(records))
    _emit({"strata": [r.to_dict() for r in records], "summary": summary.to_dict()}, args)
    return 0


def cmd_chi(args) -> int:
    sub = _read_subdivision(args.input)
    summary = chi_formula(sub)
    direct = topology_report(build_glued_complex(sub)).chi_direct
    verdict = "AGREE" if summary.chi_positive == direct else "DISAGREE"
    (sys.stdout if args.out else sys.stderr).write(
        "formula %d\ndirect  %d\n%s\n" % (summary.chi_positive, direct, verdict))
    _emit({"chi_formula": summary.chi_positive, "chi_direct": direct,
           "verdict": verdict, "summary": summary.to_dict()}, args)
    return 0 if verdict == "AGREE" else 1


def cmd_glue(args) -> int:
    sub = _read_subdivision(args.input)
    G = build_glued_complex(sub)
    check_complex(G)
    report = topology_report(G, chi_formula(sub).chi_positive)
    if args.dump_cells:
        with open(args.dump_cells, "w") as fh:
            fh.write(to_json(G.to_dict()))
    _emit(report.to_dict(), args)
    return 0


def cmd_patchwork(args) -> int:
    inp = _read_viro(args.input)
    try:
        tri = regular_subdivision(inp)
    except PatchworkError as exc:
        raise InputError(str(exc))
    report = {"cells": [list(c) for c in tri.cells], "unimodular": check_combinatorial(tri)}
    if not report["unimodular"]:
        report["error"] = "combinatorial mode requires unimodular triangulation"
        _emit(report, args)
        return 1
    P = build_patchwork(tri, inp.signs)
    report["ambient_chi"] = P.ambient_chi
    report["harnack_bound"] = None
    if inp.n == 2:
        report["curve"] = curve_report(P).to_dict()
        side = max(p[0] + p[1] for p in inp.points)
        if set(inp.points) == set(simplex_points(side)):
            report["harnack_bound"] = (side - 1) * (side - 2) // 2 + 1
    if inp.coeffs is not None or args.oracle:
        t = Fraction(args.t)
        try:
            est = numeric_oracle(inp, t, args.grid)
        except PatchworkError as exc:
            raise InputError(str(exc))
        report["oracle"] = {**est.to_dict(), "t": str(t), "resolution": args.grid}
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(patchwork_svg(P))
        report["svg"] = args.svg
    _emit(report, args)
    return 0


def cmd_render(args) -> int:
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("cannot read %s: %s" % (args.input, exc))
    if isinstance(data, dict) and "points" in data:
        inp = _read_viro(args.input)
        tri = regular_subdivision(inp)
        if not check_combinatorial(tri):
            raise InputError("combinatorial mode requires unimodular triangulation")
        svg = patchwork_svg(build_patchwork(tri, inp.signs))
    else:
        svg = subdivision_svg(_read_subdivision(args.input))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patchglue", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="input JSON file")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a subdivision is strongly unimodular")
    add("strata", cmd_strata, "list strata with their orthant sets")
    add("chi", cmd_chi, "compare the stratum formula with the glued complex")
    g = add("glue", cmd_glue, "build the glued complex and report its topology")
    g.add_argument("--dump-cells", metavar="FILE", help="also write the cell complex as JSON")
    p = add("patchwork", cmd_patchwork, "combinatorial patchwork of a lifted sign distribution")
    p.add_argument("--svg", metavar="FILE", help="draw the four reflected copies")
    p.add_argument("--oracle", action="store_true", help="run the numeric check even without coefficients")
    p.add_argument("--t", default="1/1024", help="parameter value for the numeric check")
    p.add_argument("--grid", type=int, default=512, help="grid resolution for the numeric check")
    add("render", cmd_render, "SVG of a planar subdivision or a patchwork")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SubdivisionError, DegenerationError) as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return 1
    except (InputError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
