"""Command-line interface.

Subcommands: locus, roots, slice, classify, export, serve. Coefficients are
entered ascending (``--coeffs c0,c1,...``); pass ``--desc`` for paper-style
highest-power-first entry, or give the polynomial as text with ``--poly``.

Exit codes: 0 success, 2 usage error, 1 computation error.
"""

from __future__ import annotations

import argparse
import sys

from .geogebra import to_geogebra
from .locus import classify_cubic
from .polynomial import (
    DegreeError,
    EvaluationError,
    RealPolynomial,
    parse_coeffs,
    parse_poly_string,
)
from .rootfind import ConvergenceError, find_roots, slice_at
from .scene import build_scene, compute_scene, to_csv, to_scene_file
from .server import MAX_SAMPLES, MIN_SAMPLES, default_port, serve_forever
from . import locus as _locus
from . import polynomial as _poly


def _add_poly_args(sp: argparse.ArgumentParser) -> None:
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--coeffs", help="comma-separated coefficients, ascending powers")
    group.add_argument("--poly", help="polynomial text, e.g. 'z^3 - 2z + 4'")
    sp.add_argument(
        "--desc", action="store_true",
        help="treat --coeffs as descending (leading coefficient first)",
    )


def _add_range_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--range", default="-3:3", metavar="MIN:MAX", help="x range (default -3:3)")
    sp.add_argument("--samples", type=int, default=257, help="x-grid samples (default 257)")


def _add_output_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--format", choices=("scene", "csv", "geogebra"), default="scene",
        help="output document format (default scene)",
    )
    sp.add_argument("--output", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyfiber",
        description="Trace where a real polynomial takes real values on the "
        "complex plane, lift the curves to 3D, and find all complex roots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("locus", help="compute the restricted-domain curves")
    _add_poly_args(sp)
    _add_range_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("roots", help="find all complex roots with multiplicities")
    _add_poly_args(sp)
    sp.add_argument("--tol", type=float, default=1e-9, help="relative residual target")

    sp = sub.add_parser("slice", help="intersect the lifted graph with a horizontal plane")
    _add_poly_args(sp)
    sp.add_argument("--level", type=float, required=True, help="plane height w")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("classify", help="categorize a cubic by its inflection slope")
    _add_poly_args(sp)

    sp = sub.add_parser("export", help="full scene: curves, roots, optional slice")
    _add_poly_args(sp)
    _add_range_args(sp)
    _add_output_args(sp)
    sp.add_argument("--slice", type=float, dest="slice_level", help="also slice at this level")

    sp = sub.add_parser("serve", help="run the local viewer service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=None,
                    help="port (default: $POLYFIBER_PORT or 8765)")
    sp.add_argument("--assets", default=None, help="static asset directory for the viewer")
    return parser


def _polynomial(args: argparse.Namespace) -> RealPolynomial:
    if args.coeffs is not None:
        return parse_coeffs(args.coeffs, descending=args.desc)
    return parse_poly_string(args.poly)


def _range(args: argparse.Namespace) -> tuple[float, float]:
    try:
        lo_text, hi_text = args.range.split(":", 1)
        lo, hi = float(lo_text), float(hi_text)
    except ValueError as exc:
        raise ValueError(f"malformed range {args.range!r}, expected MIN:MAX") from exc
    if not lo < hi:
        raise ValueError("range must satisfy MIN < MAX")
    if not MIN_SAMPLES <= args.samples <= MAX_SAMPLES:
        raise ValueError(f"samples must be in [{MIN_SAMPLES}, {MAX_SAMPLES}]")
    return lo, hi


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _document(f: RealPolynomial, args: argparse.Namespace, with_roots: bool) -> str:
    lo, hi = _range(args)
    if args.format == "geogebra":
        return "\n".join(to_geogebra(f, lo, hi, args.samples)) + "\n"
    if with_roots:
        scene = compute_scene(
            f, lo, hi, args.samples,
            slice_level=getattr(args, "slice_level", None),
        )
    else:
        p, _ = _poly.expand_real_imag(f)
        branches = _locus.sweep_locus(f, lo, hi, args.samples)
        curves = _locus.lift_branches(branches, p)
        scene = build_scene(f, curves, (), x_range=(lo, hi), samples=args.samples)
    return to_scene_file(scene) if args.format == "scene" else to_csv(scene)


def _print_root_table(roots) -> None:
    print(f"{'re':>22} {'im':>22} {'mult':>4} {'residual':>10}")
    for r in roots:
        print(
            f"{r.location.real:>22.12g} {r.location.imag:>22.12g} "
            f"{r.multiplicity:>4d} {r.residual:>10.2e}"
        )


def _merge_dashed_values(argv: list[str]) -> list[str]:
    # argparse mistakes values like "-3:3" for option names; fold them into
    # the --flag=value form
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--range" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_dashed_values(list(argv)))
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if args.command == "serve":
            serve_forever(args.host, args.port if args.port is not None else default_port(),
                          args.assets)
            return 0
        f = _polynomial(args)
        if args.command == "locus":
            _emit(_document(f, args, with_roots=False), args.output)
        elif args.command == "export":
            _emit(_document(f, args, with_roots=True), args.output)
        elif args.command == "roots":
            _print_root_table(find_roots(f, tol=args.tol))
        elif args.command == "slice":
            result = slice_at(f, args.level, tol=args.tol)
            _print_root_table(result.intersections)
            print(f"total multiplicity: {result.total_multiplicity}")
        elif args.command == "classify":
            c = classify_cubic(f)
            print(
                f"{c.category.value} (inflection_x = {c.inflection_x:.12g}, "
                f"slope = {c.inflection_slope:.12g})"
            )
    except (ValueError, DegreeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, EvaluationError, ArithmeticError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    entry()
