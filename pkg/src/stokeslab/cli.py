"""Command-line front end.

Subcommands: entropy, stokes-check, search, example, converge.  Every result
is printed as single-line JSON on stdout; ``--out``/``--format`` add a file
copy.  Exit codes: 0 success, 1 validation error, 2 numerical
non-convergence.  A JSON config file (``--config``) supplies defaults; flags
win.  Computations use fixed-order reductions, so output is byte-identical
across runs regardless of the STOKESLAB_WORKERS environment variable.

Mini-syntaxes:
  region  box:x0,x1 | box:x0,y0,x1,y1 | box:x0,y0,z0,x1,y1,z1
          | annulus:ri,ro | circle:r[,cw]
  form    const:v | expr:<degree>:<chart>:<coeff;coeff;...> | piecewise:@file
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import presets
from .complexes import annulus_region, box_region, build_grid_complex
from .duality import convergence_study, stokes_residual, verify_extremality
from .entropy import entropy_direct
from .errors import InvalidGeometryError, NoLimitError, StokeslabError
from .forms import (
    AnalyticForm,
    Cochain,
    Curve,
    Piece,
    annulus_boundary_curve,
    box_perimeter_curve,
    circle_curve,
    exterior_derivative,
)
from .oracles import AnnulusParams, RectangleParams, annulus_oracle, rectangle_oracle
from .reports import emit_report, to_json_text

SCHEMA_VERSION = 1


def parse_region(text):
    """Region/carrier mini-syntax; returns a RegionDescriptor or Curve."""
    kind, _, rest = text.partition(":")
    parts = [p for p in rest.split(",") if p]
    if kind == "box":
        nums = [float(p) for p in parts]
        if len(nums) not in (2, 4, 6):
            raise InvalidGeometryError(f"box needs 2, 4, or 6 numbers, got {len(nums)}")
        n = len(nums) // 2
        return box_region(nums[:n], nums[n:])
    if kind == "annulus":
        if len(parts) != 2:
            raise InvalidGeometryError("annulus needs annulus:ri,ro")
        return annulus_region(float(parts[0]), float(parts[1]))
    if kind == "circle":
        orientation = 1
        if parts and parts[-1] == "cw":
            orientation = -1
            parts = parts[:-1]
        if len(parts) != 1:
            raise InvalidGeometryError("circle needs circle:r[,cw]")
        return circle_curve(float(parts[0]), orientation=orientation)
    raise InvalidGeometryError(f"unknown region kind {kind!r}")


def _default_domain(region):
    if isinstance(region, Curve):
        if region.kind == "circle":
            r = region.radius
            return annulus_region(r / 2, 3 * r / 2)
        if region.kind == "annulus_boundary":
            return annulus_region(region.r_inner, region.r_outer)
        return region.box
    return region


def parse_form(text, region):
    """Form mini-syntax; the region fixes the domain unless a file provides one."""
    kind, _, rest = text.partition(":")
    domain = _default_domain(region)
    if kind == "const":
        chart = "polar" if domain.kind == "annulus" else "cartesian"
        return AnalyticForm.constant(float(rest), domain, chart=chart)
    if kind == "expr":
        degree_text, _, tail = rest.partition(":")
        chart, _, coeff_text = tail.partition(":")
        coeffs = [c for c in coeff_text.split(";") if c]
        return AnalyticForm(degree=int(degree_text), chart=chart,
                            coefficients=coeffs, domain=domain)
    if kind == "piecewise":
        if not rest.startswith("@"):
            raise InvalidGeometryError("piecewise forms load from piecewise:@file")
        with open(rest[1:], encoding="utf-8") as fh:
            data = json.load(fh)
        domain = box_region(data["domain"]["lo"], data["domain"]["hi"])
        pieces = [Piece(region=box_region(p["lo"], p["hi"]),
                        coefficients=tuple(p["coefficients"]))
                  for p in data.get("pieces", [])]
        return AnalyticForm(degree=data["degree"], chart=data.get("chart", "cartesian"),
                            coefficients=data["coefficients"], domain=domain,
                            pieces=pieces or None)
    raise InvalidGeometryError(f"unknown form kind {kind!r}")


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise InvalidGeometryError("config file must hold a JSON object")
    return config


def dump_config(config, path=None):
    text = to_json_text(config) + "\n"
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def _build_parser():
    parser = argparse.ArgumentParser(prog="stokeslab")
    parser.add_argument("--config", help="JSON config file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="entropy of a form over a region or carrier")
    p.add_argument("--form", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--convention", choices=["intrinsic", "coordinate"],
                   default="intrinsic")
    p.add_argument("--resolution", type=int, default=128)
    _output_flags(p)

    p = sub.add_parser("stokes-check", help="Stokes residual of a candidate")
    p.add_argument("--form", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--candidate", required=True,
                   help="circle:r[,cw], boundary, or perimeter")
    p.add_argument("--resolution", type=int, default=1024)
    _output_flags(p)

    p = sub.add_parser("search", help="enumerate candidates and verify extremality")
    p.add_argument("--grid", required=True, help="WxH (or W, WxHxD), unit cells")
    p.add_argument("--cochain", required=True, help="JSON cochain file")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--sample", type=int, default=None,
                   help="random subsets to draw above the enumeration cap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="also write candidate rows as CSV")
    _output_flags(p)

    p = sub.add_parser("example", help="closed-form worked examples")
    p.add_argument("which", choices=["rectangle", "annulus"])
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--p", type=float, default=None, help="generalized-mean order")
    p.add_argument("--ri", type=float, default=1.0)
    p.add_argument("--ro", type=float, default=2.0)
    _output_flags(p)

    p = sub.add_parser("converge", help="resolution convergence study")
    p.add_argument("--quantity", choices=["entropy", "residual", "density"],
                   required=True)
    p.add_argument("--schedule", required=True, help="comma-separated resolutions")
    p.add_argument("--example", choices=["annulus", "uniform"], default="annulus")
    p.add_argument("--ri", type=float, default=1.0)
    p.add_argument("--ro", type=float, default=2.0)
    p.add_argument("--carrier", choices=["boundary", "circle"], default="boundary")
    p.add_argument("--csv", default=None)
    _output_flags(p)
    return parser


def _output_flags(p):
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def _cmd_entropy(args):
    region = parse_region(args.region)
    form = parse_form(args.form, region)
    carrier = region
    if isinstance(region, Curve):
        carrier = region
    elif region.kind == "annulus" and form.degree == 1:
        carrier = annulus_boundary_curve(region.r_inner, region.r_outer)
    report = entropy_direct(form, carrier, convention=args.convention,
                            resolution=args.resolution)
    return report


def _cmd_stokes_check(args):
    region = parse_region(args.region)
    form = parse_form(args.form, region)
    if args.candidate == "boundary":
        if region.kind == "annulus":
            candidate = annulus_boundary_curve(region.r_inner, region.r_outer)
        else:
            candidate = box_perimeter_curve(region)
    elif args.candidate == "perimeter":
        candidate = box_perimeter_curve(region)
    else:
        candidate = parse_region(args.candidate)
        if not isinstance(candidate, Curve):
            raise InvalidGeometryError("candidate must be a curve or 'boundary'")
    from .forms import integrate_curve, integrate_region
    target = integrate_region(exterior_derivative(form), region,
                              resolution=min(args.resolution, 256))
    value = integrate_curve(form, candidate, resolution=args.resolution)
    return {
        "schema": "stokes_check",
        "version": SCHEMA_VERSION,
        "target": target,
        "candidate_integral": value,
        "residual": abs(value - target),
        "resolution": args.resolution,
    }


def _cmd_search(args):
    shape = tuple(int(v) for v in args.grid.lower().split("x"))
    lo = tuple(0.0 for _ in shape)
    hi = tuple(float(s) for s in shape)
    complex_ = build_grid_complex(box_region(lo, hi), shape)
    with open(args.cochain, encoding="utf-8") as fh:
        data = json.load(fh)
    cochain = Cochain.from_json(complex_, data)
    report = verify_extremality(cochain, complex_, tol=args.tol,
                                sample=args.sample, seed=args.seed)
    if args.csv:
        emit_report(report, format="csv", path=args.csv)
    return report


def _cmd_example(args):
    if args.which == "rectangle":
        result = rectangle_oracle(RectangleParams(args.a, args.b, args.c, args.r),
                                  p_order=args.p)
    else:
        result = annulus_oracle(AnnulusParams(args.ri, args.ro))
    payload = {"schema": "oracle_result", "version": SCHEMA_VERSION,
               "example": args.which}
    payload.update(result)
    return payload


def _cmd_converge(args):
    schedule = [int(v) for v in args.schedule.split(",") if v]
    problem = {"example": args.example, "r_inner": args.ri, "r_outer": args.ro,
               "carrier": args.carrier}
    table = convergence_study(args.quantity, problem, schedule)
    if args.csv:
        emit_report(table, format="csv", path=args.csv)
    return table


_COMMANDS = {
    "entropy": _cmd_entropy,
    "stokes-check": _cmd_stokes_check,
    "search": _cmd_search,
    "example": _cmd_example,
    "converge": _cmd_converge,
}


def run_cli(argv):
    parser = _build_parser()
    try:
        # first pass only to pick up --config; argparse handles the rest
        if "--config" in argv:
            idx = argv.index("--config")
            config = load_config(argv[idx + 1])
            subparsers = parser._subparsers._group_actions[0].choices.values()
            for key, value in config.items():
                dest = key.replace("-", "_")
                parser.set_defaults(**{dest: value})
                for sub_parser in subparsers:
                    sub_parser.set_defaults(**{dest: value})
                    for action in sub_parser._actions:
                        if action.dest == dest:
                            action.required = False
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    except (OSError, json.JSONDecodeError, StokeslabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        result = _COMMANDS[args.command](args)
    except NoLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StokeslabError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    payload = result.to_payload() if hasattr(result, "to_payload") else result
    print(to_json_text(payload))
    if args.out:
        emit_report(result, format=args.format, path=args.out)
    return 0


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
