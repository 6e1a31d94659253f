"""Command-line front end: ``areabilliard <command> [options]``.

Every command writes plain data (CSV or JSON) to ``--out`` or stdout.
Exit status is 0 on success, 1 on invalid input and 2 when a computation
fails to converge or close.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, moebius, rotation
from .billiard import MapConfig, envelope_midpoint, orbit
from .errors import NumericalFailure, ValidationError
from .geometry import BUILTIN_POLYGONS, Polygon, load_polygon, point_at

GRAMMAR = """\
commands:
  staircase      --polygon P --a-lo A --a-hi A --samples N [--iterations N] [--jobs J] --out F
  orbit          --polygon P (--area A | --a a) [--start s] [--steps N] --out F
  rotnum         --polygon P (--area A | --a a) [--iterations N] [--q-max Q]
  plateau        --polygon P --p P --q Q --bracket LO HI [--tol T]
  verify         --polygon P (--area A | --a a) [--start s] [--steps N] [--h H] [--out F]
  counterexample triangle|parallelogram [--perturb EPS]
  table          --polygon P (--area A | --a a) [--samples N] [--start s] [--out F]
  fake-orbit     --polygon P --areas A1,A2,... --p P [--bracket LO HI]

polygons are JSON files holding [[x, y], ...] or @square, @regular-pentagon,
@house-pentagon; --normalized reads every area as a fraction of the polygon
area S."""

ORBIT_COLUMNS = ["step", "side", "t", "s_lift", "x", "y", "derivative", "sigma"]
TABLE_COLUMNS = ["index", "s", "x", "y"]


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit status 1 and the full grammar."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\n{GRAMMAR}\n")
        raise SystemExit(1)


def resolve_polygon(spec: str) -> Polygon:
    if spec.startswith("@"):
        name = spec[1:]
        if name not in BUILTIN_POLYGONS:
            raise UsageError(f"unknown built-in polygon {name!r}; choose from {sorted(BUILTIN_POLYGONS)}")
        return BUILTIN_POLYGONS[name]()
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"polygon file not found: {spec}")
    return load_polygon(path)


def _area(args, poly: Polygon, value: float) -> float:
    return value * poly.area if args.normalized else value


def _config(args) -> MapConfig:
    poly = resolve_polygon(args.polygon)
    if args.area is not None:
        A = _area(args, poly, args.area)
    elif args.a is not None:
        A = _area(args, poly, args.a) / 2.0
    else:
        raise UsageError("one of --area or --a is required")
    return MapConfig(poly, A)


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def cmd_staircase(args) -> int:
    poly = resolve_polygon(args.polygon)
    rows = rotation.staircase_sweep(
        poly,
        _area(args, poly, args.a_lo),
        _area(args, poly, args.a_hi),
        args.samples,
        n=args.iterations,
        q_max=args.q_max,
        grid=args.grid,
        jobs=args.jobs,
    )
    with _output(args.out) as fh:
        rotation.write_staircase_csv(rows, fh)
    return 0


def cmd_orbit(args) -> int:
    cfg = _config(args)
    orb = orbit(cfg, args.start, args.steps)
    marks = analysis.chord_marks(cfg, orb)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ORBIT_COLUMNS)
        for i, (x, s) in enumerate(zip(orb.points, orb.lift_values)):
            last = i == len(marks)
            sg = None if last else marks[i].sigma
            w.writerow([
                i, x.side, _fmt(x.t), _fmt(s), _fmt(x.xy[0]), _fmt(x.xy[1]),
                "" if last else _fmt(orb.step_derivatives[i]),
                "" if sg is None else sg,
            ])
    return 0


def cmd_rotnum(args) -> int:
    cfg = _config(args)
    est = rotation.rotation_number(cfg, n=args.iterations, q_max=args.q_max, grid=args.grid)
    print(est)
    if est.exact:
        w = est.witness
        print(f"witness s={w.s!r} side={w.side} t={w.t!r} xy=({w.xy[0]!r}, {w.xy[1]!r})")
    return 0


def cmd_plateau(args) -> int:
    poly = resolve_polygon(args.polygon)
    lo, hi = (_area(args, poly, v) for v in args.bracket)
    a_lo, a_hi = rotation.plateau_bounds(poly, args.p, args.q, (lo, hi), tol=args.tol, grid=args.grid)
    print(f"plateau {args.p}/{args.q}: [{a_lo!r}, {a_hi!r}]")
    return 0


def _dump_json(obj, path) -> None:
    with _output(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not serializable: {type(v).__name__}")


def cmd_verify(args) -> int:
    cfg = _config(args)
    report = analysis.verify_orbit(cfg, args.start, args.steps, args.h)
    _dump_json(report, args.out)
    return 0


def _coord(u: float):
    return "inf" if math.isinf(u) or abs(u) > 1e12 else float(u)


def cmd_counterexample(args) -> int:
    config = moebius.CONFIGS[args.config]()
    if args.perturb:
        config = moebius.perturbed(config, args.perturb)
    comp = config.composition()
    dist = moebius.identity_distance(comp)
    print(f"configuration: {config.name}")
    print(f"cut area: {config.cut_area!r}")
    print("composition (unit Frobenius norm):")
    for row in comp.normalized():
        print("  " + "  ".join(f"{v: .12f}" for v in row))
    print(f"identity distance: {dist:.3e}")
    print(f"identity: {'yes' if dist <= 1e-9 else 'no'}")
    for start, chain in config.chains:
        steps = config.run_chain(chain, start)
        ok = all(moebius.same_point(got, want) for _, _, got, want in steps)
        images = " -> ".join(f"{name}[l{line + 1}]={_coord(got)}" for name, line, got, _ in steps)
        print(f"chain {' -> '.join(chain)}: {'closes' if ok else 'open'} ({chain[0]} -> {images})")
    return 0


def cmd_table(args) -> int:
    cfg = _config(args)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for i in range(args.samples):
            s = args.start + i / args.samples
            x = point_at(cfg.poly, s)
            m = envelope_midpoint(cfg, x)
            w.writerow([i, _fmt(x.s), _fmt(m[0]), _fmt(m[1])])
    return 0


def cmd_fake_orbit(args) -> int:
    poly = resolve_polygon(args.polygon)
    try:
        areas = [_area(args, poly, float(v)) for v in args.areas.split(",")]
    except ValueError:
        raise UsageError(f"bad area list {args.areas!r}") from None
    orb = analysis.fake_orbit(poly, areas, args.p, bracket=args.bracket, grid=args.grid)
    report = {
        "areas": areas,
        "p": args.p,
        "start": orb.lift_values[0],
        "closure_error": orb.lift_values[-1] - orb.lift_values[0] - args.p,
        "derivative_product": orb.derivative_product,
        "finite_difference_steps": orb.fd_steps,
        "points": [list(x.xy) for x in orb.points],
    }
    _dump_json(report, args.out)
    return 0


def build_parser() -> Parser:
    parser = Parser(
        prog="areabilliard",
        description="Constant-area chord maps on convex polygons.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=Parser)
    sub.required = True

    def common(p, area=True):
        p.add_argument("--polygon", required=True, help="JSON vertex file or @builtin")
        p.add_argument("--normalized", action="store_true", help="areas are fractions of S")
        if area:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--area", type=float, help="cut area A")
            g.add_argument("--a", type=float, help="area parameter a = 2A")

    def kw(**extra):
        return dict(allow_abbrev=False, **extra)

    p = sub.add_parser("staircase", help="rotation number sweep over A", **kw())
    common(p, area=False)
    p.add_argument("--a-lo", type=float, required=True)
    p.add_argument("--a-hi", type=float, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--q-max", type=int, default=200)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_staircase)

    p = sub.add_parser("orbit", help="orbit table as CSV", **kw())
    common(p)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("rotnum", help="rotation number at one area", **kw())
    common(p)
    p.add_argument("--iterations", type=int, default=200_000)
    p.add_argument("--q-max", type=int, default=200)
    p.add_argument("--grid", type=int, default=64)
    p.set_defaults(func=cmd_rotnum)

    p = sub.add_parser("plateau", help="area interval of one rational plateau", **kw())
    common(p, area=False)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--grid", type=int, default=64)
    p.set_defaults(func=cmd_plateau)

    p = sub.add_parser("verify", help="chord-sign and deformation checks as JSON", **kw())
    common(p)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--h", type=float, default=analysis.DEFAULT_H)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", help="identity compositions of line maps", **kw())
    p.add_argument("config", choices=sorted(moebius.CONFIGS))
    p.add_argument("--perturb", type=float, default=0.0, metavar="EPS")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("table", help="envelope (table boundary) samples as CSV", **kw())
    common(p)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fake-orbit", help="closed chain with varying cut areas", **kw())
    common(p, area=False)
    p.add_argument("--areas", required=True, help="comma-separated areas A1,A2,...")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fake_orbit)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"areabilliard: error: {exc}\n\n{GRAMMAR}\n")
        return 1
    except (ValidationError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"areabilliard: invalid input: {exc}\n")
        return 1
    except NumericalFailure as exc:
        sys.stderr.write(f"areabilliard: numerical failure: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
