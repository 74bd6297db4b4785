"""Command line interface: hyplattice {count, strip, transform-suite, experiment, oracle-check}."""

from __future__ import annotations

import argparse
import sys

from .errors import HypLatticeError, NumericError, ValidationError
from .geometry import dist_from_u
from .lab import (CsvSink, ExperimentConfig, covolume, parse_config, predicted_exponent,
                  run_count_experiment, run_transform_suite)
from .orbit import (BoxSpec, StripSpec, count_box, count_hypercube, count_strip,
                    enumerate_box_orbit, implied_entry_bound, naive_oracle)
from .reduction import height_components
from .selberg import main_term_box, main_term_hypercube, main_term_strip

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _point(text):
    xy = _floats(text)
    if len(xy) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return xy


def _add_group_args(p):
    p.add_argument("--group", choices=("modular", "hilbert"), default="modular",
                   help="PSL2(Z) or the Hilbert modular group PSL2(O_F)")
    p.add_argument("--m", type=int, default=None, help="field Q(sqrt m) for --group hilbert")
    p.add_argument("--z", type=_point, action="append", metavar="X,Y",
                   help="one coordinate of the base point; repeat per factor (default i)")
    p.add_argument("--threads", type=int, default=1)


def _setup(args):
    cfg = ExperimentConfig(group_kind=args.group, m=args.m, threads=args.threads)
    spec = cfg.field_spec()
    cfg.z = tuple(args.z) if args.z else ((0.0, 1.0),) * spec.degree
    if len(cfg.z) != spec.degree:
        raise ValidationError(f"need {spec.degree} --z values, got {len(cfg.z)}")
    return spec, cfg.point()


def _report(res, main):
    print(f"count          {res.count}")
    print(f"main_term      {main:.10g}")
    print(f"ratio          {res.count / main if main > 0 else float('inf'):.10g}")
    print(f"candidates     {res.candidates}")
    print(f"near_boundary  {res.near_boundary}")
    print(f"wall_s         {res.wall_s:.3f}")


def cmd_count(args):
    spec, z = _setup(args)
    vol = covolume(spec)
    d = spec.degree
    if args.T is not None:
        res = count_hypercube(z, args.T, spec, threads=args.threads)
        _report(res, main_term_hypercube(args.T, vol, d))
    else:
        if args.V is None:
            raise ValidationError("give --T for a hypercube or --V (and --U) for a box")
        V = args.V * d if len(args.V) == 1 else args.V
        U = args.U if args.U is not None else (0.0,)
        U = U * d if len(U) == 1 else U
        box = BoxSpec(U, V)
        res = count_box(z, box, spec, threads=args.threads)
        _report(res, main_term_box(box, vol, d))
    return EXIT_OK


def cmd_strip(args):
    spec, z = _setup(args)
    strip = StripSpec(args.E, args.A, args.B, args.T)
    res = count_strip(z, strip, spec, threads=args.threads)
    _report(res, main_term_strip(strip, covolume(spec), spec.degree))
    return EXIT_OK


def cmd_transform_suite(args):
    checks = run_transform_suite()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


def cmd_experiment(args):
    cfg = parse_config(args.config)
    if args.out is not None:
        cfg.out_path = args.out
    if args.threads is not None:
        cfg.threads = args.threads
    spec = cfg.validate()
    if cfg.kind == "transform-suite":
        return cmd_transform_suite(args)
    pred = predicted_exponent(cfg, spec.degree)
    print(f"# {cfg.kind} d={spec.degree} box.mode={cfg.box_mode} {pred.describe()}")
    sink = CsvSink(cfg.out_path) if cfg.out_path else None

    def emit(rep):
        if sink is not None:
            sink(rep)
        print(",".join(rep.row()))

    try:
        run_count_experiment(cfg, on_row=emit)
    finally:
        if sink is not None:
            sink.close()
    return EXIT_OK


def cmd_oracle_check(args):
    spec, z = _setup(args)
    V = args.V * spec.degree if len(args.V) == 1 else args.V
    bound = args.bound if args.bound is not None else implied_entry_bound(z, V, spec)
    fast = dict(enumerate_box_orbit(z, V, spec))
    slow = naive_oracle(z, V, bound, spec)
    same = set(fast) == set(slow)
    print(f"entry bound    {bound}")
    print(f"engine         {len(fast)}")
    print(f"oracle         {len(slow)}")
    print(f"agree          {same}")
    for g in sorted(set(fast) ^ set(slow), key=repr)[:20]:
        u = fast.get(g) or slow.get(g)
        print(f"  differs: {g}  u={u}  dist={[dist_from_u(x) for x in u]}")
    return EXIT_OK if same else EXIT_NUMERIC


def cmd_height(args):
    spec, z = _setup(args)
    rep = height_components(z, spec)
    print(f"reduced    {rep.reduced}")
    print(f"heights    {rep.heights}")
    print(f"n(z)       {rep.n}")
    print(f"converged  {rep.converged}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hyplattice",
        description="Exact lattice point counting for PSL2(Z) and Hilbert modular groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count orbit points in a hypercube or a u-box")
    _add_group_args(p)
    p.add_argument("--T", type=float, default=None, help="hypercube: all distances <= T")
    p.add_argument("--U", type=_floats, default=None, help="box lower u-bounds (default 0)")
    p.add_argument("--V", type=_floats, default=None, help="box upper u-bounds (half-open)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("strip", help="count orbit points in a distance strip")
    _add_group_args(p)
    p.add_argument("--E", type=_ints, required=True, help="1-based coordinates with intervals")
    p.add_argument("--A", type=_floats, required=True, help="lower distances for E")
    p.add_argument("--B", type=_floats, required=True, help="upper distances for E")
    p.add_argument("--T", type=float, required=True, help="height for the other coordinates")
    p.set_defaults(func=cmd_strip)

    p = sub.add_parser("transform-suite", help="run the Selberg transform property checks")
    p.set_defaults(func=cmd_transform_suite)

    p = sub.add_parser("experiment", help="run a T-sweep from a config file and write CSV")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="CSV path (overrides out.path)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("oracle-check", help="compare the engine with the exhaustive oracle")
    _add_group_args(p)
    p.add_argument("--V", type=_floats, required=True, help="u-bounds")
    p.add_argument("--bound", type=int, default=None, help="coefficient bound (default implied)")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("height", help="reduce a point and report its cusp heights")
    _add_group_args(p)
    p.set_defaults(func=cmd_height)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except HypLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
