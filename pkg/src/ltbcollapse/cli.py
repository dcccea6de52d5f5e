"""Command line entry point: ``ltbcollapse <command> ...``.

Exit status: 0 on success, 1 when a verification check fails, 2 on bad
input (malformed arguments, invalid model, unreadable config).
"""

import argparse
import json
import sys
from dataclasses import asdict

from ._version import __version__
from .classify import NumericSettings, classify
from .errors import CollapseError, ModelError, NoNakedStartError
from .geodesics import integrate_from_singularity, singular_start
from .geometry import ModelParams
from .roots import critical_constants, find_critical_a_numeric, solve_roots
from .sweep import ConfigError, SweepGrid, emit, load_model_config, natural_window, run_sweep
from .verification import run_identity_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _gamma_term(text):
    try:
        p, c = text.split(":")
        return int(p), float(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected POWER:COEFF, got {text!r}") from None


def _add_model_args(p):
    p.add_argument("--config", help="JSON file with keys n, a, gamma, r_max")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--gamma", type=_gamma_term, action="append", default=[], metavar="POWER:COEFF")
    p.add_argument("--r-max", type=float, help="outer radius (default: a window scaled to the model)")


def _add_settings_args(p):
    d = NumericSettings()
    p.add_argument("--rtol", type=float, default=d.rtol)
    p.add_argument("--atol", type=float, default=d.atol)
    p.add_argument("--epsilon", type=float, default=d.epsilon, help="launch radius for singular starts")
    p.add_argument("--probe-margin", type=float, default=d.probe_margin)
    p.add_argument("--probe-floor", type=float, default=d.probe_floor)


def _add_output_args(p, default):
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--output", "-o", default="-", help="output file ('-' for stdout)")


def _settings(args):
    return NumericSettings(
        rtol=args.rtol, atol=args.atol, epsilon=args.epsilon,
        probe_margin=args.probe_margin, probe_floor=args.probe_floor,
    )


def _model(args):
    if args.config:
        if args.n is not None or args.a is not None or args.gamma or args.r_max is not None:
            raise InputError("--config cannot be combined with --n/--a/--gamma/--r-max")
        return load_model_config(args.config)
    if args.n is None or args.a is None:
        raise InputError("either --config or both --n and --a are required")
    r_max = args.r_max
    if r_max is None:
        r_max = natural_window(args.n, args.a) if args.n >= 1 and args.a > 0 else 0.1
    return ModelParams(args.n, args.a, tuple(args.gamma), r_max)


def _write(text, dest):
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_classify(args):
    report = classify(_model(args), _settings(args))
    _write(_dump(report.to_dict()), args.output)
    return EXIT_OK


def cmd_sweep(args):
    grid = SweepGrid(tuple(args.n), args.a_min, args.a_max, args.a_steps, args.spacing)
    result = run_sweep(grid, _settings(args), workers=args.workers, gamma_terms=tuple(args.gamma), r_max=args.r_max)
    emit(result, args.format, args.output)
    return EXIT_OK


def cmd_geodesic(args):
    params = _model(args)
    start = singular_start(params, args.epsilon, args.root_index)
    path = integrate_from_singularity(params, start, rtol=args.rtol, atol=args.atol)
    _write(path.to_csv() if args.format == "csv" else path.to_json() + "\n", args.output)
    return EXIT_OK


def cmd_roots(args):
    _write(_dump(solve_roots(args.a).to_dict()), args.output)
    return EXIT_OK


def cmd_verify(args):
    results = run_identity_suite()
    ok = all(r.passed for r in results.values())
    _write(_dump({"pass": ok, "checks": {k: v.to_dict() for k, v in results.items()}}), args.output)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_constants(args):
    out = asdict(critical_constants())
    if args.bisect:
        out["a_c_bisection"] = find_critical_a_numeric()
    _write(_dump(out), args.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="ltbcollapse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="analytic and numeric endstate of one model (JSON)")
    _add_model_args(p)
    _add_settings_args(p)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="classify a grid of (n, a)")
    p.add_argument("--n", type=int, action="extend", nargs="+", required=True)
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--a-steps", type=int, required=True)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--gamma", type=_gamma_term, action="append", default=[], metavar="POWER:COEFF")
    p.add_argument("--r-max", type=float, help="fixed outer radius (default: per-point window)")
    p.add_argument("--workers", type=int, help="process count (default: $LTBCOLLAPSE_WORKERS or all cores)")
    _add_settings_args(p)
    _add_output_args(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("geodesic", help="outgoing ray from the singularity, sampled in r")
    _add_model_args(p)
    _add_settings_args(p)
    p.add_argument("--root-index", type=int, default=0, help="n=3: which admissible root to launch on")
    _add_output_args(p, "csv")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("roots", help="roots of the n=3 quartic for one amplitude")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("verify", help="run the exact identity checks")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constants", help="critical amplitudes")
    p.add_argument("--bisect", action="store_true", help="also recover a_c by bisection")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoNakedStartError as exc:
        print(f"ltbcollapse: no singular start: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ConfigError, ModelError, OSError, ValueError) as exc:
        print(f"ltbcollapse: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CollapseError as exc:
        print(f"ltbcollapse: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
