"""Command-line interface: ``mwfzp run|sweep|preset``.

Exit status is 0 on success, 1 for configuration errors and 2 for
numerical failures.  ``MWFZP_OUTPUT_DIR`` sets the default output
directory.
"""
import argparse
import logging
import os
import sys

from .config import PRESETS, from_dict, parse_config, preset
from .errors import ConfigurationError, ConvergenceError, NumericalError
from .runner import run_single, run_sweep

ENV_OUTPUT = "MWFZP_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _grid(text):
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxN, got {text!r}") from None
    return nx, ny


def _times(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected T1,T2,..., got {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory")
    common.add_argument("--dt", type=float, help="override the time step")
    common.add_argument("--grid", type=_grid, metavar="NxN", help="override the grid size")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes for sweeps (default: all cores)")
    common.add_argument("--emit-snapshots", type=_times, metavar="T1,T2,...",
                        help="write the wave function at these scaled times")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="mwfzp", description="Matter-wave zone-plate simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="single run from a TOML config")
    p.add_argument("config")
    p = sub.add_parser("sweep", parents=[common], help="parameter sweep from a TOML config")
    p.add_argument("config")
    p = sub.add_parser("preset", parents=[common], help="run a named preset")
    p.add_argument("name", choices=sorted(PRESETS))
    return parser


def apply_overrides(cfg, args):
    """Fold command-line overrides into the config."""
    d = cfg.to_dict()
    if args.dt is not None:
        d["solver"]["dT"] = args.dt
    if args.grid is not None:
        d["grid"]["nx"], d["grid"]["ny"] = args.grid
    if args.emit_snapshots is not None:
        d["output"]["snapshot_times"] = list(args.emit_snapshots)
    return from_dict(d)


def output_dir(cfg, args, default_name):
    return (args.out or cfg.output.directory or os.environ.get(ENV_OUTPUT)
            or os.path.join("mwfzp-out", default_name))


def _summary(record):
    keys = ("Tc", "f1_over_fcal", "sigma_F1_over_sigma_Y", "eta_1", "eta_3")
    return "  ".join(f"{k}={record[k]:.6g}" for k in keys)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "preset":
            cfg, name = preset(args.name), args.name
        else:
            cfg = parse_config(args.config)
            name = os.path.splitext(os.path.basename(args.config))[0]
        cfg = apply_overrides(cfg, args)
        out = output_dir(cfg, args, name)
        os.makedirs(out, exist_ok=True)
        if args.command == "run" or (args.command == "preset" and cfg.sweep is None):
            res = run_single(cfg, out)
            print(_summary(res.record))
        else:
            header, rows = run_sweep(cfg, threads=args.threads, out_dir=out)
            failed = [r for r in rows if r[-1]]
            print(f"{len(rows)} points, {len(failed)} failed; table in {os.path.join(out, 'sweep.csv')}")
            if failed and len(failed) == len(rows):
                return EXIT_NUMERIC
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ConvergenceError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
