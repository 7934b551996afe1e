"""Command line interface.

Subcommands: ``test`` (one test on a CSV dataset), ``simulate`` (write model
realisations), ``power`` and ``size`` (Monte Carlo tables) and ``barcode``
(re-render a saved rejection file). Exit status is 0 on success, 2 for input
errors and 3 for numerical failures.
"""

import argparse
import json
import os
import sys
from argparse import Namespace

from . import __version__
from .barcode import read_rejections, render_barcode, result_barcode, write_rejections
from .datasets import from_arrays, ingest_csv, preprocess, write_csv
from .errors import InputError, NumericError
from .harness import DESK_REPS, FULL_REPS, format_table, run_specs, table_specs
from .hypothesis_tests import CORRECTIONS, TestConfig
from .models import POWER_MODELS, SIZE_MODELS, simulate_model
from .pipeline import normalise_test, run_test_on_series, test_grids
from .spectral import raw_periodogram

CORRECTION_FLAGS = {"bonferroni": "bonferroni", "fdr": "bh_fdr"}
DF_FLAGS = {"pooled": "pooled", "welch": "welch", "minn": "conservative_min_n"}
TRUNCATE_FLAGS = {"head": "truncate_head", "tail": "truncate_tail", "segment": "segment"}
DEFAULT_POWER_MODELS = ("P1", "P2", "P3", "P4", "P5", "P6", "P7")
DEFAULT_SIZE_MODELS = ("M1", "M2", "M3", "M4", "M5")


def _choice(mapping, name):
    def convert(text):
        key = str(text).strip().lower()
        if key not in mapping:
            raise InputError(f"--{name} must be one of {sorted(mapping)}, got {text!r}")
        return key

    return convert


def _add_test_flags(p, multi=False):
    if multi:
        p.add_argument("--tests", default="wst,ft,hft,ht", help="comma-separated tests")
    else:
        p.add_argument("--test", default="ft", help="wst, ft, hft or ht")
    if multi:
        p.add_argument("--correction", default="both", help="bonferroni, fdr or both")
    else:
        p.add_argument("--correction", default="bonferroni", help="bonferroni or fdr")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--df", default="pooled", help="pooled, welch or minn")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")


def build_parser():
    parser = argparse.ArgumentParser(prog="lswtest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run one test on a grouped CSV dataset")
    p.add_argument("csv")
    p.add_argument("--format", default="wide", choices=("wide", "long"))
    p.add_argument("--groups", help="comma-separated group labels in the order group1,group2")
    p.add_argument("--truncate", default="head", help="head, tail or segment")
    p.add_argument("--start", type=int, default=0, help="first row kept with --truncate segment")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG report")
    _add_test_flags(p)

    p = sub.add_parser("simulate", help="write realisations of a simulation model as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=25, help="series per group")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rep", type=int, default=0)
    p.add_argument("--format", default="wide", choices=("wide", "long"))
    p.add_argument("--out", required=True)
    p.add_argument("--config")

    for name, default_models in (("power", DEFAULT_POWER_MODELS), ("size", DEFAULT_SIZE_MODELS)):
        p = sub.add_parser(name, help=f"Monte Carlo {name} table")
        p.add_argument("--models", default=",".join(default_models))
        p.add_argument("--n", type=int, default=25, help="series per group")
        p.add_argument("--reps", type=int, default=DESK_REPS)
        p.add_argument("--full-scale", action="store_true", help=f"use {FULL_REPS} replicates")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out-dir", default=".")
        p.add_argument("--no-plot", action="store_true")
        _add_test_flags(p, multi=True)

    p = sub.add_parser("barcode", help="re-render a barcode from a saved rejection CSV")
    p.add_argument("rejections")
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="")
    return parser


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}: line {n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _merge_config(parser, argv, args):
    """Re-parse with config values as defaults so explicit flags win."""
    if not getattr(args, "config", None):
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    for key in values:
        if key not in known or key in ("config", "help"):
            raise InputError(f"{args.config}: unknown key {key!r} for '{args.command}'")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            values[key] = values[key].lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                values[key] = action.type(values[key])
            except ValueError:
                raise InputError(f"{args.config}: bad value for {key!r}: {values[key]!r}") from None
        if action.choices is not None and values[key] not in action.choices:
            raise InputError(f"{args.config}: {key} must be one of {list(action.choices)}")
    sub.set_defaults(**values)
    return parser.parse_args(argv)


def _test_config(args):
    return TestConfig(
        alpha=args.alpha,
        df_mode=DF_FLAGS[_choice(DF_FLAGS, "df")(args.df)],
        correction=CORRECTION_FLAGS[_choice(CORRECTION_FLAGS, "correction")(args.correction)],
    )


def _write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_test(args):
    test = normalise_test(args.test)
    cfg = _test_config(args)
    groups = None if not args.groups else [g.strip() for g in args.groups.split(",")]
    data = ingest_csv(args.csv, args.format, groups=groups)
    data = preprocess(data, TRUNCATE_FLAGS[_choice(TRUNCATE_FLAGS, "truncate")(args.truncate)], args.start)
    X1, X2 = data.group_arrays()
    result = run_test_on_series(X1, X2, test, cfg)
    T = data.length
    os.makedirs(args.out_dir, exist_ok=True)
    write_rejections(result, os.path.join(args.out_dir, "rejections.csv"), T)
    title = f"{test} ({args.correction}), {data.groups[0]} vs {data.groups[1]}"
    artifact = result_barcode(result, T, title)
    _write_text(os.path.join(args.out_dir, "barcode.svg"), render_barcode(artifact))
    summary = {
        "test": test,
        "correction": cfg.correction,
        "alpha": cfg.alpha,
        "df_mode": cfg.df_mode,
        "groups": list(data.groups),
        "n_per_group": list(data.group_sizes()),
        "length": T,
        "truncation": list(data.truncation),
        "n_tested": result.n_tested,
        "n_rejections": result.n_rejections,
        "percent_of_cells": round(100.0 * result.n_rejections / max(result.n_tested, 1), 6),
        "reject_global": bool(result.reject_global),
        "per_level_counts": {str(k): int(v) for k, v in result.per_level_counts().items()},
    }
    _write_text(os.path.join(args.out_dir, "summary.json"), json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if not args.no_plot:
        from .plotting import report_figure

        I1, I2 = raw_periodogram(X1), raw_periodogram(X2)
        m1 = test_grids(I1, test, cfg).mean(axis=0)
        m2 = test_grids(I2, test, cfg).mean(axis=0)
        report_figure(os.path.join(args.out_dir, "report.png"), m1, m2, artifact, data.groups, title)
    print(f"{test}: {result.n_rejections} of {result.n_tested} cells rejected ({cfg.correction}, alpha={cfg.alpha})")
    return 0


def cmd_simulate(args):
    X1, X2 = simulate_model(args.model, args.n, args.seed, args.rep)
    write_csv(from_arrays(X1, X2, labels=("group1", "group2")), args.out, args.format)
    print(f"wrote {len(X1) + len(X2)} series of length {X1.shape[-1]} to {args.out}")
    return 0


def cmd_table(args):
    models = [m.strip().upper() for m in args.models.split(",") if m.strip()]
    tests = tuple(normalise_test(t) for t in args.tests.split(",") if t.strip())
    reps = FULL_REPS if args.full_scale else args.reps
    if args.workers < 1:
        raise InputError("--workers must be >= 1")
    both = args.correction.strip().lower() == "both"
    base = _test_config(Namespace(**{**vars(args), "correction": "bonferroni"}) if both else args)
    allowed = POWER_MODELS if args.command == "power" else SIZE_MODELS
    for m in models:
        if m not in allowed:
            raise InputError(f"{m} is not a {args.command} model; choose from {', '.join(allowed)}")
    corrections = CORRECTIONS if args.correction == "both" else (base.correction,)
    specs = table_specs(models, args.n, reps, args.seed, base, tests, corrections)
    table = format_table(run_specs(specs, workers=args.workers))
    os.makedirs(args.out_dir, exist_ok=True)
    _write_text(os.path.join(args.out_dir, f"{args.command}.csv"), table.csv)
    _write_text(os.path.join(args.out_dir, f"{args.command}.txt"), table.text)
    if not args.no_plot:
        from .plotting import power_figure

        label = "power" if args.command == "power" else "size"
        power_figure(os.path.join(args.out_dir, f"{args.command}.png"), table.reports, f"Empirical {label} (%), N={args.n}")
    sys.stdout.write(table.text)
    return 0


def cmd_barcode(args):
    table = read_rejections(args.rejections)
    _write_text(args.out, render_barcode(table.barcode(args.title)))
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "power": cmd_table, "size": cmd_table, "barcode": cmd_barcode}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(parser, argv, args)
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
