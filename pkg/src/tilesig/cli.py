"""Command-line entry point: ``tilesig {kernel,gram,validate,bench,gen}``.

Exit codes: 0 success, 2 usage or input error, 3 numeric failure,
4 validation failure.  A JSON file given with ``--config`` supplies
defaults for any flag; flags on the command line take precedence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .datagen import DEFAULT_SEED, GenSpec
from .errors import (FactorizationError, InconsistentBoundaryError, InvalidArgumentError,
                     NumericOverflowError, ParseError, ResourceError)
from .gram import SCHEMA_VERSION, gram_matrix
from .paths import IncrementTable, load_csv, pad_common, save_csv
from .truncation import DEFAULT_ORDER, TruncationPolicy
from .validate import SUITES, run_suite
from .wavefront import propagate, propagate_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _add_policy(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--order", type=int, help=f"fixed truncation order (default {DEFAULT_ORDER})")
    g.add_argument("--tol", type=float, help="adaptive truncation tolerance")
    p.add_argument("--threads", type=int, help="worker threads (default 1)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tilesig", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file of default flag values")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", help="kernel value of two series")
    k.add_argument("x")
    k.add_argument("y")
    _add_policy(k)
    k.add_argument("--grid", help="also write K at every pair of knots to this CSV")
    k.add_argument("--json", action="store_true", help="print a JSON metadata line")

    g = sub.add_parser("gram", help="Gram matrix of a family of series")
    g.add_argument("inputs", nargs="+", help="CSV files or one directory of CSV files")
    _add_policy(g)
    g.add_argument("--out", help="Gram CSV path (stdout if omitted)")
    g.add_argument("--meta", help="metadata JSON path (default: --out with .json suffix)")
    g.add_argument("--bound", action="store_true", help="include the error bound in metadata")

    v = sub.add_parser("validate", help="run validation suites")
    v.add_argument("--suite", choices=SUITES + ("all",), help="suite name (default all)")
    v.add_argument("--seed", type=int)
    v.add_argument("--cases", type=int)
    v.add_argument("--tol", type=float, help="override every tolerance in the suite")
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    b = sub.add_parser("bench", help="timing and memory-counter table")
    b.add_argument("--lengths", type=_int_list, help="comma-separated lengths (default 3,5,9,17,33)")
    b.add_argument("--dims", type=_int_list, help="comma-separated dimensions (default 2)")
    b.add_argument("--repeats", type=int, help="timed runs per row (default 10)")
    b.add_argument("--order", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--threads", type=int)
    b.add_argument("--no-oracle", action="store_true", help="skip the accuracy column")
    b.add_argument("--out", help="CSV path (stdout if omitted)")

    n = sub.add_parser("gen", help="generate a synthetic series as CSV")
    n.add_argument("--kind", choices=("brownian", "fbm", "near_periodic"))
    n.add_argument("--length", type=int)
    n.add_argument("--dim", type=int)
    n.add_argument("--seed", type=int)
    n.add_argument("--hurst", type=float)
    n.add_argument("--period", type=float)
    n.add_argument("--amplitude", type=float)
    n.add_argument("--noise", type=float)
    n.add_argument("--out", help="CSV path (stdout if omitted)")
    return p


DEFAULTS = {
    "threads": 1, "seed": DEFAULT_SEED, "repeats": 10, "lengths": [3, 5, 9, 17, 33],
    "dims": [2], "kind": "brownian", "length": 33, "dim": 2, "hurst": 0.5,
    "period": 0.25, "amplitude": 1.0, "noise": 0.0, "suite": "all",
}


def _int_list(text):
    try:
        return [int(t) for t in str(text).replace(" ", ",").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse(argv) -> argparse.Namespace:
    """Parse ``argv`` and merge defaults from ``--config``."""
    args = build_parser().parse_args(argv)
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
    cli_policy = getattr(args, "order", None) is not None or getattr(args, "tol", None) is not None
    for key, value in config.items():
        key = key.replace("-", "_")
        if not hasattr(args, key) or key in ("command", "config"):
            continue
        if key in ("order", "tol") and cli_policy and args.command != "validate":
            continue
        if getattr(args, key) is None:
            setattr(args, key, _int_list(value) if key in ("lengths", "dims") else value)
    if args.command in ("kernel", "gram") and args.order is not None and args.tol is not None:
        raise UsageError("--order and --tol are mutually exclusive")
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _policy(args) -> TruncationPolicy:
    if args.tol is not None:
        return TruncationPolicy.adaptive(args.tol)
    return TruncationPolicy.fixed(DEFAULT_ORDER if args.order is None else args.order)


def cmd_kernel(args, out) -> int:
    x, y = load_csv(args.x), load_csv(args.y)
    if x.dim != y.dim:
        raise InvalidArgumentError(f"dimension mismatch: {x.dim} vs {y.dim}")
    policy = _policy(args)
    px, py = pad_common(x, y)
    N, converged = policy.resolve(IncrementTable(px, py).max_abs_rho)
    t0 = time.perf_counter()
    run = propagate_grid if args.grid else propagate
    r = run(x, y, N, args.threads)
    wall = time.perf_counter() - t0
    if args.grid:
        np.savetxt(args.grid, r.grid, delimiter=",", fmt="%.17g")
    print(f"K={r.value!r}", file=out)
    if args.json:
        meta = {"schema": SCHEMA_VERSION, "value": r.value, "N": r.order,
                "policy": policy.to_dict(), "converged": converged,
                "max_abs_rho": r.max_abs_rho, "tiles": r.tiles_processed,
                "peak_live_series": r.peak_live_series, "wall_time_s": wall}
        print(json.dumps(meta), file=out)
    return EXIT_OK


def _gram_inputs(items):
    paths = [Path(p) for p in items]
    if len(paths) == 1 and paths[0].is_dir():
        paths = sorted(paths[0].glob("*.csv"))
        if not paths:
            raise InvalidArgumentError(f"no CSV files in {items[0]}")
    return paths


def cmd_gram(args, out) -> int:
    paths = _gram_inputs(args.inputs)
    family = [load_csv(p) for p in paths]
    res = gram_matrix(family, _policy(args), args.threads)
    meta = res.metadata()
    meta["inputs"] = [str(p) for p in paths]
    if not args.bound:
        meta.pop("bound")
    if args.out:
        res.write_csv(args.out)
        meta_path = args.meta or str(Path(args.out).with_suffix(".json"))
    else:
        for row in res.values:
            print(",".join(repr(float(v)) for v in row), file=out)
        meta_path = args.meta
    if meta_path:
        Path(meta_path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    else:
        print(json.dumps(meta), file=out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for s in suites:
        for case in run_suite(s, args.seed, args.cases, args.tol, args.inject_fault):
            print(case.line(), file=out)
            ok &= case.passed
    print("validation passed" if ok else "validation FAILED", file=out)
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_bench(args, out) -> int:
    N = DEFAULT_ORDER if args.order is None else args.order
    rows = bench_mod.run_bench(args.lengths, args.dims, N, args.repeats, args.seed,
                               args.threads, not args.no_oracle)
    if args.out:
        bench_mod.write_csv(rows, args.out)
    else:
        print(",".join(bench_mod.COLUMNS), file=out)
        for r in rows:
            print(",".join(str(c) for c in r.as_list()), file=out)
    return EXIT_OK


def cmd_gen(args, out) -> int:
    spec = GenSpec(args.kind, args.length, args.dim, args.seed, args.hurst, args.period,
                   args.amplitude, args.noise)
    ts = spec.generate()
    if args.out:
        save_csv(ts, args.out)
    else:
        for row in ts.points:
            print(",".join(repr(float(v)) for v in row), file=out)
    return EXIT_OK


COMMANDS = {"kernel": cmd_kernel, "gram": cmd_gram, "validate": cmd_validate,
            "bench": cmd_bench, "gen": cmd_gen}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = parse(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (ParseError, InvalidArgumentError, InconsistentBoundaryError, ResourceError,
            OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (NumericOverflowError, FactorizationError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=err)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
