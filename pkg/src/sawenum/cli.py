"""Command-line interface for reproducible enumeration and analysis runs.

Subcommands: direct (oracle enumeration), double (length doubling, with
partitioned/checkpointed execution), combine (unequal lengths), analyze
(exponent estimators), fit (asymptotic fits).  All exact integers print
as plain decimal strings; identical invocations (including --seed)
produce byte-identical stdout.  Timing and other volatile diagnostics go
to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analysis import (
    SeriesTable,
    derived_exponents,
    fit_series,
    nu_estimate,
    reference_series,
    theta_estimate,
)
from .doubling import (
    finalize_from_checkpoints,
    run_combine,
    run_doubling,
    run_doubling_part,
)
from .errors import SawError
from .seriesio import append_row
from .walker import direct_count

DIRECT_CAP = 14
DOUBLE_CAP = 10  # doubled length 20; beyond this desk-scale runs take days


def _workers_env_default() -> int:
    env = os.environ.get("SAW_WORKERS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _add_workers(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--workers",
        type=int,
        default=_workers_env_default(),
        help="worker processes (default: $SAW_WORKERS or 1)",
    )


def _load_table(path: str | None) -> SeriesTable:
    return SeriesTable.from_csv(path) if path else reference_series()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sawenum",
        description="Exact enumeration of self-avoiding walks on the simple "
        "cubic lattice, with length doubling and series analysis.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("direct", help="direct enumeration of Z_N and P_N")
    p.add_argument("--n", type=int, required=True, help="walk length")
    _add_workers(p)
    p.add_argument("--series", help="append the result row to this series CSV")
    p.add_argument("--json", action="store_true", help="print JSON instead of CSV row")
    p.add_argument("--force", action="store_true", help="override the runtime safety cap")

    p = sub.add_parser("double", help="length-doubling run: Z_2N and P_2N from length-N statistics")
    p.add_argument("--n", type=int, required=True, help="half length (output is for 2N)")
    _add_workers(p)
    p.add_argument("--symmetry", action=argparse.BooleanOptionalAction, default=False,
                   help="reduce subsets by the 48 cubic symmetries (saves memory, costs time)")
    p.add_argument("--split", choices=("auto", "none", "max-site", "subset-size"),
                   default="auto", help="partitioning strategy for the subset universe")
    p.add_argument("--parts", type=int, default=None, help="number of partitions")
    p.add_argument("--part", type=int, default=None,
                   help="accumulate only this partition and write a checkpoint")
    p.add_argument("--merge", action="store_true",
                   help="combine previously written checkpoints and finalize")
    p.add_argument("--checkpoint-dir", help="directory for checkpoint files")
    p.add_argument("--engine", choices=("kernel", "reference"), default="kernel")
    p.add_argument("--series", help="append the result row to this series CSV")
    p.add_argument("--json", action="store_true")
    p.add_argument("--force", action="store_true", help="override the runtime safety cap")

    p = sub.add_parser("combine", help="experimental unequal-length combination: Z_{M+N}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_workers(p)
    p.add_argument("--symmetry", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--engine", choices=("kernel", "reference"), default="kernel")
    p.add_argument("--validate", action=argparse.BooleanOptionalAction, default=None,
                   help="check against direct enumeration (default: auto for small totals)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("analyze", help="finite-size exponent estimators on a series table")
    p.add_argument("--estimator", choices=("theta", "nu"), required=True)
    p.add_argument("--at", type=int, default=None, help="evaluate at a single N (default: sweep)")
    p.add_argument("--series", help="series CSV (default: bundled reference table)")

    p = sub.add_parser("fit", help="asymptotic fit of the series tail")
    p.add_argument("--target", choices=("z", "p", "both"), default="z")
    p.add_argument("--range", dest="n_range", default="18:36", help="fit window LO:HI")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--series", help="series CSV (default: bundled reference table)")
    return ap


def _cmd_direct(args) -> int:
    if args.n < 1:
        raise SawError("--n must be >= 1")
    if args.n > DIRECT_CAP and not args.force:
        raise SawError(
            f"direct enumeration at n={args.n} exceeds the safety cap of {DIRECT_CAP} "
            "(multi-hour run); pass --force to proceed"
        )
    r = direct_count(args.n, workers=args.workers)
    if args.json:
        print(json.dumps({"n": r.n, "z": str(r.z), "p": str(r.p)},
                         sort_keys=True, separators=(",", ":")))
    else:
        print(f"{r.n},{r.z},{r.p}")
    if args.series:
        append_row(args.series, r.n, r.z, r.p)
    return 0


def _cmd_double(args) -> int:
    if args.merge:
        if not args.checkpoint_dir:
            raise SawError("--merge requires --checkpoint-dir")
        result = finalize_from_checkpoints(
            args.checkpoint_dir, expect_n=args.n, workers=args.workers
        )
    elif args.part is not None:
        if not args.checkpoint_dir:
            raise SawError("--part requires --checkpoint-dir")
        if args.parts is None:
            raise SawError("--part requires --parts")
        if args.split in ("auto", "none"):
            raise SawError("--part requires an explicit --split of max-site or subset-size")
        if args.n > DOUBLE_CAP and not args.force:
            raise SawError(
                f"doubling at n={args.n} exceeds the safety cap of {DOUBLE_CAP}; pass --force"
            )
        path = run_doubling_part(
            args.n, args.part, args.parts,
            strategy=args.split, symmetry=args.symmetry,
            workers=args.workers, engine=args.engine,
            checkpoint_dir=args.checkpoint_dir,
        )
        print(path)
        return 0
    else:
        if args.n < 1:
            raise SawError("--n must be >= 1")
        if args.n > DOUBLE_CAP and not args.force:
            raise SawError(
                f"doubling at n={args.n} exceeds the safety cap of {DOUBLE_CAP} "
                "(runs for days at desk scale); pass --force to proceed"
            )
        result = run_doubling(
            args.n, symmetry=args.symmetry, workers=args.workers,
            split=args.split, part_total=args.parts, engine=args.engine,
            checkpoint_dir=args.checkpoint_dir,
        )
    if args.json:
        print(result.canonical_json())
    else:
        print(result.csv_row())
    print(
        f"stats: distinct_subsets={result.stats['distinct_subsets']} "
        f"incidences={result.stats['incidences']} "
        f"wall_time_s={result.stats['wall_time_s']:.3f}",
        file=sys.stderr,
    )
    if args.series:
        append_row(args.series, result.n2, result.z, result.p)
    return 0


def _cmd_combine(args) -> int:
    if args.m < 1 or args.n < 1:
        raise SawError("--m and --n must be >= 1")
    if args.m + args.n > 2 * DOUBLE_CAP:
        raise SawError(f"combined length {args.m + args.n} exceeds desk scale")
    validate = "auto" if args.validate is None else args.validate
    result = run_combine(
        args.m, args.n, symmetry=args.symmetry, workers=args.workers,
        engine=args.engine, validate=validate,
    )
    if args.json:
        print(result.canonical_json())
    else:
        print(f"{result.n_total},{result.z}")
    status = (
        "validated against direct enumeration"
        if result.validated
        else "NOT validated (beyond the oracle range)"
    )
    print(f"combine is experimental; this result was {status}", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    table = _load_table(args.series)
    est = theta_estimate if args.estimator == "theta" else nu_estimate
    if args.at is not None:
        print(f"{args.at},{est(table, args.at):.12g}")
        return 0
    lo, hi = (3, table.n_max - 2) if args.estimator == "theta" else (2, table.n_max - 1)
    for n in range(lo, hi + 1):
        print(f"{n},{est(table, n):.12g}")
    return 0


def _cmd_fit(args) -> int:
    table = _load_table(args.series)
    try:
        lo, hi = (int(v) for v in args.n_range.split(":"))
    except ValueError:
        raise SawError(f"--range must look like LO:HI, got {args.n_range!r}") from None
    if args.target in ("z", "p"):
        fit = fit_series(table, (lo, hi), args.target, seed=args.seed, starts=args.starts)
        payload = {
            "target": args.target,
            "range": [lo, hi],
            "seed": args.seed,
            "params": fit.as_dict(),
        }
    else:
        fz = fit_series(table, (lo, hi), "z", seed=args.seed, starts=args.starts)
        fp = fit_series(table, (lo, hi), "p", seed=args.seed, starts=args.starts)
        nu, gamma_s = derived_exponents(fz, fp)
        payload = {
            "range": [lo, hi],
            "seed": args.seed,
            "z": fz.as_dict(),
            "p": fp.as_dict(),
            "derived": {"nu": nu, "gamma_s": gamma_s},
        }
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    return 0


_HANDLERS = {
    "direct": _cmd_direct,
    "double": _cmd_double,
    "combine": _cmd_combine,
    "analyze": _cmd_analyze,
    "fit": _cmd_fit,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (SawError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
