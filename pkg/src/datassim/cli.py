"""Command-line interface.

Exit codes: 0 success / pass, 1 threshold fail, 2 usage or data error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .calibrate import DEFAULT_T_REF, find_threshold
from .core import GridField2D, SimilarityOptions, Variant
from .io import (
    dumps_json,
    format_5sig,
    read_grid,
    read_manifest,
    read_pairs_csv,
    report_to_dict,
    write_f2d,
    write_report_json,
)
from .pipeline import score
from .testgen import Case, base_field, perturb_case, precision_codec

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _add_similarity_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", default="dssim", choices=[v.value for v in Variant])
    p.add_argument("--k1", type=float, default=None)
    p.add_argument("--k2", type=float, default=None)
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--kernel", type=int, default=11, help="odd window width")
    p.add_argument("--sigma", type=float, default=1.5)
    p.add_argument("--allow-zero-constants", action="store_true")


def _options(args) -> SimilarityOptions:
    try:
        return SimilarityOptions(
            variant=args.variant, k1=args.k1, k2=args.k2, kernel_size=args.kernel,
            sigma=args.sigma, bins=args.bins, allow_zero_constants=args.allow_zero_constants,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(path, flag):
    try:
        return read_grid(path)
    except FileNotFoundError:
        raise UsageError(f"{flag}: no such file: {path}") from None
    except (OSError, ValueError) as exc:
        raise UsageError(f"{flag}: {exc}") from None


def cmd_compare(args) -> int:
    opts = _options(args)
    a = _load(args.a, "--a")
    b = _load(args.b, "--b")
    rep = score(a, b, opts, with_map=args.map_out is not None)
    if args.map_out:
        write_f2d(rep.map, args.map_out)

    doc = report_to_dict(rep)
    passed = None
    if args.threshold is not None:
        passed = rep.mean_value >= args.threshold
        doc["threshold"] = args.threshold
        doc["pass"] = bool(passed)

    if args.json:
        write_report_json(doc, args.json)
    if args.json != "-":
        print(f"{opts.variant.value} {format_5sig(rep.mean_value)}")
        print(f"windows total={rep.windows_total} border_excluded={rep.windows_border_excluded} "
              f"missing_excluded={rep.windows_missing_excluded}")
        if passed is not None:
            print(f"{'PASS' if passed else 'FAIL'} (threshold {args.threshold})")
    if passed is False:
        return EXIT_FAIL
    return EXIT_OK


def _score_entry(entry, opts, threshold):
    try:
        rep = score(read_grid(entry.path_original), read_grid(entry.path_comparison), opts)
    except (OSError, ValueError) as exc:
        return {"id": entry.id, "status": "error", "error": str(exc)}, None
    doc = report_to_dict(rep, id=entry.id, tags=dict(entry.tags))
    row = {"id": entry.id, "mean_value": doc["mean_value"], "mean_5sig": doc["mean_5sig"]}
    if threshold is None:
        row["status"] = "scored"
    else:
        row["status"] = "pass" if rep.mean_value >= threshold else "fail"
        doc["pass"] = row["status"] == "pass"
    return row, doc


def cmd_batch(args) -> int:
    opts = _options(args)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        entries = read_manifest(args.manifest)
    except FileNotFoundError:
        raise UsageError(f"--manifest: no such file: {args.manifest}") from None
    except ValueError as exc:
        raise UsageError(f"--manifest: {exc}") from None

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda e: _score_entry(e, opts, args.threshold), entries))
    results.sort(key=lambda r: r[0]["id"])

    rows = [r for r, _ in results]
    counts = {s: sum(r["status"] == s for r in rows) for s in ("pass", "fail", "scored", "error")}
    summary = {
        "variant": opts.variant.value,
        "threshold": args.threshold,
        "counts": counts,
        "entries": rows,
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for _, doc in results:
            if doc is not None:
                write_report_json(doc, os.path.join(args.out, f"{doc['id']}.json"))
        write_report_json(summary, os.path.join(args.out, "summary.json"))
    sys.stdout.write(dumps_json(summary))

    if counts["error"]:
        return EXIT_ERROR
    return EXIT_FAIL if counts["fail"] else EXIT_OK


def cmd_calibrate(args) -> int:
    try:
        pairs = read_pairs_csv(args.pairs)
    except FileNotFoundError:
        raise UsageError(f"--pairs: no such file: {args.pairs}") from None
    except ValueError as exc:
        raise UsageError(f"--pairs: {exc}") from None
    result = find_threshold(pairs, args.t_ref, args.pass_fail_weight)
    m = result.matrix

    if args.sweep_out:
        with open(args.sweep_out, "w") as fh:
            fh.write("threshold,inconsistent\n")
            for t, n in result.sweep:
                fh.write(f"{t!r},{n}\n")
    if args.json:
        write_report_json({
            "threshold": result.threshold,
            "threshold_5sig": format_5sig(result.threshold),
            "t_ref": args.t_ref,
            "n_pairs": m.total,
            "inconsistent": m.inconsistent,
            "matrix": {"pass_pass": m.pass_pass, "pass_fail": m.pass_fail,
                       "fail_pass": m.fail_pass, "fail_fail": m.fail_fail},
        }, args.json)
    if args.json != "-":
        print(f"threshold {format_5sig(result.threshold)}")
        print(f"inconsistent {m.inconsistent} of {m.total}")
        print("                 ref pass  ref fail")
        print(f"dssim pass  {m.pass_pass:>12d}{m.pass_fail:>10d}")
        print(f"dssim fail  {m.fail_pass:>12d}{m.fail_fail:>10d}")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        field = base_field(args.rows, args.cols, args.seed)
        if args.case != "base":
            field = perturb_case(field, Case.parse(args.case), args.seed, args.pert_lo, args.pert_hi)
        if args.codec_p is not None:
            result = precision_codec(field, args.codec_p)
            field = result.reconstructed
            print(f"nominal_cr {result.nominal_cr}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.dtype == "f32":
        field = GridField2D(field.values.astype("float32"))
    write_f2d(field, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    opts = SimilarityOptions(variant=args.variant)
    try:
        x = base_field(args.rows, args.cols, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    y = precision_codec(x, 12).reconstructed
    times = []
    value = None
    for _ in range(args.reps):
        t0 = time.perf_counter()
        value = score(x, y, opts).mean_value
        times.append(time.perf_counter() - t0)
    best = min(times)
    doc = {
        "rows": args.rows,
        "cols": args.cols,
        "variant": opts.variant.value,
        "reps": args.reps,
        "times_s": times,
        "min_time_s": best,
        "points_per_s": args.rows * args.cols / best,
        "mean_value": value,
    }
    if args.json:
        write_report_json(doc, args.json)
    if args.json != "-":
        print(f"{args.rows}x{args.cols} {opts.variant.value}: min {best:.4f} s over {args.reps} runs, "
              f"{doc['points_per_s']:.3e} points/s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="datassim", description="Structural similarity for floating-point grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="score one pair of grids")
    p.add_argument("--a", required=True, help="original grid (.f2d or .csv)")
    p.add_argument("--b", required=True, help="comparison grid (.f2d or .csv)")
    _add_similarity_flags(p)
    p.add_argument("--map-out", help="write the per-window map as F2D")
    p.add_argument("--json", help="write the JSON report to PATH, or - for stdout")
    p.add_argument("--threshold", type=float, help="exit 1 when the score is below this")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("batch", help="score every pair in a manifest")
    p.add_argument("--manifest", required=True)
    _add_similarity_flags(p)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", help="directory for per-entry reports and summary.json")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("calibrate", help="choose a DSSIM threshold from (ref, dssim) pairs")
    p.add_argument("--pairs", required=True, help="CSV with ref,dssim columns")
    p.add_argument("--t-ref", type=float, default=DEFAULT_T_REF)
    p.add_argument("--pass-fail-weight", type=float, default=1.0,
                   help="cost of a DSSIM pass the reference fails, relative to the opposite error")
    p.add_argument("--sweep-out", help="write threshold,inconsistent CSV")
    p.add_argument("--json")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("gen", help="write a synthetic test field")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--case", default="base", choices=["base"] + [c.value for c in Case])
    p.add_argument("--pert-lo", type=float, default=1.0e-7)
    p.add_argument("--pert-hi", type=float, default=0.1)
    p.add_argument("--codec-p", type=int)
    p.add_argument("--dtype", choices=["f32", "f64"], default="f64")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time scoring on a synthetic pair")
    p.add_argument("--rows", type=int, default=192)
    p.add_argument("--cols", type=int, default=288)
    p.add_argument("--variant", default="dssim", choices=[v.value for v in Variant])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"datassim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
