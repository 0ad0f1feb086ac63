"""Command-line entry point: ``portrait-lab <verb> [flags]``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import census, combinat, moduli, survey
from .combinat import Portrait
from .gb import BudgetExceeded

__all__ = ["main", "build_parser"]


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _portrait(text: str) -> Portrait:
    try:
        return Portrait.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _partition(text: str) -> list[list[int]]:
    try:
        parts = [[int(x) for x in part.split(",") if x.strip()] for part in text.split("|")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad partition {text!r}; expected e.g. 1,2|3,4") from exc
    return parts


def _shard(text: str) -> tuple[int, int]:
    try:
        index, count = (int(x) for x in text.split("/"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad shard {text!r}; expected I/K, e.g. 0/8") from exc
    if count < 1 or not 0 <= index < count:
        raise argparse.ArgumentTypeError(f"shard index must satisfy 0 <= I < K, got {text!r}")
    return index, count


def _jobs(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return value


# --------------------------------------------------------------------------
# verbs


def cmd_admissible(args) -> str:
    p, d = args.p, args.d
    if d < 0:
        raise ValueError("d must be non-negative")
    ok = combinat.low_degree_admissible(p, d) if d < 2 else combinat.is_admissible(p, d)
    if args.json:
        cycles = {str(k): v for k, v in sorted(combinat.cycle_census(p).items())}
        return _dump({"portrait": str(p), "d": d, "admissible": ok, "cycles": cycles})
    return "true" if ok else "false"


def cmd_ideal(args) -> str:
    ideal = moduli.moduli_ideal(args.p, args.q, args.d, exact_degree=args.exact_degree)
    gb = ideal.groebner()
    dim = moduli.dimension(gb)
    if args.json:
        return _dump({"ring": list(gb.ring.names), "basis": gb.lines(), "dim": dim,
                      "fingerprint": gb.fingerprint()})
    return "\n".join(gb.lines())


def cmd_analyze(args) -> str:
    report = moduli.analyze_pair(args.p, args.q, args.d, fast=args.fast, exact_degree=args.exact_degree)
    if args.json:
        return report.to_line()
    lines = [f"key          {report.key}", f"obstruction  {report.obstruction or 'none'}"]
    if report.timed_out:
        lines.append("status       timeout")
    else:
        lines.append(f"dim          {report.dim}")
        if report.degree is not None:
            lines.append(f"degree       {report.degree}")
        lines.append(f"fingerprint  {report.fingerprint}")
    return "\n".join(lines)


def cmd_pairs(args) -> str:
    keys = combinat.pair_keys(args.n, args.d, include_diagonal=args.include_diagonal)
    if args.count:
        return _dump({"n": args.n, "d": args.d, "count": int(len(keys))}) if args.json else str(len(keys))
    pairs = [combinat.key_to_pair(k, args.n).key for k in keys]
    if args.json:
        return _dump({"n": args.n, "d": args.d, "pairs": pairs})
    return "\n".join(pairs)


def cmd_survey(args) -> str:
    if args.action == "aggregate":
        if not args.file:
            raise _Usage("survey aggregate needs a JSONL file")
        agg = survey.aggregate(args.file)
        if args.json:
            return _dump(agg.to_json())
        d = args.d
        if d is None:
            reports = survey.read_reports(args.file)
            d = reports[0].d if reports else None
        return survey.format_table(agg, args.table, d).rstrip("\n")
    if args.n is None or args.d is None or args.out is None:
        raise _Usage("survey needs --n, --d and --out")
    keys = survey.sample_keys(args.n, args.d, args.sample) if args.sample else None
    if args.shard is not None:
        keys = survey.shard_keys(args.n, args.d, *args.shard, keys=keys)
    agg = survey.run_survey(args.n, args.d, args.out, jobs=args.jobs, resume=args.resume, keys=keys,
                            fast=args.fast, timing=not args.no_timing)
    if args.json:
        return _dump(agg.to_json())
    return survey.format_table(agg, "dims").rstrip("\n")


def cmd_obstructions(args) -> str:
    if args.p is not None or args.q is not None:
        if args.p is None or args.q is None or args.d is None:
            raise _Usage("a single-pair query needs --p, --q and --d")
        found = [str(o) for o in combinat.obstructions(args.p, args.q, args.d)]
        return _dump({"obstructions": found}) if args.json else (", ".join(found) or "none")
    if args.n is None or args.d is None:
        raise _Usage("obstructions needs --n and --d (or --p, --q and --d)")
    stats = survey.obstruction_stats(args.n, args.d, jobs=args.jobs)
    if args.json:
        return _dump(stats)
    return "\n".join(f"{k}\t{v}" for k, v in stats.items())


def cmd_census(args) -> str:
    if (args.n is None) == (args.config is None):
        raise _Usage("census needs exactly one of --n and --config")
    config = census.Config.roots_of_unity(args.n) if args.n is not None else census.load_config(args.config)
    hist = census.endo_histogram(config, jobs=args.jobs)
    if args.d is not None:
        if not 0 <= args.d < config.n:
            raise ValueError("need 0 <= d < n")
        count = hist.counts[args.d]
        return _dump({"n": config.n, "d": args.d, "count": count}) if args.json else str(count)
    if args.json:
        return _dump(hist.to_json())
    return " ".join(map(str, hist.counts))


def cmd_two_image(args) -> str:
    report, count = moduli.two_image_analyze(args.partition)
    if args.json:
        return _dump({**report.to_json(), "portraits": count})
    return f"dim {report.dim}\nportraits {count}"


# --------------------------------------------------------------------------
# parser


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="portrait-lab", description="Portrait pairs and their moduli spaces.")
    sub = parser.add_subparsers(dest="verb", metavar="verb", required=True)
    cpus = os.cpu_count() or 1

    def verb(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(fn=fn)
        return sp

    sp = verb("admissible", cmd_admissible, "Is a portrait admissible in degree d?")
    sp.add_argument("--p", type=_portrait, required=True, help="portrait, e.g. 1,1,2,4")
    sp.add_argument("--d", type=int, required=True)

    sp = verb("ideal", cmd_ideal, "Print the reduced saturated moduli basis.")
    sp.add_argument("--p", type=_portrait, required=True)
    sp.add_argument("--q", type=_portrait)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--exact-degree", action="store_true", help="also invert the degree-d coefficients")

    sp = verb("analyze", cmd_analyze, "Obstructions, dimension and degree of a portrait pair.")
    sp.add_argument("--p", type=_portrait, required=True)
    sp.add_argument("--q", type=_portrait, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--fast", action="store_true", help="skip the Groebner run for obstructed pairs")
    sp.add_argument("--exact-degree", action="store_true")

    sp = verb("pairs", cmd_pairs, "Enumerate admissible pair classes.")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--count", action="store_true", help="print only the number of classes")
    sp.add_argument("--include-diagonal", action="store_true", help="also count classes with P = Q")

    sp = verb("survey", cmd_survey, "Run a survey, or aggregate a finished one.")
    sp.add_argument("action", nargs="?", choices=["run", "aggregate"], default="run")
    sp.add_argument("file", nargs="?", help="JSONL file for 'aggregate'")
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--out", help="JSONL sink")
    sp.add_argument("--jobs", type=_jobs, default=cpus)
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--fast", action="store_true")
    sp.add_argument("--sample", type=float, help="analyze only this fraction of classes (fixed seed)")
    sp.add_argument("--shard", type=_shard, help="run only contiguous block I of K (0-based), e.g. 0/8")
    sp.add_argument("--no-timing", action="store_true", help="write null timings for reproducible files")
    sp.add_argument("--table", choices=["dims", "degrees", "obstructions", "conditional"], default="dims")

    sp = verb("obstructions", cmd_obstructions, "Combinatorial obstruction counts, or the flags of one pair.")
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--p", type=_portrait)
    sp.add_argument("--q", type=_portrait)
    sp.add_argument("--jobs", type=_jobs, default=cpus)

    sp = verb("census", cmd_census, "Degree histogram of all self-maps of a configuration.")
    sp.add_argument("--n", type=int, help="use the n-th roots of unity")
    sp.add_argument("--config", help="JSON file with conductor and point coefficient vectors")
    sp.add_argument("--d", type=int, help="print only the number of degree-d maps")
    sp.add_argument("--jobs", type=_jobs, default=cpus)

    sp = verb("two-image", cmd_two_image, "Moduli of two-image portraits with a given fiber partition.")
    sp.add_argument("--partition", type=_partition, required=True, help="e.g. 1,2|3,4")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.fn(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"portrait-lab: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, BudgetExceeded) as exc:
        print(f"portrait-lab: {exc}", file=sys.stderr)
        return 1
    if out:
        print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
