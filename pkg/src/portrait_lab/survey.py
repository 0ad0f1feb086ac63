"""Batch surveys over admissible pair classes with JSONL checkpoints.

A survey walks the sorted pair keys of ``pair_keys(n, d)``, analyzes each
class and appends one ``ModuliReport`` line per class to a sink file.  The
file is always written in key order, so an interrupted run can be resumed
and ends up identical to an uninterrupted one (as long as timing is off,
since wall-clock times differ between runs).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import warnings
from collections import Counter
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .combinat import (
    Obstruction,
    PairClass,
    common_coincidence_pairs,
    fiber_partition,
    key_to_pair,
    obstructions,
    pair_keys,
)
from .moduli import ModuliReport, analyze_class

__all__ = [
    "SurveyAggregate",
    "ConditionalReport",
    "run_survey",
    "read_reports",
    "aggregate",
    "obstruction_stats",
    "conditional_dimension_report",
    "left_associate_candidate",
    "sample_keys",
    "shard_keys",
    "format_table",
    "SUPPORTED",
]

log = logging.getLogger(__name__)

SUPPORTED = {(4, 2), (6, 3)}
SAMPLE_SEED = 20240601
OBSTRUCTION_NAMES = tuple(str(o) for o in Obstruction)


def left_associate_candidate(p, q) -> bool:
    """At least two common coincidence pairs and equal fiber partitions."""
    return fiber_partition(p) == fiber_partition(q) and len(common_coincidence_pairs(p, q)) >= 2


@dataclass
class SurveyAggregate:
    dim_histogram: dict[int, int] = field(default_factory=dict)
    degree_histogram: dict[int, int] = field(default_factory=dict)
    obstruction_counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(OBSTRUCTION_NAMES, 0))
    conditional_table: dict[tuple[int, int], int] = field(default_factory=dict)
    timeouts: int = 0
    obstructed_nonempty: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.dim_histogram.values()) + self.timeouts

    def add(self, report: ModuliReport) -> None:
        pair = PairClass.from_key(report.key)
        for ob in obstructions(pair.p, pair.q, report.d):
            self.obstruction_counts[str(ob)] += 1
        if report.timed_out or report.dim is None:
            self.timeouts += 1
            return
        self.dim_histogram[report.dim] = self.dim_histogram.get(report.dim, 0) + 1
        if report.dim == 0:
            self.degree_histogram[report.degree] = self.degree_histogram.get(report.degree, 0) + 1
        if report.obstruction is not None and report.dim != -1:
            self.obstructed_nonempty.append(report.key)
        if left_associate_candidate(pair.p, pair.q):
            cell = (len(pair.p.image()), report.dim)
            self.conditional_table[cell] = self.conditional_table.get(cell, 0) + 1

    @classmethod
    def from_reports(cls, reports: Iterable[ModuliReport]) -> "SurveyAggregate":
        agg = cls()
        for r in reports:
            agg.add(r)
        return agg

    def to_json(self) -> dict:
        return {
            "dim_histogram": {str(k): v for k, v in sorted(self.dim_histogram.items())},
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
            "obstruction_counts": dict(self.obstruction_counts),
            "conditional_table": {f"{m},{dim}": v for (m, dim), v in sorted(self.conditional_table.items())},
            "timeouts": self.timeouts,
            "total": self.total,
        }


# --------------------------------------------------------------------------
# checkpoint I/O


def read_reports(path: str | Path, strict: bool = False) -> list[ModuliReport]:
    """Parse a JSONL sink.  Corrupted lines are reported with their line number and skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                report = ModuliReport.from_json(obj)
                PairClass.from_key(report.key)
            except (ValueError, TypeError, KeyError, AttributeError) as exc:
                msg = f"{path}:{lineno}: skipping corrupted checkpoint line ({exc})"
                if strict:
                    raise ValueError(msg) from exc
                warnings.warn(msg, stacklevel=2)
                log.warning(msg)
                continue
            out.append(report)
    return out


def _key_code(key: str, n: int) -> int:
    pair = PairClass.from_key(key)
    return pair.p.code() * n**n + pair.q.code()


def _work(args) -> str:
    code, n, d, fast, budget_ms, timing = args
    report = analyze_class(key_to_pair(code, n), d, fast=fast, budget_ms=budget_ms)
    if not timing:
        report.ms = None
    return report.to_line()


def _ordered_results(tasks: Sequence[tuple], jobs: int, window: int) -> Iterable[str]:
    """Yield worker results in task order; at most ``window`` tasks are in flight."""
    if jobs <= 1:
        for t in tasks:
            yield _work(t)
        return
    with ProcessPoolExecutor(jobs) as pool:
        pending: dict = {}
        ready: dict[int, str] = {}
        nxt_submit = nxt_emit = 0
        while nxt_emit < len(tasks):
            while nxt_submit < len(tasks) and len(pending) + len(ready) < window:
                pending[pool.submit(_work, tasks[nxt_submit])] = nxt_submit
                nxt_submit += 1
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                ready[pending.pop(fut)] = fut.result()
            while nxt_emit in ready:
                yield ready.pop(nxt_emit)
                nxt_emit += 1


def run_survey(
    n: int,
    d: int,
    sink: str | Path,
    jobs: int = 1,
    resume: bool = False,
    *,
    keys: Sequence[int] | None = None,
    fast: bool = False,
    budget_ms: float | None = None,
    timing: bool = True,
    progress: Callable[[int, int], None] | None = None,
) -> SurveyAggregate:
    """Analyze every class (or the given ``keys``) and stream reports to ``sink``.

    With ``resume`` the classes already present in ``sink`` are kept and
    skipped.  The sink ends up sorted by key code either way.
    """
    if (n, d) not in SUPPORTED:
        warnings.warn(f"(n, d) = ({n}, {d}) is outside the tested survey range", stacklevel=2)
    codes = [int(c) for c in (pair_keys(n, d) if keys is None else keys)]
    codes.sort()
    sink = Path(sink)
    done: dict[int, str] = {}
    if resume and sink.exists():
        wanted = set(codes)
        for r in read_reports(sink):
            code = _key_code(r.key, n)
            if code in wanted:
                done[code] = r.to_line()
    todo = [c for c in codes if c not in done]
    # keep the prefix that is already in order, append the rest
    kept = sorted(done)
    first_todo = todo[0] if todo else None
    in_order = [c for c in kept if first_todo is None or c < first_todo]
    later = [c for c in kept if first_todo is not None and c > first_todo]
    sink.parent.mkdir(parents=True, exist_ok=True)
    tmp = sink.with_name(sink.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for c in in_order:
            fh.write(done[c] + "\n")
    os.replace(tmp, sink)
    tasks = [(c, n, d, fast, budget_ms, timing) for c in todo]
    with open(sink, "a", encoding="utf-8") as fh:
        for i, line in enumerate(_ordered_results(tasks, jobs, window=max(4 * jobs, 8))):
            fh.write(line + "\n")
            fh.flush()
            if progress is not None:
                progress(i + 1, len(tasks))
    if later:
        lines = {c: done[c] for c in later}
        lines.update({_key_code(r.key, n): r.to_line() for r in read_reports(sink)})
        with open(tmp, "w", encoding="utf-8") as fh:
            for c in sorted(lines):
                fh.write(lines[c] + "\n")
        os.replace(tmp, sink)
    return aggregate(sink)


def aggregate(path: str | Path) -> SurveyAggregate:
    return SurveyAggregate.from_reports(read_reports(path))


# --------------------------------------------------------------------------
# combinatorial statistics


def _obstruction_chunk(args) -> Counter:
    codes, n, d = args
    counts: Counter = Counter()
    for code in codes:
        pair = key_to_pair(int(code), n)
        for ob in obstructions(pair.p, pair.q, d):
            counts[str(ob)] += 1
    return counts


def obstruction_stats(n: int, d: int, jobs: int = 1, keys: Sequence[int] | None = None) -> dict[str, int]:
    """Number of pair classes flagged by each obstruction (a class may count under several)."""
    codes = np.asarray(pair_keys(n, d) if keys is None else keys, dtype=np.int64)
    step = 1 << 14
    chunks = [(codes[i : i + step], n, d) for i in range(0, len(codes), step)]
    total: Counter = Counter(dict.fromkeys(OBSTRUCTION_NAMES, 0))
    if jobs <= 1 or len(chunks) < 2:
        parts = map(_obstruction_chunk, chunks)
    else:
        pool = ProcessPoolExecutor(jobs)
        parts = pool.map(_obstruction_chunk, chunks)
    for part in parts:
        total.update(part)
    if jobs > 1 and len(chunks) >= 2:
        pool.shutdown()
    return {name: total[name] for name in OBSTRUCTION_NAMES}


@dataclass
class ConditionalReport:
    d: int
    table: dict[tuple[int, int], int]

    def expected(self, m: int) -> int:
        return self.d - m + 1

    def agreement(self) -> tuple[int, int]:
        """(classes whose dimension equals d - m + 1, all tabulated classes)."""
        hit = sum(v for (m, dim), v in self.table.items() if dim == self.expected(m))
        return hit, sum(self.table.values())

    def row(self, m: int) -> dict[int, int]:
        return {dim: v for (mm, dim), v in sorted(self.table.items()) if mm == m}


def conditional_dimension_report(source: str | Path | Iterable[ModuliReport] | SurveyAggregate,
                                 d: int | None = None) -> ConditionalReport:
    """Dimension counts by image size for pairs whose realizations must be left associates."""
    if isinstance(source, SurveyAggregate):
        agg = source
        if d is None:
            raise ValueError("d is required when passing an aggregate")
    else:
        reports = read_reports(source) if isinstance(source, (str, Path)) else list(source)
        if not reports:
            raise ValueError("no survey data")
        d = reports[0].d if d is None else d
        agg = SurveyAggregate.from_reports(reports)
    return ConditionalReport(d, dict(agg.conditional_table))


# --------------------------------------------------------------------------
# sampling and tables


def sample_keys(n: int, d: int, fraction: float = 0.01, seed: int = SAMPLE_SEED) -> np.ndarray:
    """A fixed pseudo-random subset of the pair keys, sorted."""
    keys = pair_keys(n, d)
    size = math.ceil(fraction * len(keys))
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(keys, size=size, replace=False))


def shard_keys(n: int, d: int, index: int, count: int, keys: Sequence[int] | None = None) -> np.ndarray:
    """Contiguous block ``index`` (0-based) of ``count`` near-equal blocks of the sorted keys.

    Blocks are ranges of key codes, i.e. of the leading portrait, so each
    shard's sink is itself sorted and the shards concatenate in order.
    """
    if count < 1 or not 0 <= index < count:
        raise ValueError(f"bad shard {index}/{count}")
    keys = np.sort(np.asarray(pair_keys(n, d) if keys is None else keys, dtype=np.int64))
    bounds = np.linspace(0, len(keys), count + 1).round().astype(np.int64)
    return keys[bounds[index] : bounds[index + 1]]


def format_table(agg: SurveyAggregate, table: str, d: int | None = None) -> str:
    """CSV for one of ``dims``, ``degrees``, ``obstructions`` or ``conditional``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table == "dims":
        w.writerow(["dim", "count"])
        w.writerows(sorted(agg.dim_histogram.items()))
    elif table == "degrees":
        w.writerow(["degree", "count"])
        w.writerows(sorted(agg.degree_histogram.items()))
    elif table == "obstructions":
        w.writerow(["obstruction", "count"])
        w.writerows(agg.obstruction_counts.items())
    elif table == "conditional":
        dims = sorted({dim for _, dim in agg.conditional_table} | set(range(-1, (d or 1))))
        w.writerow(["m"] + dims)
        for m in sorted({m for m, _ in agg.conditional_table}):
            w.writerow([m] + [agg.conditional_table.get((m, dim), 0) for dim in dims])
    else:
        raise ValueError(f"unknown table {table!r}")
    return buf.getvalue()
