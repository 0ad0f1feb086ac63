"""Moduli ideals of portrait pairs and their invariants.

Configurations are normalized by q1 = 0, q2 = 1, leaving the variables
q3..qn.  Degenerate configurations (two coordinates equal) are removed by
saturating with every factor q_j - q_i of the discriminant.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from itertools import permutations
from typing import Sequence

from .combinat import Obstruction, PairClass, Portrait, canonical_pair, obstruction
from .gb import Budget, BudgetExceeded, GroebnerBasis, Ideal, degree_zero_dimensional, dimension, saturate_many
from .interp import (
    MODULI_NORMALIZATION,
    conf_ideal,
    coordinate_ring,
    diagonal_factors,
    two_image_ideal,
    _check_partition,
)

__all__ = [
    "ModuliReport",
    "moduli_ideal",
    "analyze_ideal",
    "analyze_pair",
    "analyze_single",
    "two_image_portraits",
    "two_image_analyze",
]


@dataclass
class ModuliReport:
    key: str
    d: int
    obstruction: str | None
    dim: int | None
    degree: int | None
    fingerprint: str | None
    ms: float | None
    status: str = "ok"

    def to_json(self) -> dict:
        return asdict(self)

    def to_line(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "ModuliReport":
        fields = {k: obj.get(k) for k in ("key", "d", "obstruction", "dim", "degree", "fingerprint", "ms")}
        return cls(**fields, status=obj.get("status", "ok"))

    @property
    def timed_out(self) -> bool:
        return self.status == "timeout"


def _normalized_ring(n: int):
    return coordinate_ring(n, tuple(sorted(MODULI_NORMALIZATION)))


def _saturated(n: int, gens, extra_factors=(), budget: Budget | None = None) -> Ideal:
    ring = _normalized_ring(n)
    factors = diagonal_factors(n, MODULI_NORMALIZATION) + list(extra_factors)
    return saturate_many(Ideal(ring, gens), factors, budget)


def moduli_ideal(p: Portrait, q: Portrait | None = None, d: int = 2, exact_degree: bool = False,
                 budget: Budget | None = None) -> Ideal:
    """Saturated ideal of normalized configurations realizing ``p`` (and ``q``) in degree <= d.

    With ``exact_degree`` the leading coefficients B_d of both interpolants
    are also inverted, so only realizations of degree exactly d survive.
    """
    n = p.n
    if n < 3:
        raise ValueError("moduli ideals need n >= 3 (q1, q2 are fixed)")
    if q is not None and q.n != n:
        raise ValueError("portraits must have the same number of points")
    if d < 0:
        raise ValueError("d must be non-negative")
    parts = [conf_ideal(p, d, MODULI_NORMALIZATION)]
    if q is not None:
        parts.append(conf_ideal(q, d, MODULI_NORMALIZATION))
    gens = [g for part in parts for g in part.generators]
    extra = [part.leading_coeff for part in parts] if exact_degree else []
    return _saturated(n, gens, extra, budget)


def analyze_ideal(ideal: Ideal, budget: Budget | None = None) -> tuple[int, int | None, str, GroebnerBasis]:
    gb = ideal.groebner(budget)
    dim = dimension(gb)
    degree = degree_zero_dimensional(gb) if dim == 0 else None
    return dim, degree, gb.fingerprint(), gb


def _unit_fingerprint(n: int) -> str:
    ring = _normalized_ring(n)
    return GroebnerBasis(ring, [ring.one()]).fingerprint()


def _run(key: str, d: int, obs, build, fast: bool, budget_ms: float | None, n: int) -> ModuliReport:
    start = time.perf_counter()
    obs_name = str(obs) if obs is not None else None
    if fast and obs is not None:
        dim, degree, fp, status = -1, None, _unit_fingerprint(n), "ok"
    else:
        budget = Budget(budget_ms)
        try:
            dim, degree, fp, _ = analyze_ideal(build(budget), budget)
            status = "ok"
        except BudgetExceeded:
            dim, degree, fp, status = None, None, None, "timeout"
    ms = round((time.perf_counter() - start) * 1000.0, 3)
    return ModuliReport(key, d, obs_name, dim, degree, fp, ms, status)


def analyze_pair(p: Portrait, q: Portrait, d: int, fast: bool = False, budget_ms: float | None = None,
                 exact_degree: bool = False) -> ModuliReport:
    """Obstruction verdict plus dimension/degree of the pair's moduli space.

    The Groebner analysis always runs unless ``fast`` is set and a
    combinatorial obstruction already certifies emptiness.
    ``budget_ms`` defaults to the PORTRAIT_LAB_BUDGET_MS environment variable.
    """
    key = canonical_pair(p, q).canonical_key
    return _run(
        key, d, obstruction(p, q, d),
        lambda budget: moduli_ideal(p, q, d, exact_degree=exact_degree, budget=budget),
        fast, budget_ms, p.n,
    )


def analyze_class(pair: PairClass, d: int, fast: bool = False, budget_ms: float | None = None) -> ModuliReport:
    """Like ``analyze_pair`` for an already canonical representative."""
    p, q = pair.p, pair.q
    return _run(
        pair.canonical_key, d, obstruction(p, q, d),
        lambda budget: moduli_ideal(p, q, d, budget=budget),
        fast, budget_ms, p.n,
    )


def analyze_single(p: Portrait, d: int, budget_ms: float | None = None) -> ModuliReport:
    """Moduli space of a single portrait."""
    return _run(str(p), d, None, lambda budget: moduli_ideal(p, None, d, budget=budget), False, budget_ms, p.n)


def two_image_portraits(partition: Sequence[Sequence[int]]) -> list[Portrait]:
    """All portraits whose fiber partition is the given two-part partition."""
    a, b, d = _check_partition(partition)
    out = []
    for va, vb in permutations(range(1, 2 * d + 1), 2):
        table = [0] * (2 * d)
        for i in a:
            table[i - 1] = va
        for i in b:
            table[i - 1] = vb
        out.append(Portrait(tuple(table)))
    return out


def _partition_key(partition) -> str:
    a, b, _ = _check_partition(partition)
    return "|".join("{" + ",".join(map(str, part)) + "}" for part in sorted([a, b]))


def two_image_analyze(partition: Sequence[Sequence[int]], budget_ms: float | None = None) -> tuple[ModuliReport, int]:
    """Analyze the space cut out by e_k(q_A) = e_k(q_B); also return the
    number of two-image portraits with this partition."""
    _, _, d = _check_partition(partition)
    n = 2 * d
    gens = two_image_ideal(partition, MODULI_NORMALIZATION)
    report = _run(_partition_key(partition), d, None, lambda budget: _saturated(n, gens, (), budget),
                  False, budget_ms, n)
    return report, len(two_image_portraits(partition))
