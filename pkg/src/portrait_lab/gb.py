"""Groebner bases over Q: Buchberger with the Gebauer-Moeller criteria,
normal forms, saturation by the added-variable method, Krull dimension and
the degree of zero-dimensional ideals.

Polynomials are handled internally as ``{packed monomial: mpq}`` dicts (see
``poly``); basis elements are kept monic.
"""

from __future__ import annotations

import hashlib
import os
import time
from heapq import heapify, heappop, heappush
from itertools import combinations
from typing import Iterable, Sequence

from .exact import ONE, ZERO
from .poly import MultiPoly, Ring

__all__ = [
    "BudgetExceeded",
    "Budget",
    "Ideal",
    "GroebnerBasis",
    "buchberger",
    "normal_form",
    "s_polynomial",
    "saturate",
    "saturate_many",
    "dimension",
    "degree_zero_dimensional",
]

BUDGET_ENV = "PORTRAIT_LAB_BUDGET_MS"


class BudgetExceeded(RuntimeError):
    """A Groebner computation ran past its time budget."""


class Budget:
    """Wall-clock deadline shared by the Groebner runs of one analysis."""

    __slots__ = ("deadline",)

    def __init__(self, ms: float | None = None):
        if ms is None:
            raw = os.environ.get(BUDGET_ENV, "").strip()
            ms = float(raw) if raw else None
        self.deadline = None if ms is None or ms <= 0 else time.perf_counter() + ms / 1000.0

    def check(self) -> None:
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise BudgetExceeded("Groebner budget exceeded")


_NO_BUDGET = Budget(0)


# --------------------------------------------------------------------------
# dict-level kernels


def _reduce(work: dict, reducers: Sequence, guard: int, budget: Budget) -> dict:
    """Fully reduce ``work`` (consumed) by monic ``reducers`` = [(lm, tail_items)]."""
    heap = [-m for m in work]
    heapify(heap)
    out = {}
    while heap:
        m = -heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        for lm, tail in reducers:
            if lm <= m and not ((m - lm) & guard):
                shift = m - lm
                for mt, ct in tail:
                    key = mt + shift
                    v = work.get(key)
                    if v is None:
                        work[key] = -c * ct
                        heappush(heap, -key)
                    else:
                        v -= c * ct
                        if v:
                            work[key] = v
                        else:
                            del work[key]
                # one step can be slow once coefficients blow up, so check every time
                budget.check()
                break
        else:
            out[m] = c
    return out


def _monic(terms: dict) -> dict:
    lm = max(terms)
    inv = ONE / terms[lm]
    if inv == 1:
        return terms
    return {m: c * inv for m, c in terms.items()}


def _tail(terms: dict, lm: int) -> list:
    return [(m, c) for m, c in terms.items() if m != lm]


class _Elem:
    __slots__ = ("lm", "exps", "terms", "tail", "deg")

    def __init__(self, ring: Ring, terms: dict):
        self.terms = terms
        self.lm = max(terms)
        self.exps = ring.unpack(self.lm)
        self.tail = _tail(terms, self.lm)
        self.deg = sum(self.exps)


def _lcm_exps(a: tuple, b: tuple) -> tuple:
    return tuple(x if x >= y else y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _spoly(ring: Ring, f: _Elem, g: _Elem, lcm: int) -> dict:
    sf, sg = lcm - f.lm, lcm - g.lm
    work = {m + sf: c for m, c in f.tail}
    for m, c in g.tail:
        key = m + sg
        v = work.get(key)
        if v is None:
            work[key] = -c
        else:
            v -= c
            if v:
                work[key] = v
            else:
                del work[key]
    return work


def _buchberger_dicts(ring: Ring, polys: Iterable[dict], budget: Budget) -> list[dict]:
    """Reduced Groebner basis (list of monic dicts, ascending leading monomial)."""
    guard = ring.guard
    pack = ring.pack
    elems: list[_Elem] = []
    active: list[int] = []
    pairs: list[tuple] = []

    def reducers():
        return [(elems[k].lm, elems[k].tail) for k in active]

    def add(terms: dict) -> bool:
        """Insert a reduced nonzero element; True if it is a unit."""
        nonlocal active, pairs
        terms = _monic(terms)
        h = len(elems)
        e = _Elem(ring, terms)
        elems.append(e)
        if e.lm == 0:
            return True
        # Gebauer-Moeller update
        cand = []
        for k in active:
            ex = _lcm_exps(e.exps, elems[k].exps)
            cand.append((k, pack(ex), ex))
        kept = []
        while cand:
            k, l1, ex1 = cand.pop()
            if _coprime(e.exps, elems[k].exps):
                kept.append((k, l1, ex1, True))
                continue
            dominated = False
            for _, l2, _ in cand:
                if not ((l1 - l2) & guard) and l2 <= l1:
                    dominated = True
                    break
            if not dominated:
                for _, l2, _, _ in kept:
                    if not ((l1 - l2) & guard) and l2 <= l1:
                        dominated = True
                        break
            if not dominated:
                kept.append((k, l1, ex1, False))
        new_pairs = []
        for i, j, deg, lcm in ((a, b, d, l) for d, l, a, b in pairs):
            if (
                e.lm <= lcm
                and not ((lcm - e.lm) & guard)
                and pack(_lcm_exps(elems[i].exps, e.exps)) != lcm
                and pack(_lcm_exps(elems[j].exps, e.exps)) != lcm
            ):
                continue
            new_pairs.append((deg, lcm, i, j))
        for k, l1, ex1, cop in kept:
            if not cop:
                new_pairs.append((sum(ex1), l1, k, h))
        heapify(new_pairs)
        pairs = new_pairs
        active = [k for k in active if not (elems[k].lm >= e.lm and not ((elems[k].lm - e.lm) & guard))]
        active.append(h)
        return False

    start = sorted((p for p in polys if p), key=max)
    for terms in start:
        budget.check()
        r = _reduce(dict(terms), reducers(), guard, budget)
        if r and add(r):
            return [{0: ONE}]

    while pairs:
        budget.check()
        _, lcm, i, j = heappop(pairs)
        s = _spoly(ring, elems[i], elems[j], lcm)
        if not s:
            continue
        r = _reduce(s, reducers(), guard, budget)
        if r and add(r):
            return [{0: ONE}]

    # minimalize then inter-reduce
    basis = [elems[k] for k in active]
    basis.sort(key=lambda e: e.lm)
    minimal = []
    for e in basis:
        if not any(not ((e.lm - o.lm) & guard) and o.lm <= e.lm for o in minimal):
            minimal.append(e)
    result = []
    for idx, e in enumerate(minimal):
        others = [(o.lm, o.tail) for k, o in enumerate(minimal) if k != idx]
        tail = _reduce(dict(e.tail), others, guard, budget)
        tail[e.lm] = ONE
        result.append(tail)
    result.sort(key=max)
    return result


# --------------------------------------------------------------------------
# public types


class Ideal:
    """Generators in a fixed ring; zero generators are dropped and the rest
    scaled to primitive integer form."""

    def __init__(self, ring: Ring, generators: Iterable[MultiPoly] = ()):
        self.ring = ring
        gens = []
        seen = set()
        for g in generators:
            if not isinstance(g, MultiPoly):
                g = ring.const(g)
            if g.ring != ring:
                raise ValueError(f"generator ring {g.ring} differs from ideal ring {ring}")
            if g.is_zero():
                continue
            g = g.primitive()
            key = frozenset(g.terms.items())
            if key not in seen:
                seen.add(key)
                gens.append(g)
        self.generators = tuple(gens)
        self._gb: GroebnerBasis | None = None

    def groebner(self, budget: Budget | None = None) -> "GroebnerBasis":
        if self._gb is None:
            self._gb = buchberger(self, budget=budget)
        return self._gb

    def __repr__(self):
        return f"Ideal({self.ring}, [{', '.join(map(str, self.generators))}])"


class GroebnerBasis:
    """Reduced Groebner basis with monic elements sorted by leading monomial."""

    def __init__(self, ring: Ring, basis: Sequence[MultiPoly]):
        self.ring = ring
        self.basis = tuple(basis)

    @property
    def order(self):
        return self.ring.order

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def is_zero(self) -> bool:
        return not self.basis

    def leading_exponents(self) -> list[tuple[int, ...]]:
        return [g.leading_exponents() for g in self.basis]

    def reduce(self, f: MultiPoly) -> MultiPoly:
        return normal_form(f, self)

    def contains(self, f: MultiPoly) -> bool:
        return normal_form(f, self).is_zero()

    def ideal(self) -> Ideal:
        ideal = Ideal(self.ring, self.basis)
        ideal._gb = self
        return ideal

    def dimension(self) -> int:
        return dimension(self)

    def degree(self) -> int:
        return degree_zero_dimensional(self)

    def lines(self) -> list[str]:
        return [str(g) for g in self.basis]

    def fingerprint(self) -> str:
        """Short stable hash of the ring and the reduced basis."""
        payload = "|".join(self.ring.names) + f"|{self.ring.order}\n" + "\n".join(self.lines())
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, GroebnerBasis) and self.ring == other.ring and self.basis == other.basis

    def __hash__(self):
        return hash((self.ring, self.basis))

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(self.lines())}])"


def buchberger(ideal: Ideal, order=None, budget: Budget | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of ``ideal`` (in ``order`` if given, else the ring's own)."""
    ring = ideal.ring
    gens = ideal.generators
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        gens = [g.to_ring(ring) for g in gens]
    if ring.nvars < 1:
        raise ValueError("ring needs at least one variable")
    budget = budget or _NO_BUDGET
    dicts = _buchberger_dicts(ring, [g.terms for g in gens], budget)
    return GroebnerBasis(ring, [MultiPoly(ring, d) for d in dicts])


def normal_form(f: MultiPoly, g: GroebnerBasis) -> MultiPoly:
    ring = g.ring
    if f.ring != ring:
        f = f.to_ring(ring)
    reducers = [(b.lm(), _tail(b.terms, b.lm())) for b in (x.monic() for x in g.basis)]
    return MultiPoly(ring, _reduce(dict(f.terms), reducers, ring.guard, _NO_BUDGET))


def s_polynomial(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    ring = f.ring
    ef, eg = _Elem(ring, _monic(f.terms)), _Elem(ring, _monic(g.terms))
    lcm = ring.pack(_lcm_exps(ef.exps, eg.exps))
    return MultiPoly(ring, _spoly(ring, ef, eg, lcm))


def _saturate_gb(gb_dicts: list[dict], ring: Ring, f: MultiPoly, budget: Budget) -> list[dict]:
    """t-free part of a block-order basis of I + (t*f - 1), as dicts in ``ring``."""
    names = ("_t",) + ring.names
    big = Ring(names, ("elim", 1))
    t_unit = big.units[0]
    shift = [big.units[i + 1] for i in range(ring.nvars)]

    def lift(terms: dict) -> dict:
        out = {}
        for m, c in terms.items():
            key = 0
            for e, u in zip(ring.unpack(m), shift):
                if e:
                    key += e * u
            out[key] = c
        return out

    polys = [lift(p) for p in gb_dicts]
    tf = {m + t_unit: c for m, c in lift(f.terms).items()}
    tf[0] = tf.get(0, ZERO) - ONE
    polys.append(tf)
    result = _buchberger_dicts(big, polys, budget)
    out = []
    for terms in result:
        lm_exps = big.unpack(max(terms))
        if lm_exps[0]:
            continue
        back = {}
        for m, c in terms.items():
            back[ring.pack(big.unpack(m)[1:])] = c
        out.append(back)
    return out


def saturate(ideal: Ideal, f: MultiPoly, budget: Budget | None = None) -> Ideal:
    """(I : f^inf) by adjoining t and eliminating it from I + (t*f - 1)."""
    return saturate_many(ideal, [f], budget)


def saturate_many(ideal: Ideal, factors: Iterable[MultiPoly], budget: Budget | None = None) -> Ideal:
    """Saturate successively by each factor; the result carries its reduced degrevlex basis."""
    budget = budget or _NO_BUDGET
    ring = ideal.ring
    work_ring = ring if ring.order == "degrevlex" else ring.with_order("degrevlex")
    gens = [g.to_ring(work_ring).terms for g in ideal.generators]
    current = _buchberger_dicts(work_ring, gens, budget)
    for f in factors:
        if f.is_zero():
            raise ValueError("cannot saturate by the zero polynomial")
        if current == [{0: ONE}] or not current:
            break
        if f.is_constant():
            continue
        current = _saturate_gb(current, work_ring, f.to_ring(work_ring), budget)
    basis = GroebnerBasis(work_ring, [MultiPoly(work_ring, d) for d in current])
    if work_ring is ring:
        return basis.ideal()
    return Ideal(ring, [b.to_ring(ring) for b in basis.basis])


def dimension(g: GroebnerBasis) -> int:
    """Krull dimension from the leading-term ideal; -1 for the unit ideal."""
    if g.is_unit():
        return -1
    n = g.ring.nvars
    supports = [frozenset(i for i, e in enumerate(ex) if e) for ex in g.leading_exponents()]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0  # pragma: no cover - the empty set is always independent


def degree_zero_dimensional(g: GroebnerBasis) -> int:
    """Number of standard monomials of a zero-dimensional ideal."""
    if dimension(g) != 0:
        raise ValueError("degree_zero_dimensional requires a zero-dimensional ideal")
    n = g.ring.nvars
    lead = g.leading_exponents()
    bounds = [0] * n
    for ex in lead:
        support = [i for i, e in enumerate(ex) if e]
        if len(support) == 1:
            i = support[0]
            if not bounds[i] or ex[i] < bounds[i]:
                bounds[i] = ex[i]

    def standard(ex) -> bool:
        return not any(all(a >= b for a, b in zip(ex, le)) for le in lead)

    count = 0
    stack = [(0, ())]
    while stack:
        i, prefix = stack.pop()
        if i == n:
            count += 1
            continue
        for e in range(bounds[i]):
            ex = prefix + (e,)
            # prune: a prefix padded with zeros that is already non-standard stays so
            if standard(ex + (0,) * (n - i - 1)):
                stack.append((i + 1, ex))
            else:
                break
    return count
