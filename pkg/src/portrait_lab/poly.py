"""Sparse multivariate polynomials over Q.

A monomial is packed into a single Python int with two parts::

    [ weight row 0 | weight row 1 | ... ][ e_{n-1} | ... | e_1 | e_0 ]
     <------- order key (high) ------->  <---- exponents (low) ---->

Every supported monomial order is given by a matrix of non-negative integer
weight rows, so both parts are linear in the exponent vector.  Monomial
multiplication is then integer addition and comparing packed ints compares
monomials in the ring's order.  Each field is ``FIELD`` bits wide; the top bit
of every exponent field is a guard bit used for divisibility tests.
"""

from __future__ import annotations

import re
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exact import ONE, ZERO, Rational, format_rational, rational

FIELD = 16
_MASK = (1 << FIELD) - 1
MAX_EXPONENT = (1 << (FIELD - 1)) - 1


def _order_rows(order, nvars: int) -> list[list[int]]:
    if order == "lex":
        return [[int(i == r) for i in range(nvars)] for r in range(nvars)]
    if order == "degrevlex":
        return [[int(i < nvars - r) for i in range(nvars)] for r in range(nvars)]
    if isinstance(order, tuple) and order and order[0] == "elim":
        # block order: degrevlex on the first k variables, then degrevlex on the rest
        k = order[1]
        rows = []
        for lo, hi in ((0, k), (k, nvars)):
            width = hi - lo
            for r in range(width):
                rows.append([int(lo <= i < hi - r) for i in range(nvars)])
        return rows
    raise ValueError(f"unknown monomial order {order!r}")


class Ring:
    """Polynomial ring Q[names] with a fixed monomial order."""

    def __init__(self, names: Sequence[str], order="degrevlex"):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.order = tuple(order) if isinstance(order, list) else order
        self.nvars = n = len(self.names)
        self.rows = _order_rows(self.order, n)
        low_bits = FIELD * n
        nrows = len(self.rows)
        self.guard = sum(1 << (FIELD * i + FIELD - 1) for i in range(n))
        self.low_mask = (1 << low_bits) - 1
        self.units = []
        for i in range(n):
            m = 1 << (FIELD * i)
            for r, row in enumerate(self.rows):
                if row[i]:
                    m += row[i] << (low_bits + FIELD * (nrows - 1 - r))
            self.units.append(m)
        self._index = {name: i for i, name in enumerate(self.names)}

    # monomial helpers ---------------------------------------------------
    def pack(self, exps: Sequence[int]) -> int:
        m = 0
        for e, u in zip(exps, self.units):
            if e:
                if e < 0 or e > MAX_EXPONENT:
                    raise OverflowError(f"exponent {e} out of range")
                m += e * u
        return m

    def unpack(self, m: int) -> tuple[int, ...]:
        return tuple((m >> (FIELD * i)) & _MASK for i in range(self.nvars))

    def divides(self, a: int, b: int) -> bool:
        """True iff monomial ``a`` divides monomial ``b``."""
        return not ((b - a) & self.guard)

    def lcm(self, a: int, b: int) -> int:
        return self.pack([max(x, y) for x, y in zip(self.unpack(a), self.unpack(b))])

    def coprime(self, a: int, b: int) -> bool:
        return all(not (x and y) for x, y in zip(self.unpack(a), self.unpack(b)))

    def mono_degree(self, m: int) -> int:
        return sum(self.unpack(m))

    def index(self, name) -> int:
        if isinstance(name, int):
            return name
        return self._index[name]

    # element constructors -----------------------------------------------
    def gen(self, name) -> "MultiPoly":
        i = self.index(name)
        return MultiPoly(self, {self.units[i]: ONE})

    def gens(self) -> list["MultiPoly"]:
        return [self.gen(i) for i in range(self.nvars)]

    def const(self, c) -> "MultiPoly":
        c = rational(c)
        return MultiPoly(self, {0: c} if c else {})

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def one(self) -> "MultiPoly":
        return self.const(1)

    def from_terms(self, terms: Mapping[Sequence[int], object]) -> "MultiPoly":
        out: dict[int, Rational] = {}
        for exps, c in terms.items():
            c = rational(c)
            if c:
                m = self.pack(exps)
                v = out.get(m, ZERO) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return MultiPoly(self, out)

    def with_order(self, order) -> "Ring":
        return Ring(self.names, order)

    def parse(self, text: str) -> "MultiPoly":
        return parse_poly(self, text)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names and self.order == other.order

    def __hash__(self):
        return hash((self.names, self.order))

    def __repr__(self):
        return f"Ring({', '.join(self.names)}; {self.order})"


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps packed monomials to nonzero rationals."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict[int, Rational]):
        self.ring = ring
        self.terms = terms

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m == 0 for m in self.terms)

    def lm(self) -> int:
        return max(self.terms)

    def lc(self) -> Rational:
        return self.terms[max(self.terms)]

    def leading_exponents(self) -> tuple[int, ...]:
        return self.ring.unpack(self.lm())

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.mono_degree(m) for m in self.terms)

    def items(self) -> list[tuple[tuple[int, ...], Rational]]:
        """(exponents, coefficient) pairs in decreasing monomial order."""
        return [(self.ring.unpack(m), self.terms[m]) for m in sorted(self.terms, reverse=True)]

    def variables(self) -> set[int]:
        used = set()
        for m in self.terms:
            for i, e in enumerate(self.ring.unpack(m)):
                if e:
                    used.add(i)
        return used

    def degree_in(self, var) -> int:
        i = self.ring.index(var)
        return max((self.ring.unpack(m)[i] for m in self.terms), default=-1)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return MultiPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPoly":
        c = rational(c)
        if not c:
            return self.ring.zero()
        return MultiPoly(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[int, Rational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                v = out.get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return MultiPoly(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self.ring.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # normalizations -----------------------------------------------------
    def monic(self) -> "MultiPoly":
        if not self.terms:
            return self
        return self.scale(ONE / self.lc())

    def primitive(self) -> "MultiPoly":
        """Scale to coprime integer coefficients with a positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            den = lcm(den, int(c.denominator))
        nums = [int(c * den) for c in self.terms.values()]
        g = 0
        for v in nums:
            g = gcd(g, v)
        factor = Rational(den, g)
        if self.lc() < 0:
            factor = -factor
        return self.scale(factor)

    # ring changes -------------------------------------------------------
    def to_ring(self, ring: Ring, mapping: Mapping[str, str] | None = None) -> "MultiPoly":
        """Re-embed in ``ring`` by variable name (optionally renamed via ``mapping``)."""
        src = self.ring
        targets = []
        for name in src.names:
            name = mapping.get(name, name) if mapping else name
            targets.append(ring.index(name) if name in ring.names else None)
        out: dict[int, Rational] = {}
        for m, c in self.terms.items():
            exps = [0] * ring.nvars
            for i, e in enumerate(src.unpack(m)):
                if e:
                    j = targets[i]
                    if j is None:
                        raise ValueError(f"variable {src.names[i]} missing from target ring")
                    exps[j] += e
            out[ring.pack(exps)] = c
        return MultiPoly(ring, out)

    def substitute(self, assignments: Mapping, ring: Ring | None = None) -> "MultiPoly":
        """Partial evaluation at rational values.

        Assigned variables are dropped; the result lives in ``ring`` when given,
        otherwise in a ring over the remaining variables with the same order kind.
        """
        src = self.ring
        values = {src.index(k): rational(v) for k, v in assignments.items()}
        if ring is None:
            keep = [name for i, name in enumerate(src.names) if i not in values]
            order = src.order if src.order in ("lex", "degrevlex") else "degrevlex"
            ring = Ring(keep, order)
        targets = [None if i in values else ring.index(name) for i, name in enumerate(src.names)]
        out: dict[int, Rational] = {}
        for m, c in self.terms.items():
            exps = [0] * ring.nvars
            for i, e in enumerate(src.unpack(m)):
                if not e:
                    continue
                if i in values:
                    c = c * values[i] ** e
                    if not c:
                        break
                else:
                    exps[targets[i]] += e
            if c:
                key = ring.pack(exps)
                v = out.get(key, ZERO) + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return MultiPoly(ring, out)

    def evaluate(self, point: Mapping | Sequence):
        """Evaluate at a full point (sequence in ring order or mapping name -> value)."""
        if not isinstance(point, Mapping):
            point = dict(zip(self.ring.names, point))
        vals = [point[name] for name in self.ring.names]
        total = None
        for m, c in self.terms.items():
            term = c
            for v, e in zip(vals, self.ring.unpack(m)):
                if e:
                    term = term * v ** e
            total = term if total is None else total + term
        return ZERO if total is None else total

    # display ------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for exps, c in self.items():
            factors = []
            for name, e in zip(self.ring.names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            neg = c < 0
            mag = -c if neg else c
            if mono:
                body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
            else:
                body = format_rational(mag)
            pieces.append(("- " if neg else "+ ") + body)
        text = " ".join(pieces)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"MultiPoly({self})"


_TOKEN = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_poly(ring: Ring, text: str) -> MultiPoly:
    """Parse the ``c*x1^a*x2^b + ...`` format produced by ``str``."""
    text = text.strip()
    if text in ("", "0"):
        return ring.zero()
    result = ring.zero()
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        sign, body = match.group(1), match.group(2).strip()
        pos = match.end()
        coeff = Rational(-1 if sign == "-" else 1)
        exps = [0] * ring.nvars
        for factor in body.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {body!r}")
            if factor[0].isdigit():
                coeff *= rational(factor)
                continue
            name, _, power = factor.partition("^")
            exps[ring.index(name.strip())] += int(power) if power else 1
        result = result + ring.from_terms({tuple(exps): coeff})
    return result


def elementary_symmetric(k: int, variables: Sequence[MultiPoly]) -> MultiPoly:
    """e_k over the given ring generators (e_0 = 1)."""
    if not variables:
        raise ValueError("need at least one variable")
    ring = variables[0].ring
    if k < 0 or k > len(variables):
        raise ValueError(f"k={k} out of range for {len(variables)} variables")
    total = ring.zero()
    for combo in combinations(variables, k):
        term = ring.one()
        for v in combo:
            term = term * v
        total = total + term
    return total


def power_sum(k: int, variables: Sequence[MultiPoly]) -> MultiPoly:
    ring = variables[0].ring
    total = ring.zero()
    for v in variables:
        total = total + v ** k
    return total


def divide_exact(f: MultiPoly, g: MultiPoly) -> MultiPoly | None:
    """Quotient ``f / g`` if ``g`` divides ``f`` exactly, else None."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    ring = f.ring
    work = dict(f.terms)
    glm = g.lm()
    ginv = ONE / g.terms[glm]
    quotient: dict[int, Rational] = {}
    while work:
        m = max(work)
        if not ring.divides(glm, m):
            return None
        c = work[m] * ginv
        shift = m - glm
        quotient[shift] = quotient.get(shift, ZERO) + c
        for mg, cg in g.terms.items():
            key = mg + shift
            v = work.get(key, ZERO) - c * cg
            if v:
                work[key] = v
            else:
                work.pop(key, None)
    return MultiPoly(ring, {m: c for m, c in quotient.items() if c})


def strip_factors(f: MultiPoly, factors: Iterable[MultiPoly]) -> MultiPoly:
    """Divide out every listed factor as many times as it divides ``f``."""
    if f.is_zero():
        return f
    for g in factors:
        if g.is_constant():
            continue
        while True:
            q = divide_exact(f, g)
            if q is None:
                break
            f = q
    return f
