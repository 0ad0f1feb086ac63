"""Exact arithmetic: rationals and elements of cyclotomic fields Q(zeta_m).

Rationals are ``gmpy2.mpq`` values when gmpy2 is importable and
``fractions.Fraction`` otherwise; both are kept reduced with a positive
denominator and print as ``p/q`` (or ``p`` when ``q == 1``).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover - gmpy2 ships with the supported envs
    from fractions import Fraction as Rational

__all__ = [
    "Rational",
    "ZERO",
    "ONE",
    "rational",
    "format_rational",
    "euler_phi",
    "cyclotomic_polynomial",
    "CycloElem",
]

ZERO = Rational(0)
ONE = Rational(1)


def rational(value) -> Rational:
    """Coerce ints, ``Fraction``s, mpqs and ``"p/q"`` strings to a Rational."""
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Rational(int(num), int(den))
        return Rational(int(text))
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    return Rational(value)


def format_rational(value) -> str:
    value = Rational(value)
    if value.denominator == 1:
        return str(int(value.numerator))
    return f"{int(value.numerator)}/{int(value.denominator)}"


def _factorize(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def euler_phi(m: int) -> int:
    result = m
    for p in _factorize(m):
        result -= result // p
    return result


def _divisors(m: int) -> list[int]:
    return [k for k in range(1, m + 1) if m % k == 0]


def _int_poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (ascending coefficients, monic ``den``)."""
    num = list(num)
    dn = len(den) - 1
    assert den[-1] == 1
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def _cyclotomic(m: int) -> tuple[int, ...]:
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for k in _divisors(m)[:-1]:
        num = _int_poly_divexact(num, list(_cyclotomic(k)))
    return tuple(num)


def cyclotomic_polynomial(m: int) -> list[int]:
    """Coefficients of Phi_m, lowest degree first.

    >>> cyclotomic_polynomial(8)
    [1, 0, 0, 0, 1]
    """
    if m < 1:
        raise ValueError("conductor must be positive")
    return list(_cyclotomic(m))


def _reduce_mod_phi(coeffs: Sequence, m: int) -> tuple:
    phi = _cyclotomic(m)
    k = len(phi) - 1
    work = [Rational(c) for c in coeffs]
    for i in range(len(work) - 1, k - 1, -1):
        c = work[i]
        if c:
            for j in range(k):
                work[i - k + j] -= c * phi[j]
            work[i] = ZERO
    work = work[:k] + [ZERO] * (k - len(work))
    return tuple(work)


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    inv = ONE / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return _poly_trim(q), _poly_trim(a[: len(b) - 1])


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else ZERO) - (b[i] if i < len(b) else ZERO) for i in range(n)]
    return _poly_trim(out)


class CycloElem:
    """An element of Q(zeta_m), stored as its reduced residue modulo Phi_m.

    ``coeffs[k]`` is the coefficient of ``zeta_m**k``; the vector always has
    length phi(m), so equality of elements is equality of vectors.
    """

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs: Iterable = ()):
        if m < 1:
            raise ValueError("conductor must be positive")
        self.m = m
        self.coeffs = _reduce_mod_phi(list(coeffs), m)
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycloElem":
        k %= m
        return cls(m, [0] * k + [1])

    @classmethod
    def from_rational(cls, m: int, value) -> "CycloElem":
        return cls(m, [rational(value)])

    @classmethod
    def zero(cls, m: int) -> "CycloElem":
        return cls(m, [])

    @classmethod
    def one(cls, m: int) -> "CycloElem":
        return cls(m, [1])

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "CycloElem":
        if isinstance(other, CycloElem):
            if other.m != self.m:
                raise ValueError(f"conductor mismatch: {self.m} vs {other.m}")
            return other
        return CycloElem.from_rational(self.m, other)

    def __add__(self, other):
        other = self._coerce(other)
        return CycloElem(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        return CycloElem(self.m, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return CycloElem(self.m, _poly_mul(list(self.coeffs), list(other.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> "CycloElem":
        """Inverse via the extended Euclidean algorithm against Phi_m."""
        a = _poly_trim(list(self.coeffs))
        if not a:
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        r0, r1 = [Rational(c) for c in _cyclotomic(self.m)], a
        s0, s1 = [], [ONE]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r1 is a nonzero constant because Phi_m is irreducible
        inv = ONE / r1[0]
        return CycloElem(self.m, [c * inv for c in s1])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloElem.one(self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparisons --------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, CycloElem):
            return self.m == other.m and self.coeffs == other.coeffs
        try:
            return self.coeffs == CycloElem.from_rational(self.m, other).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.m, self.coeffs))
        return self._hash

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"conductor": self.m, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycloElem":
        return cls(int(obj["conductor"]), [rational(c) for c in obj["coeffs"]])

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(format_rational(c) + ("*" + mono if mono else ""))
        body = " + ".join(terms).replace("+ -", "- ") or "0"
        return f"CycloElem({self.m}: {body})"
