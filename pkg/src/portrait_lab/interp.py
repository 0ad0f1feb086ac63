"""Symbolic Lagrange interpolation of portraits.

For a portrait P on n points, the interpolant through (q_i, q_{P(i)}) is
f(x) = sum_k b_k x^k with b_k a rational function of q.  Multiplying by the
Vandermonde product V = prod_{i<j} (q_j - q_i) gives polynomials B_k = V b_k.
The realization space in degree <= d is cut out (on distinct configurations)
by B_k = 0 for k > d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .combinat import Portrait
from .exact import rational
from .poly import MultiPoly, Ring, elementary_symmetric, strip_factors

__all__ = [
    "RealizationIdeal",
    "variable_names",
    "coordinate_ring",
    "lagrange_numerators",
    "cleared_numerators",
    "diagonal_factors",
    "conf_ideal",
    "two_image_ideal",
    "MODULI_NORMALIZATION",
]

# q1 = 0 and q2 = 1 kill the affine group action
MODULI_NORMALIZATION = {1: 0, 2: 1}


def variable_names(n: int) -> tuple[str, ...]:
    return tuple(f"q{i}" for i in range(1, n + 1))


@lru_cache(maxsize=None)
def coordinate_ring(n: int, fixed: tuple[int, ...] = ()) -> Ring:
    """Q[q_i : i not in fixed] with degrevlex."""
    return Ring([f"q{i}" for i in range(1, n + 1) if i not in fixed])


def _normalize_values(values: Mapping[int, object] | None) -> tuple[tuple[int, object], ...]:
    if not values:
        return ()
    return tuple(sorted((int(k), rational(v)) for k, v in values.items()))


def _points(n: int, values: tuple) -> tuple[Ring, list[MultiPoly]]:
    fixed = dict(values)
    ring = coordinate_ring(n, tuple(sorted(fixed)))
    pts = [ring.const(fixed[i]) if i in fixed else ring.gen(f"q{i}") for i in range(1, n + 1)]
    return ring, pts


@lru_cache(maxsize=64)
def _lagrange_weights(n: int, values: tuple) -> tuple[Ring, tuple[tuple[MultiPoly, ...], ...]]:
    """W[i][k] with B_k = sum_i q_{P(i)} W[i][k]."""
    ring, q = _points(n, values)
    weights = []
    for i in range(n):
        others = [q[j] for j in range(n) if j != i]
        vi = ring.one()
        for a in range(len(others)):
            for b in range(a + 1, len(others)):
                vi = vi * (others[b] - others[a])
        if (n - 1 - i) % 2:
            vi = -vi
        # coefficients of prod_{j != i} (x - q_j), lowest degree first
        coeffs = [ring.one()]
        for qj in others:
            nxt = [ring.zero() for _ in range(len(coeffs) + 1)]
            for k, c in enumerate(coeffs):
                nxt[k + 1] = nxt[k + 1] + c
                nxt[k] = nxt[k] - c * qj
            coeffs = nxt
        weights.append(tuple(vi * c for c in coeffs))
    return ring, tuple(weights)


def lagrange_numerators(p: Portrait, values: Mapping[int, object] | None = None) -> list[MultiPoly]:
    """[B_0, ..., B_{n-1}] with B_k = V * b_k.

    ``values`` optionally fixes some coordinates (one-indexed) before the
    expansion, e.g. ``{1: 0, 2: 1}``.
    """
    n = p.n
    vals = _normalize_values(values)
    ring, weights = _lagrange_weights(n, vals)
    _, q = _points(n, vals)
    out = []
    for k in range(n):
        total = ring.zero()
        for i in range(n):
            total = total + q[p.map[i] - 1] * weights[i][k]
        out.append(total)
    return out


@lru_cache(maxsize=64)
def _diagonal_factors(n: int, values: tuple) -> tuple[MultiPoly, ...]:
    ring, q = _points(n, values)
    factors = []
    for i in range(n):
        for j in range(i + 1, n):
            diff = q[j] - q[i]
            if not diff.is_constant():
                factors.append(diff.primitive())
    return tuple(factors)


def diagonal_factors(n: int, values: Mapping[int, object] | None = None) -> list[MultiPoly]:
    """The non-constant factors q_j - q_i of the configuration discriminant."""
    return list(_diagonal_factors(n, _normalize_values(values)))


def cleared_numerators(p: Portrait, values: Mapping[int, object] | None = None) -> list[MultiPoly]:
    """B_k with every diagonal factor and the integer content removed.

    On distinct configurations these have the same zero sets as the B_k.
    """
    factors = diagonal_factors(p.n, values)
    return [strip_factors(b, factors).primitive() for b in lagrange_numerators(p, values)]


@dataclass(frozen=True)
class RealizationIdeal:
    n: int
    d: int
    ring: Ring
    generators: tuple[MultiPoly, ...]
    leading_coeff: MultiPoly


def conf_ideal(p: Portrait, d: int, values: Mapping[int, object] | None = None) -> RealizationIdeal:
    """Equations for configurations realizing ``p`` by a polynomial of degree <= d."""
    if d < 0:
        raise ValueError("d must be non-negative")
    n = p.n
    ring = coordinate_ring(n, tuple(k for k, _ in _normalize_values(values)))
    if d >= n - 1:
        return RealizationIdeal(n, d, ring, (), ring.one())
    cleared = cleared_numerators(p, values)
    gens = tuple(cleared[k] for k in range(n - 1, d, -1))
    return RealizationIdeal(n, d, ring, gens, cleared[d])


def _check_partition(partition: Sequence[Sequence[int]]) -> tuple[list[int], list[int], int]:
    if len(partition) != 2:
        raise ValueError("a two-image partition has exactly two parts")
    a, b = sorted(map(int, partition[0])), sorted(map(int, partition[1]))
    d = len(a)
    if d == 0 or len(b) != d:
        raise ValueError("both parts must have the same positive size")
    if sorted(a + b) != list(range(1, 2 * d + 1)):
        raise ValueError(f"parts must partition 1..{2 * d}")
    return a, b, d


def two_image_ideal(partition: Sequence[Sequence[int]], values: Mapping[int, object] | None = None) -> list[MultiPoly]:
    """e_k(q_A) - e_k(q_B) for 1 <= k < d."""
    a, b, d = _check_partition(partition)
    vals = _normalize_values(values)
    _, q = _points(2 * d, vals)
    xa = [q[i - 1] for i in a]
    xb = [q[i - 1] for i in b]
    out = []
    for k in range(1, d):
        g = elementary_symmetric(k, xa) - elementary_symmetric(k, xb)
        out.append(g.primitive())
    return out
