"""Portraits (set maps [n] -> [n]) and their combinatorics.

Portraits are one-indexed; ``Portrait((1, 1, 2, 4))`` sends 1->1, 2->1, 3->2,
4->4 and prints as ``1,1,2,4``.  Relabeling by a permutation s is
``P^s = s^-1 o P o s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, Sequence

import numpy as np

from . import kernels

__all__ = [
    "Portrait",
    "PairClass",
    "Obstruction",
    "mobius",
    "necklace",
    "cycle_census",
    "is_admissible",
    "low_degree_admissible",
    "linear_conf_dim",
    "fiber_partition",
    "common_coincidence_pairs",
    "is_two_image",
    "two_image_obstructed",
    "obstruction",
    "obstructions",
    "canonical_pair",
    "admissible_portraits",
    "enumerate_admissible_pairs",
    "count_admissible_pairs",
    "pair_keys",
]


@dataclass(frozen=True, order=True)
class Portrait:
    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        n = len(m)
        if n == 0:
            raise ValueError("portrait must have at least one point")
        bad = [v for v in m if not 1 <= v <= n]
        if bad:
            raise ValueError(f"portrait entries must lie in 1..{n}, got {bad[0]}")

    @property
    def n(self) -> int:
        return len(self.map)

    def __call__(self, i: int) -> int:
        return self.map[i - 1]

    @classmethod
    def parse(cls, text: str) -> "Portrait":
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))
        except ValueError as exc:
            raise ValueError(f"bad portrait {text!r}: {exc}") from None

    @classmethod
    def identity(cls, n: int) -> "Portrait":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def constant(cls, n: int, value: int = 1) -> "Portrait":
        return cls((value,) * n)

    def __str__(self):
        return ",".join(map(str, self.map))

    def zero_indexed(self) -> tuple[int, ...]:
        return tuple(v - 1 for v in self.map)

    def conjugate(self, sigma: Sequence[int]) -> "Portrait":
        """``P^sigma`` for a one-indexed permutation table ``sigma``."""
        n = self.n
        inv = [0] * (n + 1)
        for i, s in enumerate(sigma, start=1):
            inv[s] = i
        return Portrait(tuple(inv[self.map[sigma[i] - 1]] for i in range(n)))

    def is_bijection(self) -> bool:
        return len(set(self.map)) == self.n

    def image(self) -> set[int]:
        return set(self.map)

    def code(self) -> int:
        c = 0
        for v in self.map:
            c = c * self.n + (v - 1)
        return c

    @classmethod
    def from_code(cls, code: int, n: int) -> "Portrait":
        digits = []
        for _ in range(n):
            code, r = divmod(code, n)
            digits.append(r + 1)
        return cls(tuple(reversed(digits)))


# --------------------------------------------------------------------------
# arithmetic helpers


def mobius(k: int) -> int:
    if k < 1:
        raise ValueError("mobius is defined on positive integers")
    result, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            result = -result
        p += 1
    return -result if k > 1 else result


def necklace(k: int, d: int) -> int:
    """M_k(d): the number of primitive period-k necklaces on d letters."""
    if k < 1:
        raise ValueError("k must be positive")
    total = sum(mobius(k // j) * d**j for j in range(1, k + 1) if k % j == 0)
    return total // k


# --------------------------------------------------------------------------
# single-portrait predicates


def _cycles(p: Portrait) -> list[list[int]]:
    n, m = p.n, p.map
    state = [0] * (n + 1)  # 0 unvisited, 1 on current path, 2 done
    cycles = []
    for start in range(1, n + 1):
        path = []
        x = start
        while state[x] == 0:
            state[x] = 1
            path.append(x)
            x = m[x - 1]
        if state[x] == 1:
            cycles.append(path[path.index(x):])
        for y in path:
            state[y] = 2
    return cycles


def cycle_census(p: Portrait) -> dict[int, int]:
    census: dict[int, int] = {}
    for c in _cycles(p):
        census[len(c)] = census.get(len(c), 0) + 1
    return dict(sorted(census.items()))


def _preimage_counts(p: Portrait) -> list[int]:
    counts = [0] * p.n
    for v in p.map:
        counts[v - 1] += 1
    return counts


def is_admissible(p: Portrait, d: int) -> bool:
    if d < 2:
        raise ValueError("is_admissible needs d >= 2; use low_degree_admissible for d in {0, 1}")
    if max(_preimage_counts(p)) > d:
        return False
    return all(count <= necklace(k, d) for k, count in cycle_census(p).items())


def low_degree_admissible(p: Portrait, d: int) -> bool:
    """Realizability by a constant (d=0) or an affine map (d=1)."""
    if d == 0:
        return len(set(p.map)) == 1
    if d != 1:
        raise ValueError("low_degree_admissible handles d in {0, 1}")
    if not p.is_bijection():
        return False
    census = cycle_census(p)
    fixed = census.get(1, 0)
    if fixed == p.n:
        return True
    if fixed > 1:
        return False
    # every non-fixed point has the same period
    return len([k for k in census if k > 1]) == 1


def linear_conf_dim(p: Portrait) -> int:
    if not low_degree_admissible(p, 1):
        raise ValueError(f"portrait {p} is not realizable in degree 1")
    census = cycle_census(p)
    orbits = sum(census.values())
    return orbits if census.get(1) else orbits + 1


def fiber_partition(p: Portrait) -> frozenset[frozenset[int]]:
    fibers: dict[int, set[int]] = {}
    for i, v in enumerate(p.map, start=1):
        fibers.setdefault(v, set()).add(i)
    return frozenset(frozenset(f) for f in fibers.values())


def is_two_image(p: Portrait) -> bool:
    n = p.n
    if n % 2:
        return False
    parts = fiber_partition(p)
    return len(parts) == 2 and all(len(part) == n // 2 for part in parts)


# --------------------------------------------------------------------------
# pair predicates


def common_coincidence_pairs(p: Portrait, q: Portrait) -> set[tuple[int, int]]:
    if p.n != q.n:
        raise ValueError("portraits must have the same number of points")
    return {
        (i, j)
        for i, j in combinations(range(1, p.n + 1), 2)
        if p.map[i - 1] == p.map[j - 1] and q.map[i - 1] == q.map[j - 1]
    }


class Obstruction(str, Enum):
    INTERPOLATION = "Interpolation"
    COINCIDENCE = "Coincidence"
    TWO_IMAGE = "TwoImage"

    def __str__(self):
        return self.value


def _interpolation(p: Portrait, q: Portrait, d: int) -> bool:
    if p.map == q.map:
        return False
    return sum(a == b for a, b in zip(p.map, q.map)) >= d + 1


def _coincidence(p: Portrait, q: Portrait, d: int, pp=None, pq=None) -> bool:
    pp = fiber_partition(p) if pp is None else pp
    pq = fiber_partition(q) if pq is None else pq
    if pp == pq:
        return False
    if d in (2, 3):
        need = 1 if d == 2 else 2
        if len(common_coincidence_pairs(p, q)) >= need:
            return True
    return any(len(part) == d for part in pp & pq)


def _two_image(p: Portrait, q: Portrait, pp=None, pq=None) -> bool:
    if not (is_two_image(p) and is_two_image(q)):
        return False
    pp = fiber_partition(p) if pp is None else pp
    pq = fiber_partition(q) if pq is None else pq
    return pp != pq


def obstructions(p: Portrait, q: Portrait, d: int) -> list[Obstruction]:
    """Every combinatorial obstruction that applies, in checking order."""
    if p.n != q.n:
        raise ValueError("portraits must have the same number of points")
    pp, pq = fiber_partition(p), fiber_partition(q)
    found = []
    if _interpolation(p, q, d):
        found.append(Obstruction.INTERPOLATION)
    if _coincidence(p, q, d, pp, pq):
        found.append(Obstruction.COINCIDENCE)
    if _two_image(p, q, pp, pq):
        found.append(Obstruction.TWO_IMAGE)
    return found


def obstruction(p: Portrait, q: Portrait, d: int) -> Obstruction | None:
    """The first obstruction found, or None."""
    if p.n != q.n:
        raise ValueError("portraits must have the same number of points")
    if _interpolation(p, q, d):
        return Obstruction.INTERPOLATION
    pp, pq = fiber_partition(p), fiber_partition(q)
    if _coincidence(p, q, d, pp, pq):
        return Obstruction.COINCIDENCE
    if _two_image(p, q, pp, pq):
        return Obstruction.TWO_IMAGE
    return None


def two_image_obstructed(p: Portrait, q: Portrait) -> bool:
    """Both portraits are two-image but their fiber partitions differ."""
    if p.n != q.n:
        raise ValueError("portraits must have the same number of points")
    return _two_image(p, q)


# --------------------------------------------------------------------------
# pair classes


@dataclass(frozen=True)
class PairClass:
    """Canonical representative (p, q) of an unordered pair up to simultaneous relabeling."""

    p: Portrait
    q: Portrait
    canonical_key: str = field(default="")

    def __post_init__(self):
        if not self.canonical_key:
            object.__setattr__(self, "canonical_key", f"{self.p}|{self.q}")

    @property
    def n(self) -> int:
        return self.p.n

    @property
    def key(self) -> str:
        return self.canonical_key

    @classmethod
    def from_key(cls, key: str) -> "PairClass":
        a, b = key.split("|")
        return cls(Portrait.parse(a), Portrait.parse(b), key)

    def is_diagonal(self) -> bool:
        return self.p == self.q


@lru_cache(maxsize=None)
def _perm_table(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)


def canonical_pair(p: Portrait, q: Portrait) -> PairClass:
    """Lexicographically least (A, B) over all relabelings and both orders."""
    if p.n != q.n:
        raise ValueError("portraits must have the same number of points")
    n = p.n
    perms = _perm_table(n)
    inv = kernels.inverse_perms(perms)
    pw = kernels.powers(n)
    size = n**n
    best = None
    for a, b in ((p, q), (q, p)):
        ma = np.array(a.zero_indexed(), dtype=np.int64)
        mb = np.array(b.zero_indexed(), dtype=np.int64)
        ca = inv[np.arange(len(perms))[:, None], ma[perms]] @ pw
        cb = inv[np.arange(len(perms))[:, None], mb[perms]] @ pw
        key = int((ca * size + cb).min()) if size < 2**31 else min(int(x) * size + int(y) for x, y in zip(ca, cb))
        best = key if best is None else min(best, key)
    ka, kb = divmod(best, size)
    return PairClass(Portrait.from_code(ka, n), Portrait.from_code(kb, n))


@lru_cache(maxsize=None)
def _admissible_table(n: int, d: int) -> np.ndarray:
    maps = []
    for m in product(range(1, n + 1), repeat=n):
        p = Portrait(m)
        if d >= 2:
            ok = is_admissible(p, d)
        else:
            ok = low_degree_admissible(p, d)
        if ok:
            maps.append(m)
    arr = np.array(maps, dtype=np.int64).reshape(-1, n) - 1
    arr.setflags(write=False)
    return arr


def admissible_portraits(n: int, d: int) -> list[Portrait]:
    return [Portrait(tuple(int(v) + 1 for v in row)) for row in _admissible_table(n, d)]


def pair_keys(n: int, d: int, include_diagonal: bool = False, numba: bool | None = None) -> np.ndarray:
    """Sorted int64 codes ``code(A) * n**n + code(B)`` of all admissible pair classes."""
    if n < 2:
        raise ValueError("need n >= 2")
    maps = _admissible_table(n, d)
    size = n**n
    if size * size >= 2**63:
        raise ValueError("n too large for int64 pair codes")
    if len(maps) == 0:
        return np.empty(0, dtype=np.int64)
    perms = _perm_table(n)
    if numba is None:
        numba = kernels.prefer_numba(maps.shape[0] * perms.shape[0] * n)
    canon, arg = kernels.min_conjugate_codes(maps, perms, numba=numba)
    order = np.argsort(canon, kind="stable")
    maps, canon, arg = maps[order], canon[order], arg[order]
    reps, starts = np.unique(canon, return_index=True)
    pw = kernels.powers(n)
    chunks = []
    for ci, (rep_code, start) in enumerate(zip(reps, starts)):
        rep = kernels.decode(np.array([rep_code]), n)[0]
        inv_all = kernels.inverse_perms(perms)
        conj = inv_all[np.arange(len(perms))[:, None], rep[perms]]
        aut = perms[(conj @ pw) == rep_code]
        others = maps[start:]
        bcodes, _ = kernels.min_conjugate_codes(others, aut, numba=numba)
        end = starts[ci + 1] - start if ci + 1 < len(starts) else len(others)
        # members of the rep's own class: also try the swapped order
        if end:
            own_perm = perms[arg[start : start + end]]  # tau with Q^tau = rep
            for t, tau in enumerate(own_perm):
                sset = tau[aut]  # tau o alpha
                sinv = kernels.inverse_perms(sset)
                swapped = sinv[np.arange(len(sset))[:, None], rep[sset]] @ pw
                bcodes[t] = min(bcodes[t], swapped.min())
        keys = np.unique(rep_code * size + bcodes)
        if not include_diagonal:
            keys = keys[keys != rep_code * size + rep_code]
        chunks.append(keys)
    return np.concatenate(chunks)


def count_admissible_pairs(n: int, d: int, include_diagonal: bool = False) -> int:
    return int(len(pair_keys(n, d, include_diagonal)))


def key_to_pair(code: int, n: int) -> PairClass:
    a, b = divmod(int(code), n**n)
    return PairClass(Portrait.from_code(a, n), Portrait.from_code(b, n))


def enumerate_admissible_pairs(n: int, d: int, include_diagonal: bool = False) -> Iterator[PairClass]:
    """One canonical representative per class, in ascending key order."""
    for code in pair_keys(n, d, include_diagonal):
        yield key_to_pair(code, n)
