"""Endomorphism census of finite configurations in cyclotomic fields.

For a configuration of n distinct points, every self-map of the point set
interpolates to a unique polynomial of degree <= n - 1.  ``endo_histogram``
tallies those degrees over all n^n maps.  Function tables here are 0-indexed
(``f[i]`` is the index of the image of point i) and the code of a table is
its base-n value with ``f[0]`` most significant.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .exact import CycloElem, euler_phi, rational, _reduce_mod_phi

__all__ = [
    "Config",
    "DegreeHistogram",
    "interpolate",
    "interpolate_degree",
    "endo_histogram",
    "count_degree_d_endos",
    "degree_d_endos",
    "verify_monomial_rigidity",
    "load_config",
    "sqrt2_config",
    "CENSUS_MAX_N",
]

CENSUS_MAX_N = 8


@dataclass(frozen=True)
class Config:
    m: int
    points: tuple[CycloElem, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        for p in pts:
            if p.m != self.m:
                raise ValueError(f"point conductor {p.m} differs from configuration conductor {self.m}")
        if len(set(pts)) != len(pts):
            raise ValueError("configuration points must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.points)

    @classmethod
    def roots_of_unity(cls, n: int) -> "Config":
        return cls(n, tuple(CycloElem.zeta(n, k) for k in range(n)))

    def is_roots_of_unity(self) -> bool:
        return self.m == self.n and all(p == CycloElem.zeta(self.n, k) for k, p in enumerate(self.points))

    def to_json(self) -> dict:
        return {"conductor": self.m, "points": [list(p.to_json()["coeffs"]) for p in self.points]}


@dataclass(frozen=True)
class DegreeHistogram:
    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) != self.n:
            raise ValueError("histogram needs one bin per degree 0..n-1")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict:
        return {"n": self.n, "counts": list(self.counts)}


def sqrt2_config() -> Config:
    """(0, 1, 1 + sqrt2, 2 + sqrt2) inside Q(zeta_8), with sqrt2 = zeta_8 - zeta_8^3."""
    root2 = CycloElem.zeta(8, 1) - CycloElem.zeta(8, 3)
    one = CycloElem.one(8)
    return Config(8, (CycloElem.zero(8), one, one + root2, one + one + root2))


def load_config(path: str | Path) -> Config:
    """Read ``{"conductor": m, "points": [[c0, c1, ...], ...]}``; entries are ints or "p/q" strings."""
    data = json.loads(Path(path).read_text())
    m = int(data["conductor"])
    return Config(m, tuple(CycloElem(m, [rational(c) for c in pt]) for pt in data["points"]))


# --------------------------------------------------------------------------
# exact interpolation


def _vandermonde_inverse(config: Config) -> list[list[CycloElem]]:
    """W with coefficient_k = sum_i W[k][i] * y_i."""
    n, m = config.n, config.m
    rows = [[p**k for k in range(n)] + [CycloElem.one(m) if j == i else CycloElem.zero(m) for j in range(n)]
            for i, p in enumerate(config.points)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col])
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [row[n:] for row in rows]


def interpolate(config: Config, f: Sequence[int]) -> list[CycloElem]:
    """Coefficients (lowest degree first) of the interpolant of ``f``."""
    w = _vandermonde_inverse(config)
    ys = [config.points[j] for j in f]
    zero = CycloElem.zero(config.m)
    out = []
    for row in w:
        acc = zero
        for wi, y in zip(row, ys):
            acc = acc + wi * y
        out.append(acc)
    return out


def _degree(coeffs: Sequence[CycloElem]) -> int:
    for k in range(len(coeffs) - 1, 0, -1):
        if coeffs[k]:
            return k
    return 0


def interpolate_degree(config: Config, f: Sequence[int]) -> int:
    """Degree of the interpolant; constants and zero have degree 0."""
    if len(f) != config.n or any(not 0 <= j < config.n for j in f):
        raise ValueError("function table must map each point index to a point index")
    return _degree(interpolate(config, f))


def _scaled_tables(config: Config) -> np.ndarray:
    """Integer array T[k, i, j, :] proportional (per k) to W[k][i] * q_j."""
    w = _vandermonde_inverse(config)
    n = config.n
    tables = []
    for k in range(n):
        entries = [[w[k][i] * config.points[j] for j in range(n)] for i in range(n)]
        den = 1
        for row in entries:
            for e in row:
                for c in e.coeffs:
                    den = den * int(c.denominator) // np.gcd(den, int(c.denominator))
        tables.append([[[int(c * den) for c in e.coeffs] for e in row] for row in entries])
    arr = np.array(tables, dtype=object)
    if np.abs(arr).max() * n < 2**62:
        arr = arr.astype(np.int64)
    return arr


def _explicit_degrees(config: Config, start: int, stop: int, batch: int = 1 << 15) -> np.ndarray:
    n = config.n
    tables = _scaled_tables(config)
    pw = kernels.powers(n)
    out = np.zeros(stop - start, dtype=np.int8)
    idx = np.arange(n)
    for lo in range(start, stop, batch):
        hi = min(lo + batch, stop)
        f = (np.arange(lo, hi, dtype=np.int64)[:, None] // pw[None, :]) % n
        deg = np.zeros(hi - lo, dtype=np.int8)
        undecided = np.ones(hi - lo, dtype=bool)
        for k in range(n - 1, 0, -1):
            rows = np.nonzero(undecided)[0]
            if rows.size == 0:
                break
            acc = tables[k][idx[None, :], f[rows]].sum(axis=1)
            hit = rows[np.any(acc != 0, axis=1)]
            deg[hit] = k
            undecided[hit] = False
        out[lo - start : hi - start] = deg
    return out


# --------------------------------------------------------------------------
# histograms


@lru_cache(maxsize=None)
def _reduction_matrix(n: int) -> np.ndarray:
    """Row j = coefficients of x^j modulo Phi_n."""
    phi = euler_phi(n)
    rows = []
    for j in range(n):
        vec = _reduce_mod_phi([0] * j + [1], n)
        rows.append([int(c) for c in vec])
    arr = np.array(rows, dtype=np.int64).reshape(n, phi)
    arr.setflags(write=False)
    return arr


def _rou_chunk(args) -> np.ndarray:
    n, start, stop = args
    return kernels.census_degrees(n, _reduction_matrix(n), start, stop)


def _degrees(config: Config, jobs: int = 1, method: str = "auto") -> np.ndarray:
    n = config.n
    if n > CENSUS_MAX_N:
        raise ValueError(f"census supports n <= {CENSUS_MAX_N}")
    total = n**n
    if method == "auto":
        method = "dft" if config.is_roots_of_unity() else "explicit"
    if method == "explicit":
        return _explicit_degrees(config, 0, total)
    if method != "dft":
        raise ValueError(f"unknown census method {method!r}")
    if not config.is_roots_of_unity():
        raise ValueError("the DFT method needs the roots-of-unity configuration")
    if jobs <= 1 or total < 1 << 20:
        return kernels.census_degrees(n, _reduction_matrix(n))
    step = -(-total // (4 * jobs))
    chunks = [(n, lo, min(lo + step, total)) for lo in range(0, total, step)]
    with ProcessPoolExecutor(jobs) as pool:
        return np.concatenate(list(pool.map(_rou_chunk, chunks)))


def endo_histogram(config: Config | int, jobs: int = 1, method: str = "auto") -> DegreeHistogram:
    """Degree histogram of all n^n self-maps; an int argument means mu_n."""
    if isinstance(config, int):
        config = Config.roots_of_unity(config)
    deg = _degrees(config, jobs, method)
    return DegreeHistogram(config.n, np.bincount(deg, minlength=config.n))


def count_degree_d_endos(config: Config | int, d: int, jobs: int = 1) -> int:
    if isinstance(config, int):
        config = Config.roots_of_unity(config)
    if not 0 <= d < config.n:
        raise ValueError("need 0 <= d < n")
    return endo_histogram(config, jobs).counts[d]


def degree_d_endos(config: Config | int, d: int, jobs: int = 1) -> np.ndarray:
    """Function tables (rows) of all maps whose interpolant has degree exactly d."""
    if isinstance(config, int):
        config = Config.roots_of_unity(config)
    deg = _degrees(config, jobs)
    return kernels.decode(np.nonzero(deg == d)[0], config.n)


def verify_monomial_rigidity(n: int, d: int, jobs: int = 1) -> bool:
    """Every degree-d self-map of mu_n is zeta^k x^d (requires n > 2d >= 1)."""
    if not (d >= 1 and n > 2 * d):
        raise ValueError("monomial rigidity needs n > 2d >= 2")
    config = Config.roots_of_unity(n)
    monomials = set()
    for k in range(n):
        coeffs = [CycloElem.zero(n)] * n
        coeffs[d] = CycloElem.zeta(n, k)
        monomials.add(tuple(coeffs))
    found = degree_d_endos(config, d, jobs)
    seen = set()
    for row in found:
        coeffs = tuple(_dft_coefficients(n, [int(v) for v in row]))
        if coeffs not in monomials:
            return False
        seen.add(coeffs)
    return seen == monomials


def _dft_coefficients(n: int, f: Sequence[int]) -> list[CycloElem]:
    """c_k = (1/n) sum_i zeta^{f(i) - i k} for a self-map of mu_n."""
    out = []
    for k in range(n):
        vec = [0] * n
        for i, j in enumerate(f):
            vec[(j - i * k) % n] += 1
        out.append(CycloElem(n, [rational(v) / n for v in vec]))
    return out
