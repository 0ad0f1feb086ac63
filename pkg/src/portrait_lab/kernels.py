"""Hot loops: portrait relabeling minima and roots-of-unity degree tallies.

Each kernel has a numba version and a numpy version with identical results;
``_accel.use_numba()`` reports whether numba is usable; small inputs take the numpy path regardless.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit, use_numba

# Below this many elementary steps the numpy path wins: loading the cached
# numba machine code costs close to a second per process.
SMALL_WORK = 5_000_000


def prefer_numba(work: int) -> bool:
    return use_numba() and work > SMALL_WORK

# --------------------------------------------------------------------------
# portrait codes
#
# A portrait on [n] is stored 0-indexed as an int64 row; its code is the
# base-n integer whose most significant digit is the image of point 0, so
# numeric order of codes equals lexicographic order of maps.


def powers(n: int) -> np.ndarray:
    return n ** np.arange(n - 1, -1, -1, dtype=np.int64)


def encode(maps: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(maps, dtype=np.int64) @ powers(n)


def decode(codes: np.ndarray, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[:, None] // powers(n)[None, :]) % n


def all_maps(n: int) -> np.ndarray:
    return decode(np.arange(n**n, dtype=np.int64), n)


def inverse_perms(perms: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    inv[rows, perms] = np.arange(perms.shape[1])[None, :]
    return inv


@njit
def _min_conj_numba(maps, perms, inv, pw):
    m, n = maps.shape
    k = perms.shape[0]
    best = np.empty(m, dtype=np.int64)
    arg = np.empty(m, dtype=np.int64)
    for r in range(m):
        b = np.int64(-1)
        a = 0
        for s in range(k):
            code = np.int64(0)
            for i in range(n):
                code += inv[s, maps[r, perms[s, i]]] * pw[i]
            if b < 0 or code < b:
                b = code
                a = s
        best[r] = b
        arg[r] = a
    return best, arg


def _min_conj_numpy(maps, perms, inv, pw):
    m = maps.shape[0]
    best = np.full(m, -1, dtype=np.int64)
    arg = np.zeros(m, dtype=np.int64)
    for s in range(perms.shape[0]):
        conj = inv[s][maps[:, perms[s]]]
        code = conj @ pw
        better = (best < 0) | (code < best)
        best[better] = code[better]
        arg[better] = s
    return best, arg


def min_conjugate_codes(maps: np.ndarray, perms: np.ndarray, numba: bool | None = None):
    """For each row Q, the minimum of code(Q^s) over the given perms, and its argmin.

    ``Q^s = s^-1 o Q o s``.
    """
    maps = np.ascontiguousarray(maps, dtype=np.int64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    inv = inverse_perms(perms)
    pw = powers(maps.shape[1])
    if maps.shape[0] == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if numba is None:
        numba = prefer_numba(maps.shape[0] * perms.shape[0] * maps.shape[1])
    fn = _min_conj_numba if numba else _min_conj_numpy
    return fn(maps, perms, inv, pw)


# --------------------------------------------------------------------------
# roots-of-unity census
#
# With points zeta^0..zeta^{n-1} and f(i) the index of the image of point i,
# n * c_d = sum_i zeta^{(f(i) - i*d) mod n}.  The sum is a vector of exponent
# counts; c_d vanishes iff that vector reduces to zero modulo Phi_n, which is
# a linear map given by the integer matrix ``red`` (n x phi(n)).


@njit
def _census_numba(n, red, start, stop):
    phi = red.shape[1]
    out = np.zeros(stop - start, dtype=np.int8)
    f = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    for code in range(start, stop):
        c = code
        for i in range(n - 1, -1, -1):
            f[i] = c % n
            c //= n
        deg = 0
        for d in range(n - 1, 0, -1):
            for j in range(n):
                counts[j] = 0
            for i in range(n):
                counts[(f[i] - i * d) % n] += 1
            nonzero = False
            for t in range(phi):
                s = 0
                for j in range(n):
                    s += counts[j] * red[j, t]
                if s != 0:
                    nonzero = True
                    break
            if nonzero:
                deg = d
                break
        out[code - start] = deg
    return out


def _census_numpy(n, red, start, stop, batch=1 << 16):
    out = np.zeros(stop - start, dtype=np.int8)
    pw = powers(n)
    idx = np.arange(n, dtype=np.int64)
    for lo in range(start, stop, batch):
        hi = min(lo + batch, stop)
        codes = np.arange(lo, hi, dtype=np.int64)
        f = (codes[:, None] // pw[None, :]) % n
        deg = np.zeros(hi - lo, dtype=np.int8)
        undecided = np.ones(hi - lo, dtype=bool)
        for d in range(n - 1, 0, -1):
            rows = np.nonzero(undecided)[0]
            if rows.size == 0:
                break
            expo = (f[rows] - idx[None, :] * d) % n
            counts = np.zeros((rows.size, n), dtype=np.int64)
            np.add.at(counts, (np.repeat(np.arange(rows.size), n), expo.ravel()), 1)
            hit = rows[np.any(counts @ red != 0, axis=1)]
            deg[hit] = d
            undecided[hit] = False
        out[lo - start : hi - start] = deg
    return out


def census_degrees(n: int, red: np.ndarray, start: int = 0, stop: int | None = None,
                   numba: bool | None = None) -> np.ndarray:
    """Interpolant degree of every self-map of mu_n with code in [start, stop)."""
    stop = n**n if stop is None else stop
    red = np.ascontiguousarray(red, dtype=np.int64)
    if numba is None:
        numba = prefer_numba((stop - start) * n * n)
    if numba:
        return _census_numba(n, red, start, stop)
    return _census_numpy(n, red, start, stop)
