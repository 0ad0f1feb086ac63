"""Optional numba acceleration.

Set ``PORTRAIT_LAB_NUMBA=0`` to force the pure-numpy code paths (useful for
debugging and for the kernel benchmark). numba itself is imported on the first
call of a jitted kernel, so small jobs never pay its import cost.
"""

from __future__ import annotations

import functools
import importlib.util
import os

_disabled = os.environ.get("PORTRAIT_LAB_NUMBA", "1").strip().lower() in ("0", "false", "no", "off")

HAVE_NUMBA = not _disabled and importlib.util.find_spec("numba") is not None


def _lazy_jit(fn, kwargs):
    compiled = None

    @functools.wraps(fn)
    def wrapper(*args):
        nonlocal compiled
        if compiled is None:
            from numba import njit as _njit

            compiled = _njit(**kwargs)(fn)
        return compiled(*args)

    wrapper.py_func = fn
    return wrapper


def njit(*args, **kwargs):
    """Lazy ``numba.njit(cache=True)`` when numba is usable, otherwise the identity decorator."""
    if len(args) == 1 and callable(args[0]) and not kwargs:
        fn = args[0]
        return _lazy_jit(fn, {"cache": True}) if HAVE_NUMBA else fn
    kwargs.setdefault("cache", True)
    return (lambda fn: _lazy_jit(fn, kwargs)) if HAVE_NUMBA else (lambda fn: fn)


def use_numba() -> bool:
    return HAVE_NUMBA
