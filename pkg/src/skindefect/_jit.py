"""Numba switch.

Kernels are compiled with numba unless ``NHSE_DISABLE_NUMBA`` is set to a
truthy value or numba cannot be imported; the pure-numpy variants are used
otherwise.
"""
import functools
import os

_FALSY = {"", "0", "false", "no", "off"}

USE_NUMBA = os.environ.get("NHSE_DISABLE_NUMBA", "").strip().lower() in _FALSY

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    nb = None
    USE_NUMBA = False

if nb is not None:
    njit = functools.partial(nb.njit, cache=True, nogil=True)
else:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def select(numba_impl, numpy_impl):
    """Return the implementation matching the current backend switch."""
    return numba_impl if USE_NUMBA else numpy_impl
