"""Numba acceleration switch.

Hot grid kernels ship in two equivalent flavours: numba ``@njit`` loops and a
pure numpy/scipy path. The numpy path is selected when numba is unavailable or
when the environment variable ``QHO_NO_NUMBA`` is set to a non-empty value
(handy for debugging and for the kernel benchmark). Both paths are required to
produce bit-identical results; ``benchmarks/bench_kernels.py`` compares their
speed.
"""

from __future__ import annotations

import os

NUMBA_DISABLED = bool(os.environ.get("QHO_NO_NUMBA"))

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via QHO_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:

    def njit(*args, **kwargs):
        """Identity decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

    HAS_NUMBA = False


def use_numba() -> bool:
    """True when the compiled kernel path is active."""
    return HAS_NUMBA
