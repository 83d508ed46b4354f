"""Numba acceleration switch for the hot numerical kernels.

The interior-point core is written in plain numpy that is also valid
nopython numba. By default the kernels are compiled with ``numba.njit``
when numba is importable; set ``FILTER_BOUNDS_NUMBA=0`` to force the pure
numpy interpretation (useful for debugging and for the benchmark that
compares both paths). ``FILTER_BOUNDS_NUMBA=1`` makes a missing numba an
error instead of a silent fallback.
"""

import os


def _numba_enabled() -> bool:
    flag = os.environ.get("FILTER_BOUNDS_NUMBA", "").strip().lower()
    if flag in {"0", "false", "off", "no"}:
        return False
    if flag in {"1", "true", "on", "yes"}:
        import numba  # noqa: F401  (raise if forced on but unavailable)

        return True
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()

if NUMBA_ENABLED:
    from numba import njit

    def jit_kernel(fn):
        """Compile a kernel with caching; falls through to plain python off-switch."""
        return njit(fn, cache=True)

else:

    def jit_kernel(fn):
        return fn
