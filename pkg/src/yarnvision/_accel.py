"""Backend switch for the hot kernels.

Kernels in :mod:`yarnvision.kernels` come in two flavours: an explicit-loop
version compiled with numba, and a vectorised numpy/scipy version.  Both
produce identical results.  The numba path is used when numba imports and
the environment variable ``YARNVISION_NUMBA`` is not set to ``0``.
"""
import os

_FALSE = {"0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
NUMBA_REQUESTED = os.environ.get("YARNVISION_NUMBA", "1").strip().lower() not in _FALSE
USE_NUMBA = HAS_NUMBA and NUMBA_REQUESTED


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is available.

    Without numba the plain Python function is returned, so the loop
    kernels stay importable (and slow) for reference runs.
    """
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
