"""Kernel backend selection.

The integration kernels in :mod:`ordeal_lab._kernels` are written so they run
either as plain Python/numpy or compiled with numba.  The active backend is
chosen once at import time:

* ``ORDEAL_LAB_BACKEND=numba`` (or unset): use numba if it is importable,
  otherwise fall back to pure Python silently.
* ``ORDEAL_LAB_BACKEND=numpy``: force the pure Python path even when numba
  is installed.  Useful for debugging and for the backend benchmark.

``ORDEAL_LAB_THREADS`` caps the worker count used by the few operations that
parallelise over independent problems (slope sweeps, restarts).
"""

import os

__all__ = ["BACKEND", "HAS_NUMBA", "jit", "worker_count"]

try:
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _njit = None
    HAS_NUMBA = False

_requested = os.environ.get("ORDEAL_LAB_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        "ORDEAL_LAB_BACKEND must be 'numba' or 'numpy', got %r" % _requested
    )

if _requested == "numpy" or not HAS_NUMBA:
    BACKEND = "numpy"
else:
    BACKEND = "numba"


def jit(func):
    """Compile ``func`` with numba when the numba backend is active.

    Under the numpy backend this is the identity, so the decorated functions
    stay introspectable and debuggable.
    """
    if BACKEND == "numba":
        return _njit(cache=True)(func)
    return func


def worker_count():
    """Worker cap for embarrassingly parallel loops.

    Honors ``ORDEAL_LAB_THREADS``; defaults to 1 (serial).  Values below 1
    are clamped to 1.
    """
    raw = os.environ.get("ORDEAL_LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError("ORDEAL_LAB_THREADS must be an integer, got %r" % raw)
    return max(1, n)
