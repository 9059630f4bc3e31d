"""Optional numba acceleration.

Kernels are decorated with :func:`njit` from this module. When numba is
missing, or when ``ARTIFACT_DISABLE_NUMBA`` is set to a truthy value, the
decorator returns the function unchanged and the kernels run as plain
Python over numpy arrays.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("ARTIFACT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by ARTIFACT_DISABLE_NUMBA")
    from numba import njit as _numba_njit

    NUMBA_ENABLED = True
except Exception:  # pragma: no cover - exercised only without numba
    _numba_njit = None
    NUMBA_ENABLED = False


def njit(*args, **kwargs):
    """Compile with ``numba.njit`` when enabled, otherwise return the function."""
    if NUMBA_ENABLED:
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def _wrap(fn):
        return fn

    return _wrap
