"""Kernel backend selection.

Hot loops in :mod:`mmtri.kernels` exist twice: a numba ``@njit`` version and a
vectorized pure-numpy version.  The backend is chosen once at import time:

* ``MMTRI_NUMBA=0`` (or ``false``/``off``/``no``) forces the numpy path;
* anything else uses numba when it is importable, numpy otherwise.

``MMTRI_THREADS`` caps the numba threading layer (the shipped kernels are
single-threaded, so results never depend on this value).
"""

import os
import warnings

_flag = os.environ.get("MMTRI_NUMBA", "").strip().lower()

if _flag in ("0", "false", "off", "no"):
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - exercised only without numba installed
        if _flag in ("1", "true", "on", "yes"):
            warnings.warn("MMTRI_NUMBA requested but numba is not importable; using numpy kernels")
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    import numba

    _threads = os.environ.get("MMTRI_THREADS", "").strip()
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))

    def njit(func=None, **opts):
        opts.setdefault("cache", True)
        if func is None:
            return numba.njit(**opts)
        return numba.njit(**opts)(func)

else:

    def njit(func=None, **opts):
        # numpy backend: loop kernels stay importable as plain Python
        if func is None:
            return lambda f: f
        return func


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
