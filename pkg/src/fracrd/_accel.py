"""Numba detection and the numpy fallback switch.

Hot kernels live in :mod:`fracrd._kernels` in two flavors: explicit loops
compiled with ``numba.njit``, and vectorized numpy equivalents.  Which
flavor runs is decided once at import time:

* if numba is importable and ``FRACRD_FORCE_NUMPY`` is unset, the compiled
  loops are used;
* setting ``FRACRD_FORCE_NUMPY=1`` (or ``true``/``yes``) selects the pure
  numpy path, which needs no compiler and allocates pairwise matrices
  instead of streaming over pairs.

``njit`` exported here is always callable: when numba is missing or
disabled it degrades to a decorator that returns the function unchanged,
so kernel modules import cleanly either way.
"""

import os


def _flag(name):
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


FORCE_NUMPY = _flag("FRACRD_FORCE_NUMPY") or _flag("FRACRD_DISABLE_NUMBA")

HAVE_NUMBA = False
if not FORCE_NUMPY:
    try:
        from numba import njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

if not HAVE_NUMBA:

    def njit(*args, **kwargs):  # noqa: F811
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


USE_NUMBA = HAVE_NUMBA


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
