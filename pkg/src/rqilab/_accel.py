"""Numba switch.

Set ``RQILAB_NO_NUMBA=1`` to force the pure-numpy kernels. When numba is
missing the numpy kernels are used as well.
"""
import os

_flag = os.environ.get("RQILAB_NO_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _flag in ("", "0", "false", "no")


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity otherwise."""
    if numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)
