"""Optional numba acceleration.

Hot kernels are written twice: a loop form compiled with ``numba.njit`` and a
pure-numpy form. Setting ``TWOINTERVAL_DISABLE_NUMBA=1`` (or running without
numba installed) selects the numpy forms everywhere.
"""

import os

_FLAG = os.environ.get("TWOINTERVAL_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    import numba as _numba

    NUMBA_ENABLED = True
except ImportError:
    _numba = None
    NUMBA_ENABLED = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if NUMBA_ENABLED:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
