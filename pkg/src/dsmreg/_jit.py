"""JIT switch.

Hot kernels are written as plain loops and compiled with ``numba.njit`` when
available.  Setting ``DSMREG_DISABLE_JIT=1`` in the environment (before the
package is imported) selects the vectorized pure-numpy fallbacks instead;
this is also the path taken automatically when numba cannot be imported.
"""

import os

_FLAG = os.environ.get("DSMREG_DISABLE_JIT", "").strip().lower()
_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    JIT_ENABLED = True
except ImportError:
    JIT_ENABLED = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if JIT_ENABLED else "numpy"
