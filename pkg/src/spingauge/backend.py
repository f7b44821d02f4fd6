"""Kernel backend selection.

The hot numeric kernels in :mod:`spingauge.kernels` are JIT-compiled with
numba by default.  Setting the environment variable ``SPINGAUGE_BACKEND``
before import forces a backend:

* ``SPINGAUGE_BACKEND=numpy``  -- pure-numpy fallback, no compilation
* ``SPINGAUGE_BACKEND=numba``  -- require numba, raise if unavailable

The choice affects speed only; both paths evaluate the same formulas and
agree to floating-point rounding.  Physics configuration never goes
through the environment.
"""

import os

_requested = os.environ.get("SPINGAUGE_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"SPINGAUGE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    NUMBA_ENABLED = False
elif _requested == "numba":
    from numba import njit  # noqa: F401  (import failure is the error we want)

    NUMBA_ENABLED = True
else:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


if NUMBA_ENABLED:

    def jit_kernel(func):
        """Compile a hot kernel in nopython mode, cached on disk."""
        return njit(cache=True)(func)

else:

    def jit_kernel(func):
        """Numpy fallback: run the kernel as plain Python."""
        return func
