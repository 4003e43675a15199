"""numba switch.

Set ``DALESCOPE_BACKEND=numpy`` (or run without numba installed) to get the
pure Python/numpy path; every ``@njit`` function then runs as plain Python.
"""

import os

BACKEND_ENV = "DALESCOPE_BACKEND"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def default_backend() -> str:
    name = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {name!r}")
    if numba is None:
        return "numpy"
    return name


HAVE_NUMBA = numba is not None and default_backend() == "numba"

if HAVE_NUMBA:
    njit = numba.njit(cache=True, nogil=True)
    # per-cell helpers: inlining avoids array refcounting on every call
    njit_inline = numba.njit(cache=True, nogil=True, inline="always")
else:
    def njit(func):
        return func

    njit_inline = njit
