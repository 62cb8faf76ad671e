"""Kernel backend selection.

The hot inner loops (configuration ranking during matrix assembly, CSR
matrix-vector products) exist twice: a numba ``@njit`` kernel and a pure
numpy fallback.  Which one runs is decided once at import time from the
environment variable ``XXZ_GAP_BACKEND``:

* unset or ``auto`` -- use numba if it imports, else numpy;
* ``numba``         -- require numba, fail loudly if unavailable;
* ``numpy``         -- force the vectorized numpy fallback.

Everything downstream only looks at :data:`USING_NUMBA` and the ``njit``
decorator exported here.  ``benchmarks/bench_backends.py`` compares the
two paths on representative workloads.
"""

import os

_choice = os.environ.get("XXZ_GAP_BACKEND", "auto").strip().lower() or "auto"

if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"XXZ_GAP_BACKEND={_choice!r} not understood; use 'auto', 'numba' or 'numpy'"
    )

USING_NUMBA = False
if _choice in ("auto", "numba"):
    try:
        import numba  # noqa: F401

        USING_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise RuntimeError(
                "XXZ_GAP_BACKEND=numba but numba is not importable"
            )

BACKEND = "numba" if USING_NUMBA else "numpy"

if USING_NUMBA:
    from numba import njit
else:
    def njit(*args, **kwargs):
        """No-op stand-in so kernel definitions still import cleanly."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def set_threads(n):
    """Cap worker threads.  Our kernels are single-threaded by design, so
    this only forwards to numba's thread pool (harmless there) and exists
    to honour the --threads CLI contract."""
    if USING_NUMBA and n is not None and n >= 1:
        import numba

        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))
