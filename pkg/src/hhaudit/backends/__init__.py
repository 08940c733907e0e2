"""Backend selection for the numeric hot loops.

Two interchangeable implementations exist:

* ``numba_impl`` -- @njit-compiled kernels (default when numba imports).
* ``numpy_impl`` -- pure-numpy fallback with identical semantics.

Set ``HHAUDIT_BACKEND=numpy`` or ``HHAUDIT_BACKEND=numba`` to force one.
``benchmarks/bench_backends.py`` compares the two on the hot workloads.
"""

import os
import warnings

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1
STATUS_NON_FINITE = 2


def _load():
    requested = os.environ.get("HHAUDIT_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(
            f"HHAUDIT_BACKEND={requested!r}: expected 'numba' or 'numpy'"
        )
    if requested != "numpy":
        try:
            from . import numba_impl
            return numba_impl, "numba"
        except ImportError:
            if requested == "numba":
                warnings.warn(
                    "HHAUDIT_BACKEND=numba but numba is not importable; "
                    "falling back to the numpy backend"
                )
    from . import numpy_impl
    return numpy_impl, "numpy"


_impl, BACKEND_NAME = _load()

eval_program_many = _impl.eval_program_many
gk_adaptive = _impl.gk_adaptive
