"""Backend selection for the exact hot kernels.

The compiled extension is used when it was built; set
``NASHFLOW_PURE_PYTHON=1`` to force the pure-Python versions.
"""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("NASHFLOW_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

earliest_event = _impl.earliest_event
axpy = _impl.axpy
solve_exact = _impl.solve_exact


def backends():
    """Map of available backend name -> module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
