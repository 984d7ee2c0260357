"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy
reference implementation takes over. Setting ``GREEDY_ENTROPY_PURE=1``
forces the pure-Python path.
"""
import os

from . import _kernels_py

if os.environ.get("GREEDY_ENTROPY_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

thomas_solve = _impl.thomas_solve
farthest_point = _impl.farthest_point
best_subset = _impl.best_subset
simplex_iterate = _impl.simplex_iterate

SIMPLEX_OPTIMAL = _kernels_py.SIMPLEX_OPTIMAL
SIMPLEX_UNBOUNDED = _kernels_py.SIMPLEX_UNBOUNDED
SIMPLEX_ITERLIMIT = _kernels_py.SIMPLEX_ITERLIMIT


def backends():
    """Map backend name to module for every backend available here."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
