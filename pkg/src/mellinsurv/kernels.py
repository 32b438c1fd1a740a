"""Backend selection for the hot grid kernels.

The compiled extension is used when it imports; setting the environment
variable ``MELLINSURV_PURE=1`` forces the NumPy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if not os.environ.get("MELLINSURV_PURE"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _kernels_py
else:
    _impl = _kernels_py

exp_sum_grid = _impl.exp_sum_grid
poly_eval = _impl.poly_eval

__all__ = ["BACKEND", "exp_sum_grid", "poly_eval"]
