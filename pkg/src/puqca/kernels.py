"""Selects the compiled kernels when available, else the numpy fallback.

Set ``PUQCA_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("PUQCA_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

apply_pairs = _impl.apply_pairs
scale_rows = _impl.scale_rows
row_weights = _impl.row_weights

__all__ = ["BACKEND", "apply_pairs", "scale_rows", "row_weights"]
