"""Kernel backend selection.

The compiled kernels are used when the extension was built; set
``GCTOP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from gctop.linalg import _pykernels

python_backend = _pykernels

try:
    if os.environ.get("GCTOP_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from gctop.linalg import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

BACKEND = "cython" if compiled_backend is not None else "python"
dense_rank_mod_p = (compiled_backend or python_backend).dense_rank_mod_p
