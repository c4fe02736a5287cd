"""Hot loops of the characteristic integrator.

The compiled extension is used when it is importable; set
``DKPEIG_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

import os

from . import _rk4_py as python_backend

if os.environ.get("DKPEIG_PURE_PYTHON", "") not in ("", "0"):
    _impl = python_backend
    BACKEND = "python"
else:
    try:
        from . import _rk4 as _impl
    except ImportError:
        _impl = python_backend
        BACKEND = "python"
    else:
        BACKEND = "cython"

bicubic_eval = _impl.bicubic_eval
bicubic_eval_many = _impl.bicubic_eval_many
rk4_bicubic = _impl.rk4_bicubic

__all__ = ["BACKEND", "bicubic_eval", "bicubic_eval_many", "python_backend", "rk4_bicubic"]
