"""Kernel dispatch: the compiled extension when it was built, NumPy otherwise.

Set ``CSTAR_COMP_PURE=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
power_table = _fallback.power_table
horner = _fallback.horner

if not os.environ.get("CSTAR_COMP_PURE"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        power_table = _kernels.power_table
        horner = _kernels.horner
        BACKEND = "cython"

__all__ = ["BACKEND", "horner", "power_table"]
