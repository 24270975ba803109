"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``LLB_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("LLB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

rank_mod_p = _impl.rank_mod_p
shortest_cycles = _impl.shortest_cycles

__all__ = ["BACKEND", "rank_mod_p", "shortest_cycles"]
