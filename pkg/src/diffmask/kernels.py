"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; set
``DIFFMASK_PURE_PYTHON=1`` to force the pure-Python twin. Both expose
``nearest_seed`` and ``weighted_draw`` with identical results.
"""
import os

if os.environ.get("DIFFMASK_PURE_PYTHON") == "1":
    from diffmask._pykernels import nearest_seed, weighted_draw

    BACKEND = "python"
else:
    try:
        from diffmask._ckernels import nearest_seed, weighted_draw

        BACKEND = "cython"
    except ImportError:
        from diffmask._pykernels import nearest_seed, weighted_draw

        BACKEND = "python"

__all__ = ["BACKEND", "nearest_seed", "weighted_draw"]
