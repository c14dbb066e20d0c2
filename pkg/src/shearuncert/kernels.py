"""Kernel backend selection.

The hot loops (window-profile evaluation, weighted reductions over channel
fields) exist twice: a Cython extension and a pure-numpy twin.  The compiled
backend is picked at import when available; ``SHEARUNCERT_KERNELS`` forces a
choice (``cython`` or ``python``).  Both produce bit-identical results, so
nothing downstream depends on which one is active.
"""
from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("SHEARUNCERT_KERNELS", "auto").lower()

if _choice not in ("auto", "cython", "python"):
    raise ValueError(f"SHEARUNCERT_KERNELS must be auto|cython|python, got {_choice!r}")

_impl = None
if _choice in ("auto", "cython"):
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "cython":
            raise ImportError(
                "SHEARUNCERT_KERNELS=cython but the compiled extension is not built"
            )
if _impl is None:
    _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

pairwise_sum = _impl.pairwise_sum
abs2_sum = _impl.abs2_sum
weighted_abs2_sum = _impl.weighted_abs2_sum
cdot = _impl.cdot
cos_bump = _impl.cos_bump
sqrt_tri_bump = _impl.sqrt_tri_bump
