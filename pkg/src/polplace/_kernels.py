"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used.  Setting ``POLPLACE_PURE=1``
forces the fallback.
"""
import os

from . import _pykernels as python_backend

try:
    if os.environ.get("POLPLACE_PURE"):
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

lu_factor = backend.lu_factor
lu_solve = backend.lu_solve
hessenberg = backend.hessenberg
hessenberg_charpoly = backend.hessenberg_charpoly
faddeev_leverrier = backend.faddeev_leverrier
durand_kerner = backend.durand_kerner
rk4_linear = backend.rk4_linear
