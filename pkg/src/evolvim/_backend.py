"""Kernel backend chosen at import: compiled extension, else pure Python.

Set ``EVOLVIM_BACKEND=python`` to force the fallback.
"""
import os

from evolvim import _pykernels

if os.environ.get("EVOLVIM_BACKEND", "").lower() == "python":
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from evolvim import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

__all__ = ["BACKEND", "kernels"]
