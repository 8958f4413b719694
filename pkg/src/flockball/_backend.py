"""Kernel backend selection.

The compiled extension is used when it imports; set ``FLOCKBALL_BACKEND=python``
to force the NumPy fallback.  :func:`get_backend` gives explicit access to
either one (benchmarks and cross-checks use it).
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = os.environ.get("FLOCKBALL_BACKEND", "auto")
    if name == "python":
        return _kernels_py
    if name in ("cython", "compiled"):
        if _ckernels is None:
            raise ImportError("flockball._ckernels is not built")
        return _ckernels
    if name == "auto":
        return _ckernels if _ckernels is not None else _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


backend = get_backend()
BACKEND_NAME = "cython" if backend is _ckernels and _ckernels is not None else "python"
