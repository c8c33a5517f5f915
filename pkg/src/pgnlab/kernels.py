"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``PGNLAB_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("PGNLAB_PURE_PYTHON") == "1":
    _impl = _pykernels
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:
        _impl = _pykernels
        COMPILED = False

enumerate_min_basis = _impl.enumerate_min_basis
best_ratio_scan = _impl.best_ratio_scan

BUDGET_EXCEEDED = 1
OUT_OF_MEMORY = 2


def worker_count() -> int:
    env = os.environ.get("PGNLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))
