"""Pick the compiled ascent kernel when it was built, else the Python one.

Set ``SRLAB_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("SRLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def _backend(name):
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def ascent_sweeps(W, mu, q, lam, s, n_sweeps: int, backend: str | None = None) -> float:
    """Run ``n_sweeps`` cyclic dual updates; ``lam`` and ``s`` change in place."""
    impl = _backend(backend)
    return float(impl.ascent_sweeps(W.indptr.astype(np.int32), W.indices.astype(np.int32),
                                    np.ascontiguousarray(W.data, dtype=float),
                                    np.ascontiguousarray(mu, dtype=float), float(q),
                                    lam, s, int(n_sweeps)))


density_from_load = _kernels_py.density_from_load
