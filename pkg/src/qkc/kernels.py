"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
``QKC_PURE_PYTHON`` is set to a non-empty value, the numpy fallback is.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

if os.environ.get("QKC_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.NAME
apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
prob_one = _impl.prob_one
collapse = _impl.collapse


def available_backends() -> dict:
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


def apply_matrix(psi: np.ndarray, bits, u: np.ndarray) -> np.ndarray:
    """Apply a k-qubit matrix on local ``bits`` (first = most significant).

    Generic path for arities the fast kernels do not cover; returns a new array.
    """
    n = psi.size.bit_length() - 1
    k = len(bits)
    t = psi.reshape((2,) * n)
    axes = [n - 1 - b for b in bits]
    ut = np.asarray(u, dtype=complex).reshape((2,) * (2 * k))
    out = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)
