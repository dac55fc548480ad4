"""Fast Walsh-Hadamard transform with a compiled core and a NumPy fallback.

The compiled Cython kernel (`fedsketch._fwht`) is picked at import time when
present; set FEDSKETCH_PURE_FWHT=1 to force the pure-NumPy path. Both compute
the unnormalized natural-order (Sylvester) transform, so applying twice
multiplies by the row length.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from fedsketch._fwht import fwht_rows as _fwht_rows_compiled
except ImportError:  # extension not built; pure path still fully functional
    _fwht_rows_compiled = None

HAVE_COMPILED = _fwht_rows_compiled is not None
USING_COMPILED = HAVE_COMPILED and os.environ.get("FEDSKETCH_PURE_FWHT", "0") in ("", "0")


def _check_pow2(n: int) -> None:
    if n < 1 or (n & (n - 1)):
        raise ValueError(f"row length must be a power of two, got {n}")


def fwht_rows_numpy(a: np.ndarray) -> np.ndarray:
    """Unnormalized FWHT of every row of a 2-D array, vectorized butterflies."""
    m, n = a.shape
    _check_pow2(n)
    out = np.array(a, dtype=np.float64)
    h = 1
    while h < n:
        out = out.reshape(m, n // (2 * h), 2, h)
        top = out[:, :, 0, :] + out[:, :, 1, :]
        bot = out[:, :, 0, :] - out[:, :, 1, :]
        out = np.stack((top, bot), axis=2).reshape(m, n)
        h *= 2
    return out


def fwht_rows(a: np.ndarray) -> np.ndarray:
    """Unnormalized FWHT of every row; returns a new float64 array."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D array")
    _check_pow2(a.shape[1])
    if USING_COMPILED:
        out = a.copy()
        _fwht_rows_compiled(out)
        return out
    return fwht_rows_numpy(a)
