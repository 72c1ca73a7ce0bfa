"""Backend selection for the hot per-sample DSP kernels.

The lock simulations run IIR/demodulation chains over tens of millions of
samples; those inner loops are the package's hot spot.  Two interchangeable
implementations exist:

* ``numba``: fused single-pass loops compiled with ``@njit`` (default when
  numba imports cleanly),
* ``numpy``: the same math staged through vectorized ``scipy.signal.lfilter``
  calls.

Both use the direct-form-II-transposed recurrences with identical operation
order, so outputs agree to the last bit in practice (see
``benchmarks/bench_lock_kernels.py``).  Set the environment variable
``OPASIM_NO_NUMBA=1`` to force the numpy path.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

DISABLE_ENV = "OPASIM_NO_NUMBA"

_numba_backend = None
_numba_error: str | None = None
if os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes"):
    try:
        from . import _kernels_numba as _numba_backend
    except ImportError as exc:  # numba missing or broken: fall back silently
        _numba_error = str(exc)


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _numba_backend is not None else ("numpy",)


def resolve_backend(name: str | None = None):
    """Return the kernel module for ``name`` (None/'auto' picks the default)."""
    if name in (None, "auto"):
        return _numba_backend if _numba_backend is not None else _kernels_numpy
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        if _numba_backend is None:
            raise RuntimeError(
                f"numba backend unavailable ({_numba_error or DISABLE_ENV + ' set'})")
        return _numba_backend
    raise ValueError(f"unknown kernel backend {name!r}")
