"""Backend selection for the fitting kernels.

Two interchangeable kernel implementations exist:

* ``_kernels_numba`` -- explicit-loop versions compiled with ``numba.njit``
* ``_kernels_numpy`` -- vectorized pure-numpy versions

The active backend is chosen once at import time from the environment
variable ``SUBSTAB_BACKEND``:

* unset or ``auto``: use numba when importable, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the pure-numpy path
"""

from __future__ import annotations

import os


def _pick_backend() -> str:
    choice = os.environ.get("SUBSTAB_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
        return "numba"
    if choice == "numba":
        import numba  # noqa: F401  raises if unavailable

        return "numba"
    if choice == "numpy":
        return "numpy"
    raise ValueError(
        f"SUBSTAB_BACKEND must be 'auto', 'numba' or 'numpy', got {choice!r}"
    )


BACKEND = _pick_backend()


def get_kernels(backend: str | None = None):
    """Return the kernel module for ``backend`` (default: active backend)."""
    name = BACKEND if backend is None else backend
    if name == "numba":
        from . import _kernels_numba as mod
    else:
        from . import _kernels_numpy as mod
    return mod
